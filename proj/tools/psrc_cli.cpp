// psrc: spread-based XOR erasure coding for distributed storage.
// Subcommands cover parameter derivation, layout generation, encode/decode
// of real files, repair planning, resilience analysis, bandwidth
// comparison and deterministic cluster simulation.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "psrc/psrc.hpp"

namespace fs = std::filesystem;
using namespace psrc;

namespace {

std::vector<std::uint8_t> read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw error(errc::io_error, "cannot open " + path);
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                    std::istreambuf_iterator<char>());
    return bytes;
}

void write_file(const std::string& path, const std::vector<std::uint8_t>& bytes) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw error(errc::io_error, "cannot open " + path);
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
}

// Output sink: stdout by default, --out path when given.
struct sink {
    std::string path;

    void emit(const std::string& text) const {
        if (path.empty()) {
            std::cout << text;
        } else {
            std::ofstream out(path);
            if (!out) throw error(errc::io_error, "cannot open " + path);
            out << text;
        }
    }
};

std::string format_plan(const repair_plan& plan, const spread_layout& layout) {
    std::ostringstream os;
    const auto flat = plan.downloads();
    const auto& lost = layout.node_basis(plan.failed_node);
    for (std::size_t r = 0; r < plan.recipes.size(); ++r) {
        os << "lost=" << lost[r].str() << " =";
        bool first = true;
        for (int idx : plan.recipes[r]) {
            const auto& [node, pidx] = flat[static_cast<std::size_t>(idx)];
            os << (first ? " " : " ^ ") << "piece[" << node << "." << pidx << "]";
            first = false;
        }
        os << "\n";
    }
    os << "download_units=" << plan.download_units << "\n";
    if (!plan.optimal) os << "optimality=unknown\n";
    return os.str();
}

std::string csv_num(double v) {
    std::ostringstream os;
    os << v;
    return os.str();
}

int run(int argc, char** argv) {
    CLI::App app{"projective self-repairing codes (spread-based XOR erasure coding)"};
    app.require_subcommand(1);

    int B = 0, alpha = 0;
    auto add_params = [&](CLI::App* sub) {
        sub->add_option("--B", B, "object dimension (fragments)")->required();
        sub->add_option("--alpha", alpha, "pieces per node")->required();
    };

    // params
    auto* sc_params = app.add_subcommand("params", "derive code parameters from (B, alpha)");
    add_params(sc_params);

    // layout
    auto* sc_layout = app.add_subcommand("layout", "emit the canonical per-node basis layout");
    add_params(sc_layout);
    std::string out_path;
    sc_layout->add_option("--out", out_path, "output file (default stdout)");

    // verify
    auto* sc_verify = app.add_subcommand("verify", "check the spread property of a layout file");
    std::string layout_path;
    sc_verify->add_option("--layout", layout_path, "layout file")->required();

    // encode
    auto* sc_encode = app.add_subcommand("encode", "encode a file into per-node piece files");
    add_params(sc_encode);
    std::string in_path, dir_path;
    sc_encode->add_option("--in", in_path, "input file")->required();
    sc_encode->add_option("--outdir", dir_path, "output directory")->required();

    // decode
    auto* sc_decode = app.add_subcommand("decode", "decode an object from piece files");
    sc_decode->add_option("--indir", dir_path, "directory globbed for *.piece files")->required();
    sc_decode->add_option("--out", out_path, "output file")->required();

    // partners
    auto* sc_partners = app.add_subcommand("partners", "repair partners for a failed node");
    add_params(sc_partners);
    int failed = 0, first = 0;
    sc_partners->add_option("--failed", failed, "failed node id (1-based)")->required();
    sc_partners->add_option("--first", first, "first contacted node id")->required();

    // repair-plan
    auto* sc_plan = app.add_subcommand("repair-plan", "reconstruction recipe for a failed node");
    add_params(sc_plan);
    sc_plan->add_option("--failed", failed, "failed node id (1-based)")->required();
    std::vector<int> pair_ids;
    int degree = 0;
    auto* opt_pair = sc_plan->add_option("--pair", pair_ids, "two source node ids")->expected(2);
    auto* opt_d = sc_plan->add_option("--d", degree, "max source nodes for minimal download");
    opt_pair->excludes(opt_d);

    // rho
    auto* sc_rho = app.add_subcommand("rho", "probability a random x-subset can rebuild");
    add_params(sc_rho);
    int x = -1;
    std::uint64_t samples = 0, seed = 0;
    int workers = 1;
    sc_rho->add_option("--x", x, "subset size (omit for the full table)");
    sc_rho->add_option("--samples", samples, "Monte Carlo samples (exact enumeration if omitted)");
    auto* opt_seed = sc_rho->add_option("--seed", seed, "RNG seed (required with --samples)");
    sc_rho->add_option("--workers", workers, "worker threads for exhaustive table");
    sc_rho->add_option("--out", out_path, "CSV output path (default stdout)");

    // availability
    auto* sc_avail = app.add_subcommand("availability", "static-resilience curve vs MDS");
    add_params(sc_avail);
    double step = 0.01;
    sc_avail->add_option("--step", step, "p grid step (default 0.01)");
    sc_avail->add_option("--workers", workers, "worker threads for the rho table");
    sc_avail->add_option("--out", out_path, "CSV output path (default stdout)");

    // bandwidth
    auto* sc_bw = app.add_subcommand("bandwidth", "per-repair download: PSRC vs MSR baseline");
    add_params(sc_bw);
    int dmin = 2, dmax = 4;
    sc_bw->add_option("--dmin", dmin, "smallest repair degree (default 2)");
    sc_bw->add_option("--dmax", dmax, "largest repair degree (default 4)");
    sc_bw->add_option("--out", out_path, "CSV output path (default stdout)");

    // simulate
    auto* sc_sim = app.add_subcommand("simulate", "run a deterministic cluster scenario");
    std::string scenario_path, report_path;
    sc_sim->add_option("--scenario", scenario_path, "scenario file (key=value)")->required();
    sc_sim->add_option("--report", report_path, "report CSV path (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        if (rc != 0) {
            std::cout << "status=error code=2\n";
            return 2;
        }
        std::cout << "status=ok code=0\n";  // --help and friends
        return 0;
    }

    try {
        if (sc_params->parsed()) {
            auto p = derive_params(B, alpha);
            std::cout << "n=" << p.n << " k=" << p.k << "\n";
        } else if (sc_layout->parsed()) {
            auto lay = build_layout(B, alpha);
            std::ostringstream os;
            write_layout(os, lay);
            sink{out_path}.emit(os.str());
        } else if (sc_verify->parsed()) {
            std::ifstream in(layout_path);
            if (!in) throw error(errc::io_error, "cannot open " + layout_path);
            auto lay = read_layout(in);
            auto rep = verify_spread(lay);
            for (const auto& v : rep.violations) std::cout << "violation: " << v << "\n";
            if (!rep.ok) {
                std::cout << "status=error code=1\n";
                return 1;
            }
            std::cout << "spread=ok\n";
        } else if (sc_encode->parsed()) {
            auto lay = build_layout(B, alpha);
            auto bytes = read_file(in_path);
            auto obj = split_object(bytes, B);
            auto nodes = encode(lay, obj);
            const std::uint64_t digest = fnv1a64(bytes);
            for (const auto& np : nodes) {
                fs::path node_dir = fs::path(dir_path) / ("N" + std::to_string(np.node_id));
                fs::create_directories(node_dir);
                for (std::size_t j = 0; j < np.pieces.size(); ++j) {
                    std::ofstream out(node_dir / ("p" + std::to_string(j) + ".piece"),
                                      std::ios::binary);
                    write_piece(out, piece_file{np.pieces[j], bytes.size(), digest});
                }
            }
            std::cout << "nodes=" << nodes.size() << " pieces_per_node=" << alpha << "\n";
        } else if (sc_decode->parsed()) {
            std::vector<piece> pieces;
            std::size_t object_size = 0;
            std::uint64_t digest = 0;
            for (const auto& ent : fs::recursive_directory_iterator(dir_path)) {
                if (!ent.is_regular_file() || ent.path().extension() != ".piece") continue;
                std::ifstream in(ent.path(), std::ios::binary);
                auto pf = read_piece(in);
                object_size = pf.object_size;
                digest = pf.digest;
                pieces.push_back(std::move(pf.pc));
            }
            if (pieces.empty())
                throw error(errc::io_error, "no .piece files under " + dir_path);
            auto res = decode_pieces(pieces.front().coeff.width(), pieces);
            if (!res.object)
                throw error(errc::dimension_mismatch,
                            "unrecoverable: rank " + std::to_string(res.rank));
            auto bytes = join_object(*res.object, object_size);
            if (fnv1a64(bytes) != digest)
                throw error(errc::inconsistent_pieces, "decoded object checksum mismatch");
            write_file(out_path, bytes);
            std::cout << "bytes=" << bytes.size() << "\n";
        } else if (sc_partners->parsed()) {
            auto lay = build_layout(B, alpha);
            if (alpha == 2) {
                auto three = three_partners_alpha2(lay, failed, first);
                std::cout << "N_" << three[0] << " N_" << three[1] << " N_" << three[2] << "\n";
            } else {
                bool sep = false;
                for (int j : pair_partner(lay, failed, first)) {
                    std::cout << (sep ? " " : "") << "N_" << j;
                    sep = true;
                }
                std::cout << "\n";
            }
        } else if (sc_plan->parsed()) {
            auto lay = build_layout(B, alpha);
            repair_plan plan;
            if (!pair_ids.empty()) {
                plan = plan_pair_repair(lay, failed, {pair_ids[0], pair_ids[1]});
            } else if (*opt_d) {
                plan = plan_min_download(lay, failed, degree);
            } else {
                auto pairs = repair_pairs(lay, failed);
                if (pairs.empty())
                    throw error(errc::insufficient_live_nodes, "no repair pair");
                plan = plan_pair_repair(lay, failed, pairs.front());
            }
            std::cout << format_plan(plan, lay);
        } else if (sc_rho->parsed()) {
            auto lay = build_layout(B, alpha);
            if (samples > 0) {
                if (!*opt_seed)
                    throw error(errc::unsupported, "--samples requires --seed");
                if (x < 0)
                    throw error(errc::unsupported, "--samples requires --x");
                auto est = rho_sampled(lay, x, samples, seed);
                std::cout << "x=" << x << " rho=" << est.rho << " ci_lo=" << est.ci_lo
                          << " ci_hi=" << est.ci_hi << " samples=" << est.samples
                          << " seed=" << est.seed << "\n";
            } else if (x >= 0) {
                auto [deficient, rho] = rho_exhaustive(lay, x);
                std::cout << "deficient=" << deficient << " total=" << choose(lay.n(), x)
                          << " rho=" << rho << "\n";
            } else {
                auto tab = rho_table_exhaustive(lay, workers);
                std::ostringstream os;
                os << "x,deficient,total,rho\n";
                for (int i = 0; i <= tab.n; ++i)
                    os << i << "," << tab.deficient[static_cast<std::size_t>(i)] << ","
                       << tab.total[static_cast<std::size_t>(i)] << ","
                       << csv_num(tab.rho[static_cast<std::size_t>(i)]) << "\n";
                sink{out_path}.emit(os.str());
            }
        } else if (sc_avail->parsed()) {
            auto lay = build_layout(B, alpha);
            auto tab = rho_table_exhaustive(lay, workers);
            auto mds = mds_rho(lay.n(), lay.k());
            auto grid = default_p_grid(step);
            std::ostringstream os;
            os << "p,objup_psrc,objup_mds\n";
            for (double p : grid)
                os << csv_num(p) << "," << csv_num(availability_at(tab, p)) << ","
                   << csv_num(availability_at(mds, p)) << "\n";
            sink{out_path}.emit(os.str());
        } else if (sc_bw->parsed()) {
            auto lay = build_layout(B, alpha);
            auto rows = compare_bandwidth(lay, dmin, dmax);
            std::ostringstream os;
            os << "d,msr_units,psrc_units\n";
            for (const auto& row : rows) {
                os << row.d << ",";
                if (row.msr_units) os << csv_num(*row.msr_units);
                else os << "n/a";
                os << "," << row.psrc_units << "\n";
            }
            sink{out_path}.emit(os.str());
        } else if (sc_sim->parsed()) {
            std::ifstream in(scenario_path);
            if (!in) throw error(errc::io_error, "cannot open " + scenario_path);
            auto cfg = parse_scenario(in);
            auto state = sim_init(cfg);
            for (int e = 0; e < cfg.epochs; ++e) state.step();
            std::ostringstream os;
            sim_report(os, state);
            sink{report_path}.emit(os.str());
            const auto& m = state.metrics();
            std::cout << "transfers=" << m.pieces_transferred
                      << " repairs_ok=" << m.repairs_performed
                      << " repairs_failed=" << m.repairs_failed
                      << " decodable=" << (state.decodable_now() ? 1 : 0) << "\n";
        }
    } catch (const error& e) {
        std::cerr << e.what() << "\n";
        std::cout << "status=error code=1\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << e.what() << "\n";
        std::cout << "status=error code=1\n";
        return 1;
    }
    std::cout << "status=ok code=0\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) { return run(argc, argv); }
