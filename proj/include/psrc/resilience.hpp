#ifndef PSRC_RESILIENCE_HPP
#define PSRC_RESILIENCE_HPP

#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "psrc/layout.hpp"
#include "psrc/repair.hpp"

namespace psrc {

inline double log_choose(int n, int x) {
    return std::lgamma(n + 1.0) - std::lgamma(x + 1.0) - std::lgamma(n - x + 1.0);
}

inline std::uint64_t choose(int n, int x) {
    if (x < 0 || x > n) return 0;
    std::uint64_t r = 1;
    for (int i = 1; i <= x; ++i) r = r * static_cast<std::uint64_t>(n - x + i) / i;
    return r;
}

// rho_x table: for each x, the fraction of C(n,x) node subsets whose
// pooled coefficient vectors reach rank B.
struct rho_table {
    int n = 0;
    int k = 0;
    std::vector<std::uint64_t> deficient;  // index x = 0..n
    std::vector<std::uint64_t> total;
    std::vector<double> rho;
    std::string method;
};

namespace detail {

// Depth-first subset walk with a shared incremental echelon. Once a
// prefix reaches rank B every completion is retrievable, so the branch
// contributes no deficient subsets and is pruned.
inline void count_deficient(const spread_layout& layout, int node, int chosen, echelon& state,
                            std::vector<std::uint64_t>& deficient) {
    if (state.rank() == layout.B()) return;
    if (node > layout.n()) {
        ++deficient[static_cast<std::size_t>(chosen)];
        return;
    }
    count_deficient(layout, node + 1, chosen, state, deficient);
    echelon with = state;
    for (const auto& v : layout.node_basis(node)) with.add(v);
    count_deficient(layout, node + 1, chosen + 1, with, deficient);
}

struct prefix_task {
    int first_node;  // continue from this node
    int chosen;
    echelon state;
};

inline void expand_tasks(const spread_layout& layout, int depth, int node, int chosen,
                         const echelon& state, std::vector<prefix_task>& tasks) {
    if (state.rank() == layout.B()) return;  // prunable prefix
    if (node > depth || node > layout.n()) {
        tasks.push_back({node, chosen, state});
        return;
    }
    expand_tasks(layout, depth, node + 1, chosen, state, tasks);
    echelon with = state;
    for (const auto& v : layout.node_basis(node)) with.add(v);
    expand_tasks(layout, depth, node + 1, chosen + 1, with, tasks);
}

}  // namespace detail

// Exhaustive rho over all x at once; deterministic for any worker count
// (workers own disjoint prefix ranges, counts are summed).
inline rho_table rho_table_exhaustive(const spread_layout& layout, int workers = 1) {
    const int n = layout.n();
    rho_table tab;
    tab.n = n;
    tab.k = layout.k();
    tab.method = "exhaustive";
    tab.deficient.assign(static_cast<std::size_t>(n) + 1, 0);

    if (workers <= 1) {
        echelon e(layout.B());
        detail::count_deficient(layout, 1, 0, e, tab.deficient);
    } else {
        std::vector<detail::prefix_task> tasks;
        const int depth = std::min(n, 8);
        detail::expand_tasks(layout, depth, 1, 0, echelon(layout.B()), tasks);
        std::vector<std::vector<std::uint64_t>> partial(
            static_cast<std::size_t>(workers),
            std::vector<std::uint64_t>(static_cast<std::size_t>(n) + 1, 0));
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) {
            pool.emplace_back([&, w] {
                for (std::size_t t = static_cast<std::size_t>(w); t < tasks.size();
                     t += static_cast<std::size_t>(workers)) {
                    echelon e = tasks[t].state;
                    detail::count_deficient(layout, tasks[t].first_node, tasks[t].chosen, e,
                                            partial[static_cast<std::size_t>(w)]);
                }
            });
        }
        for (auto& th : pool) th.join();
        for (const auto& p : partial)
            for (std::size_t x = 0; x < p.size(); ++x) tab.deficient[x] += p[x];
    }

    tab.total.resize(static_cast<std::size_t>(n) + 1);
    tab.rho.resize(static_cast<std::size_t>(n) + 1);
    for (int x = 0; x <= n; ++x) {
        tab.total[static_cast<std::size_t>(x)] = choose(n, x);
        tab.rho[static_cast<std::size_t>(x)] =
            1.0 - static_cast<double>(tab.deficient[static_cast<std::size_t>(x)]) /
                      static_cast<double>(tab.total[static_cast<std::size_t>(x)]);
    }
    return tab;
}

// Exact deficient count for a single x. The budget guards C(n,x) blowup;
// callers hitting it should fall back to rho_sampled.
inline std::pair<std::uint64_t, double> rho_exhaustive(const spread_layout& layout, int x,
                                                       std::uint64_t budget = std::uint64_t{1}
                                                                              << 22) {
    const int n = layout.n();
    if (x < 0 || x > n) throw error(errc::unsupported, "x outside 0..n");
    const std::uint64_t total = choose(n, x);
    if (total > budget)
        throw error(errc::budget_exceeded,
                    "C(" + std::to_string(n) + "," + std::to_string(x) + ")=" +
                        std::to_string(total) + " exceeds enumeration budget");
    std::uint64_t deficient = 0;
    // choose `remaining` more nodes starting at `start`
    auto rec = [&](auto&& self, int start, int remaining, const echelon& state) -> void {
        if (state.rank() == layout.B()) return;
        if (remaining == 0) {
            ++deficient;
            return;
        }
        for (int j = start; j <= n - remaining + 1; ++j) {
            echelon with = state;
            for (const auto& v : layout.node_basis(j)) with.add(v);
            self(self, j + 1, remaining - 1, with);
        }
    };
    rec(rec, 1, x, echelon(layout.B()));
    return {deficient, 1.0 - static_cast<double>(deficient) / static_cast<double>(total)};
}

struct rho_estimate {
    double rho = 0.0;
    double ci_lo = 0.0;
    double ci_hi = 0.0;
    std::uint64_t samples = 0;
    std::uint64_t seed = 0;
};

// Monte Carlo rho_x for layouts too large to enumerate. Normal 95% CI,
// Wilson interval when either outcome count is below 5.
inline rho_estimate rho_sampled(const spread_layout& layout, int x, std::uint64_t samples,
                                std::uint64_t seed) {
    const int n = layout.n();
    if (x < 0 || x > n) throw error(errc::unsupported, "x outside 0..n");
    if (samples < 1) throw error(errc::unsupported, "samples must be >= 1");
    rho_estimate est;
    est.samples = samples;
    est.seed = seed;
    if (x < layout.k()) return est;  // rho is identically 0 below k
    std::mt19937_64 rng(seed);
    std::vector<int> ids(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) ids[static_cast<std::size_t>(i)] = i + 1;
    std::uint64_t ok = 0;
    for (std::uint64_t s = 0; s < samples; ++s) {
        // partial Fisher-Yates for a uniform x-subset
        for (int i = 0; i < x; ++i) {
            std::uniform_int_distribution<int> dist(i, n - 1);
            std::swap(ids[static_cast<std::size_t>(i)], ids[static_cast<std::size_t>(dist(rng))]);
        }
        echelon e(layout.B());
        for (int i = 0; i < x && e.rank() < layout.B(); ++i)
            for (const auto& v : layout.node_basis(ids[static_cast<std::size_t>(i)])) e.add(v);
        if (e.rank() == layout.B()) ++ok;
    }
    const double N = static_cast<double>(samples);
    const double p = static_cast<double>(ok) / N;
    est.rho = p;
    const double z = 1.959963984540054;
    if (ok < 5 || samples - ok < 5) {
        // Wilson
        const double z2 = z * z;
        const double denom = 1.0 + z2 / N;
        const double center = (p + z2 / (2 * N)) / denom;
        const double half = z * std::sqrt(p * (1 - p) / N + z2 / (4 * N * N)) / denom;
        est.ci_lo = center - half;
        est.ci_hi = center + half;
    } else {
        const double half = z * std::sqrt(p * (1 - p) / N);
        est.ci_lo = p - half;
        est.ci_hi = p + half;
    }
    return est;
}

// obj_up(p) = sum_{x=k}^n rho_x C(n,x) p^x (1-p)^(n-x), binomial weights
// evaluated in the log domain.
inline double availability_at(const rho_table& tab, double p) {
    if (p <= 0.0) return 0.0;
    double acc = 0.0;
    for (int x = tab.k; x <= tab.n; ++x) {
        double lw;
        if (p >= 1.0) {
            if (x != tab.n) continue;
            lw = 0.0;
        } else {
            lw = log_choose(tab.n, x) + x * std::log(p) + (tab.n - x) * std::log1p(-p);
        }
        acc += tab.rho[static_cast<std::size_t>(x)] * std::exp(lw);
    }
    return acc;
}

struct availability_curve {
    std::vector<std::pair<double, double>> points;  // (p_node, obj_up)
};

inline availability_curve availability(const rho_table& tab, const std::vector<double>& p_grid) {
    availability_curve curve;
    curve.points.reserve(p_grid.size());
    for (double p : p_grid) curve.points.emplace_back(p, availability_at(tab, p));
    return curve;
}

inline std::vector<double> default_p_grid(double step = 0.01) {
    std::vector<double> grid;
    for (int i = 0;; ++i) {
        double p = i * step;
        if (p > 1.0 + 1e-12) break;
        grid.push_back(std::min(p, 1.0));
    }
    return grid;
}

// Reference MDS(n,k): rho_x = 1 for x >= k.
inline rho_table mds_rho(int n, int k) {
    rho_table tab;
    tab.n = n;
    tab.k = k;
    tab.method = "mds-reference";
    tab.deficient.assign(static_cast<std::size_t>(n) + 1, 0);
    tab.total.resize(static_cast<std::size_t>(n) + 1);
    tab.rho.resize(static_cast<std::size_t>(n) + 1);
    for (int x = 0; x <= n; ++x) {
        tab.total[static_cast<std::size_t>(x)] = choose(n, x);
        if (x < k) {
            tab.deficient[static_cast<std::size_t>(x)] = tab.total[static_cast<std::size_t>(x)];
            tab.rho[static_cast<std::size_t>(x)] = 0.0;
        } else {
            tab.rho[static_cast<std::size_t>(x)] = 1.0;
        }
    }
    return tab;
}

// Minimum-storage-regenerating download total B*d/(k*(d-k+1)); only
// defined for d >= k.
inline std::optional<double> msr_download(int B, int k, int d) {
    if (d < k) return std::nullopt;
    return static_cast<double>(B) * d / (static_cast<double>(k) * (d - k + 1));
}

struct bandwidth_row {
    int d = 0;
    std::optional<double> msr_units;  // nullopt when d < k
    int psrc_units = 0;
    bool psrc_optimal = true;
};

// PSRC download (via minimal-download planning, all nodes live) against
// the MSR baseline, per repair degree d.
inline std::vector<bandwidth_row> compare_bandwidth(const spread_layout& layout, int d_min,
                                                    int d_max) {
    std::vector<bandwidth_row> rows;
    for (int d = d_min; d <= d_max; ++d) {
        bandwidth_row row;
        row.d = d;
        row.msr_units = msr_download(layout.B(), layout.k(), d);
        auto plan = plan_min_download(layout, 1, d);
        row.psrc_units = plan.download_units;
        row.psrc_optimal = plan.optimal;
        rows.push_back(row);
    }
    return rows;
}

}  // namespace psrc

#endif
