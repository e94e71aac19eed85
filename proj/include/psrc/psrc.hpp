#ifndef PSRC_PSRC_HPP
#define PSRC_PSRC_HPP

#include "psrc/bitvec.hpp"
#include "psrc/codec.hpp"
#include "psrc/error.hpp"
#include "psrc/gf.hpp"
#include "psrc/layout.hpp"
#include "psrc/linalg.hpp"
#include "psrc/piece_io.hpp"
#include "psrc/repair.hpp"
#include "psrc/resilience.hpp"
#include "psrc/sim.hpp"

#endif
