#pragma once

#include "ldr/rng.hpp"
#include "ldr/structured.hpp"

#include <vector>

namespace ldr {

/// Random instance of a family with defining vectors drawn so that
/// family constraints hold (Cauchy gap, Toeplitz/Hankel corners) and the
/// canonical operator pair is applicable.
StructuredMatrix random_structured(Family family, Index n, Rng& rng);

struct RankSweepRow {
    Family family = Family::circulant;
    Index n = 0;
    Index trial = 0;
    Index measured = 0;
    Index bound = 0;
    bool ok = false;
};

/// Measured displacement rank of random instances against each family's
/// rank bound under its canonical Stein pair.
std::vector<RankSweepRow> run_rank_sweep(const std::vector<Family>& families,
                                         const std::vector<Index>& sizes, Index trials,
                                         std::uint64_t seed);

}  // namespace ldr
