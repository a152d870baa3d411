#include "ldr/rank_sweep.hpp"

#include "ldr/displacement.hpp"

namespace ldr {

StructuredMatrix random_structured(Family family, Index n, Rng& rng) {
    switch (family) {
        case Family::circulant:
            return StructuredMatrix::circulant(rng.normal_vec(n));
        case Family::toeplitz: {
            Vec col = rng.normal_vec(n);
            Vec row = rng.normal_vec(n);
            row[0] = col[0];
            return StructuredMatrix::toeplitz(std::move(col), std::move(row));
        }
        case Family::hankel: {
            Vec col = rng.normal_vec(n);
            Vec row = rng.normal_vec(n);
            row[0] = col[n - 1];
            return StructuredMatrix::hankel(std::move(col), std::move(row));
        }
        case Family::vandermonde:
            return StructuredMatrix::vandermonde(rng.uniform_vec(n, -1.0, 1.0));
        case Family::cauchy:
            // disjoint ranges keep the gap and keep t away from zero
            return StructuredMatrix::cauchy(rng.uniform_vec(n, 1.0, 2.0),
                                            rng.uniform_vec(n, -2.0, -1.0));
    }
    throw ValidationError("random_structured: unknown family");
}

std::vector<RankSweepRow> run_rank_sweep(const std::vector<Family>& families,
                                         const std::vector<Index>& sizes, Index trials,
                                         std::uint64_t seed) {
    require(!families.empty(), "rank sweep: no families given");
    require(sizes.size() >= 3, "rank sweep: need at least 3 sizes");
    require(trials >= 1, "rank sweep: trials must be positive");
    for (Index n : sizes) require(n >= 2, "rank sweep: sizes must be >= 2");

    std::vector<RankSweepRow> rows;
    for (Family family : families) {
        for (Index n : sizes) {
            Rng rng(derive_seed(seed, (static_cast<std::uint64_t>(family) << 32) ^
                                          static_cast<std::uint64_t>(n)));
            for (Index trial = 0; trial < trials; ++trial) {
                const StructuredMatrix s = random_structured(family, n, rng);
                const OperatorPair pair = s.table1_pair();
                RankSweepRow row;
                row.family = family;
                row.n = n;
                row.trial = trial;
                row.bound = s.table1_rank_bound();
                row.measured = displacement_rank(s.to_dense(), pair);
                row.ok = row.measured <= row.bound;
                rows.push_back(row);
            }
        }
    }
    return rows;
}

}  // namespace ldr
