#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace pgsim {

class RngStream;

// Ranked mass partition: weights non-increasing, dust = mass not carried by
// any listed atom.  dust + sum(weights) stays within eps_trunc of 1.
struct MassPartition {
    std::vector<double> weights;
    double dust = 0.0;
    double eps_trunc = 1e-10;
};

// Decreasing rearrangement of nonnegative weights.  Zero entries are dropped.
// If fold_dust is set the dust is inserted as an ordinary weight.
// Throws std::invalid_argument on negative input or total mass > 1 + slack.
MassPartition rank(std::vector<double> weights, double dust,
                   bool fold_dust = false);

struct SizeBiasedSequence {
    std::vector<double> picks;
    double residual = 1.0;
};

// Draws atoms without replacement with probability proportional to weight,
// by cumulative-sum inversion, renormalizing after each pick.  Requires a
// proper partition: dust must not exceed the recorded truncation budget.
SizeBiasedSequence size_biased_permutation(const MassPartition& mp,
                                           RngStream& rng);

// First `count` size-biased picks only; same law as a prefix of the full
// permutation but avoids exhausting large partitions.
SizeBiasedSequence size_biased_prefix(const MassPartition& mp, RngStream& rng,
                                      std::size_t count);

// Plug-in diversity estimate block_count / n^alpha.
double alpha_diversity_estimate(std::size_t block_count, std::size_t n,
                                double alpha);

// CSV row: weights in order, then dust.
std::string mass_partition_csv_row(const MassPartition& mp);

// JSON array: [w_1, ..., w_K, dust].
std::string mass_partition_json(const MassPartition& mp);

}  // namespace pgsim
