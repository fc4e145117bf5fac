#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "core/bridges.hpp"
#include "core/mass_partition.hpp"
#include "core/rng.hpp"
#include "core/sticks.hpp"

namespace pgsim {

// Set partition of {1..n} in canonical form: elements ascending within each
// block, blocks ordered by least element.
struct SetPartition {
    int n = 0;
    std::vector<std::vector<int>> blocks;
};

// Validates disjointness and coverage, then canonicalizes.
// Throws std::invalid_argument on overlap, gaps, or out-of-range elements.
SetPartition make_set_partition(int n, std::vector<std::vector<int>> blocks);

bool set_partition_valid(const SetPartition& p);

// Block index of 1, 2, ..., n in order of first appearance, e.g. "0,1,0".
// Two partitions are equal iff their keys are equal.
std::string rgs_key(const SetPartition& p);

// JSON list of blocks, e.g. [[1,3],[2]].
std::string set_partition_json(const SetPartition& p);

// CSV row: n, block count, then block sizes in canonical order.
std::string set_partition_csv_row(const SetPartition& p);

// Result of merging a subset of blocks into a single block. The output has
// input_blocks - merged_count + 1 blocks when merged_count >= 1, otherwise
// it is the input partition.
struct MergeOutcome {
    int input_blocks = 0;
    int merged_count = 0;
    SetPartition output;
};

// Exchangeable partition of {1..n} with the kind's law. PD seats customers
// by the Chinese restaurant rule. PG and EPG seat customers on a lazily
// extended stick stream: a customer joins an instantiated stick with
// probability equal to its mass or opens the next stick with the residual,
// which is exact because the sticks are the size-biased masses. EPG flags
// each stick Bernoulli(1 - q) at creation and merges flagged blocks.
SetPartition sample_partition(const StickKind& kind, int n, RngStream& rng);

// Coagulation construction of the EPG partition: draws (eps, zeta), samples
// the PG partition at tilt zeta + eps, marks each block with an independent
// uniform, and merges the blocks whose mark lands in the simple-bridge atom
// span of width 1 - q. Returns the pre-merge partition and the outcome.
std::pair<SetPartition, MergeOutcome> epg_coag_partition(double alpha,
                                                         const ZetaSpec& zeta,
                                                         int n,
                                                         RngStream& rng);

// pmf of the merged-block count given b input blocks: a binomial with
// success probability 1 - q mixed over q ~ Beta((theta+alpha)/alpha,
// (1-alpha)/alpha), evaluated in log space. Entries j = 0..b sum to 1.
std::vector<double> merge_size_pmf(double alpha, double theta, int b);

struct BetaSplitReport {
    std::vector<double> merge_pmf;  // interior of merge_size_pmf at
                                    // theta = 1 - 2 alpha, renormalized
    std::vector<double> split_pmf;  // beta-splitting kernel on 1..b-1
    double max_rel_dev = 0.0;
};

// Compares the renormalized interior merge pmf with the beta-splitting
// kernel of parameter (1 - alpha)/alpha - 1 on the split sizes 1..b-1.
BetaSplitReport beta_splitting_check(double alpha, int b);

// Flags each weight Bernoulli(1 - simple.q), sums the flagged weights into
// one block, and re-ranks. Dust passes through and must be below 1e-2.
MassPartition coag_mass(const MassPartition& mp, const SimpleBridge& simple,
                        RngStream& rng);

// Index into mp.weights with probability proportional to weight.
std::size_t size_biased_index(const MassPartition& mp, RngStream& rng);

// Replaces the picked weight by its mass spread over the fragmenting
// partition and re-ranks. Total mass is conserved; the fragmenting dust
// share joins the output dust. The fragmenting dust must be below 1e-2.
// Throws std::invalid_argument when pick_index is out of range.
MassPartition frag_mass(const MassPartition& mp, std::size_t pick_index,
                        const MassPartition& fragmenting);

// Merges blocks that drew the same base atom. labels[j] is the atom index
// assigned to block j and must cover every block.
SetPartition discrete_base_project(const SetPartition& p,
                                   const std::vector<int>& labels);

}  // namespace pgsim
