#pragma once

#include <cstddef>
#include <vector>

#include "core/mass_partition.hpp"
#include "core/rng.hpp"

namespace pgsim {

inline constexpr std::size_t kDefaultMaxSticks = 100000000;

// Stick-breaking family. PD is the two-parameter GEM; PG and EPG draw their
// tilting variable zeta once per stream from the ZetaSpec.
struct StickKind {
    enum class Family { PD, PG, EPG };
    Family family = Family::PD;
    double alpha = 0.5;
    double theta = 0.0;              // PD only
    ZetaSpec zeta = ZetaSpec::zero();  // PG / EPG only

    static StickKind pd(double alpha, double theta);
    static StickKind pg(double alpha, ZetaSpec zeta);
    static StickKind epg(double alpha, ZetaSpec zeta);
};

struct StickState {
    std::size_t k = 0;
    // Running sum: zeta_k for PG, zeta_k + eps_alpha for EPG, unused for PD.
    double zeta_k = 0.0;
    double eps_alpha = 0.0;  // EPG only, drawn once at creation
    std::vector<double> w_list;
    double product = 1.0;  // prod of w_list, equals the residual mass
};

// Draws zeta (and eps_alpha for EPG) once; the stream conditions on them.
StickState make_stick_state(const StickKind& kind, RngStream& rng);

// Advances one stick and returns W_k in (0,1). The k-th size-biased pick is
// (1 - W_k) times the product before the update.
double next_stick(StickState& state, const StickKind& kind, RngStream& rng);

// Extends sticks until the residual product drops below eps, then ranks.
// dust is the residual and eps_trunc records eps. For EPG the stick atoms
// are merged by independent Bernoulli(1 - q) coagulation indicators with
// q = zeta / (zeta + eps_alpha); zeta == 0 returns the point mass (1).
// Throws std::runtime_error if max_sticks is exhausted before eps.
MassPartition stick_stream_to_partition(const StickKind& kind, double eps,
                                        RngStream& rng,
                                        std::size_t max_sticks =
                                            kDefaultMaxSticks);

// Same reduction started from an explicit EPG state: zeta and eps_alpha are
// taken as given instead of drawn, so a caller can couple the partition with
// other functionals of the same primitives. Requires both positive.
MassPartition epg_partition_given(double alpha, double zeta, double eps_alpha,
                                  double eps, RngStream& rng,
                                  std::size_t max_sticks = kDefaultMaxSticks);

struct RSequence {
    std::vector<double> r;  // R_j = (zeta_{j-1} / zeta_j)^{1/alpha}
    double zeta0 = 0.0;
    double zeta_k = 0.0;
};

// PG only: the ratio sequence driving the sticks.
RSequence r_sequence_full(const StickKind& kind, std::size_t k,
                          RngStream& rng);
std::vector<double> r_sequence(const StickKind& kind, std::size_t k,
                               RngStream& rng);

}  // namespace pgsim
