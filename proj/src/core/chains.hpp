// Total-mass Markov chains driven by one additive chain of gamma primitives:
// the single tilted-stable draw sits at the deepest level and every earlier
// state is recovered through the exact multiplicative step, so the pathwise
// relations hold to rounding error, not just in distribution.
#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "core/bridges.hpp"
#include "core/rng.hpp"
#include "core/sticks.hpp"

namespace pgsim {

// State after k steps.  diversity = t_hat^{-alpha}; aux is the additive chain
// value the step conditions on; factors holds the k multipliers emitted so
// far, each in (0,1).  waiting_time stays 0 for the scalar chains and carries
// the exponential tag in the bridge chain.
struct ChainState {
    int k = 0;
    double t_hat = 0.0;
    double diversity = 0.0;
    double aux = 0.0;
    std::vector<double> factors;
    double waiting_time = 0.0;
};

// "k,t_hat,diversity,factor,waiting_time" with %.17g doubles; the factor
// column is the step's own multiplier, 0 at k = 0.
std::string chain_state_csv_row(const ChainState& st);

// Size-biased remainder chain: aux_k = aux_{k-1} + e_k + eps_k with e_k unit
// exponential and eps_k Gamma((1-alpha)/alpha), factor V_k =
// (aux_{k-1} + e_k)/aux_k, and t_hat_{k-1} = t_hat_k * V_k^{-1/alpha}.
// Returns states k = 0..steps.  With zeta = GammaShape(theta/alpha) the V_k
// are independent Beta((theta+k-1+alpha)/alpha, (1-alpha)/alpha).
std::vector<ChainState> run_v_chain(double alpha, const ZetaSpec& zeta,
                                    int steps, RngStream& rng);

// Stick chain: factors are the sticks W_k of the tilted family, aux_k the
// running sum zeta + e_1 + ... + e_k, and t_hat_{k-1} = t_hat_k / W_k.
// With zeta = Const(0) the W_k are independent Beta(k*alpha, 1-alpha).
std::vector<ChainState> run_w_chain(double alpha, const ZetaSpec& zeta,
                                    int steps, RngStream& rng);

// Coagulation chain: aux_k = aux_{k-1} + e_k + eps_{k-1}, factor q_k =
// aux_{k-1}/(aux_{k-1} + eps_{k-1}), and the diversities telescope:
// t_hat_{k-1}^{-alpha} = t_hat_k^{-alpha} * q_k.  A zeta draw of 0 makes
// q_1 = 0 and t_hat_0 infinite with diversity 0.
std::vector<ChainState> run_q_chain(double alpha, const ZetaSpec& zeta,
                                    int steps, RngStream& rng);

// One step of the bridge-valued coagulation chain.  bridge is the state after
// k steps, link the simple bridge tying it to the previous state through
// bridge_{k-1}(y) = bridge_k(link_k(y)) exactly, waiting_time the unit
// exponential tag of the jump.  Entry 0 carries the start bridge, an identity
// link, and tag 0.
struct BdgmStep {
    Bridge bridge;
    SimpleBridge link;
    double waiting_time = 0.0;
    ChainState state;
};

// Runs the q-chain primitives, builds the deepest bridge from the same
// tilting pair as the deepest state, and composes backward so the pathwise
// coagulation identity holds on the nose.  trunc bounds each bridge's
// truncation deficit.  The tags are iid unit exponentials.
std::vector<BdgmStep> bdgm_chain(double alpha, const ZetaSpec& zeta, int steps,
                                 double trunc, RngStream& rng,
                                 std::size_t max_sticks = kDefaultMaxSticks);

enum class TransitionKind { V, W };

// One-step transition density in s of the total-mass chain started at t:
//   V: alpha^2/Gamma((1-alpha)/alpha) (s/t)^{alpha-1}
//      (1-(s/t)^alpha)^{(1-alpha)/alpha-1} f_alpha(s) / (t^2 f_alpha(t))
//   W: alpha/Gamma(1-alpha) (t-s)^{-alpha} f_alpha(s) / (t f_alpha(t))
// Integrates to 1 over 0 < s < t.  Throws std::invalid_argument when alpha
// is outside (0,1) and std::domain_error unless 0 < s < t.
double transition_density(TransitionKind kind, double alpha, double t,
                          double s);

// First step of the V- and W-chains driven by shared draws, so the identity
// t_hat_0 = t_hat_1 * v1^{-1/alpha} = t_hat_alpha / w1 holds exactly.  With
// zeta = GammaShape(theta/alpha), w1 is Beta(theta+alpha, 1-alpha) and v1 is
// Beta((theta+alpha)/alpha, (1-alpha)/alpha).
struct CrossLink {
    double v1 = 0.0;
    double w1 = 0.0;
    double t_hat_0 = 0.0;
    double t_hat_1 = 0.0;
    double t_hat_alpha = 0.0;
};

CrossLink cross_chain_step(double alpha, const ZetaSpec& zeta, RngStream& rng);

}  // namespace pgsim
