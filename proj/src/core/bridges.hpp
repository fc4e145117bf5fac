// Exchangeable bridges: dusted step functions on [0,1] with explicit atoms,
// their right-continuous inverses, composition (the coagulation of one bridge
// by another), and the bridge-valued samplers built on the stick module.
#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "core/rng.hpp"
#include "core/sticks.hpp"

namespace pgsim {

struct BridgeAtom {
    double location = 0.0;  // in [0,1]
    double weight = 0.0;    // > 0 once stored
};

// F(y) = dust*y + sum of weights at locations <= y.  Atoms are kept sorted by
// location with equal locations merged; dust + total weight never exceeds 1,
// and falls short of 1 only by the truncation deficit of a sampled bridge.
struct Bridge {
    std::vector<BridgeAtom> atoms;
    double dust = 0.0;
};

// b(y) = q*y + (1-q) * I{atom_location <= y}.
struct SimpleBridge {
    double q = 1.0;
    double atom_location = 0.0;
};

// Validates ranges, sorts by location, merges duplicates, drops zero weights.
// Throws std::invalid_argument on negative weights, locations or dust outside
// [0,1], or total mass above 1 (beyond rounding slack).
Bridge make_bridge(std::vector<BridgeAtom> atoms, double dust);
Bridge to_bridge(const SimpleBridge& sb);

// dust + sum of atom weights, i.e. F(1).
double bridge_total_mass(const Bridge& b);
double bridge_largest_atom(const Bridge& b);  // 0 when atomless

// Throws std::invalid_argument when y is outside [0,1].
double bridge_eval(const Bridge& b, double y);
double bridge_eval(const SimpleBridge& b, double y);

// Right-continuous inverse inf{v : F(v) > r}; r is clamped to [0,1] and
// anything at or above F(1) maps to 1.
double bridge_quantile(const Bridge& b, double r);
double bridge_quantile(const SimpleBridge& b, double r);

// Pointwise composition outer(inner(y)) as a Bridge: inner atoms keep their
// locations with weights scaled by outer's dust, outer atoms move to the
// first y where inner reaches their location, so the ones landing inside an
// inner jump interval (lo, hi] merge into that atom's image.  Outer atoms
// beyond inner's total mass are unreachable and are dropped.
Bridge compose(const Bridge& outer, const Bridge& inner);
Bridge compose(const Bridge& outer, const SimpleBridge& inner);

// One size-biased pick: the weight of the atom an independent uniform lands
// on, or 0 when it lands in dust or in the truncation deficit.
double bridge_first_pick(const Bridge& b, RngStream& rng);

// Stick-built bridge: iid uniform locations over the stick masses.  The EPG
// case inherits the Bernoulli coagulation of the mass sampler, so its merged
// atom sits at a single uniform location.
Bridge build_bridge(const StickKind& kind, double trunc, RngStream& rng,
                    std::size_t max_sticks = kDefaultMaxSticks);

// EPG bridge whose tilting pair (zeta, eps_alpha) is supplied by the caller
// rather than drawn, for coupling the bridge with other functionals of the
// same primitives. Locations are fresh iid uniforms.
Bridge build_epg_bridge_given(double alpha, double zeta, double eps_alpha,
                              double trunc, RngStream& rng,
                              std::size_t max_sticks = kDefaultMaxSticks);

// Composition of n simple bridges lambda_n o ... o lambda_1 where
// q_k = z_{k-1} / (z_{k-1} + eps_{k-1}) along the additive chain
// z_k = z_{k-1} + e_k + eps_{k-1}, with z_0 drawn from zeta and eps_k iid
// Gamma((1-alpha)/alpha).  With zeta = GammaShape((theta+alpha)/alpha) the
// q_k are independent Beta((theta+k-1+alpha)/alpha, (1-alpha)/alpha).
// The result carries dust = prod q_k exactly and total mass 1.
Bridge flow_bridge(double alpha, const ZetaSpec& zeta, std::size_t n,
                   RngStream& rng);

// Dirichlet(theta/alpha + k, (n_1-alpha)/alpha, ..., (n_k-alpha)/alpha)
// weights over the blocks of a partition of [n]: first coordinate is dust,
// the rest sit at iid uniform locations.  Throws std::invalid_argument
// unless alpha is in (0,1), theta > -alpha, and every block size is >= 1.
Bridge posterior_bridge(double alpha, double theta,
                        const std::vector<long long>& block_sizes,
                        RngStream& rng);

// Fragmentation mixture: outer GEM(alpha*delta, theta) masses over iid
// PD(alpha, -alpha*delta) bridges (point masses when delta = 1).  Outer and
// inner streams are truncated at trunc/2 each, so the deficit stays below
// trunc.  Requires alpha in (0,1), delta in [0,1], theta > -alpha*delta.
Bridge pitman_frag_bridge(double alpha, double theta, double delta,
                          double trunc, RngStream& rng,
                          std::size_t max_sticks = kDefaultMaxSticks);

// Unit-rate Poisson jump times on (0, horizon] paired with the running
// products prod_{l<=k} R_l, R_l = (z_{l-1}/z_l)^{1/alpha} for the additive
// chain z_l = z_{l-1} + e_l started at a zeta draw.
struct NtrPath {
    std::vector<double> times;   // strictly increasing
    std::vector<double> levels;  // strictly decreasing when zeta > 0
    double zeta = 0.0;           // the conditioning draw
};
NtrPath ntr_fragmenter(double alpha, const ZetaSpec& zeta, double horizon,
                       RngStream& rng);

// { "atoms": [[u, p], ...], "dust": d } with round-trip-exact doubles.
std::string bridge_json(const Bridge& b);
Bridge bridge_from_json(const std::string& text);

}  // namespace pgsim
