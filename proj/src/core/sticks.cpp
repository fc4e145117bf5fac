#include "core/sticks.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

namespace pgsim {

namespace {

void validate(const StickKind& kind) {
    if (kind.family == StickKind::Family::PD) {
        if (kind.alpha < 0.0 || kind.alpha >= 1.0) {
            throw std::invalid_argument("StickKind: PD needs alpha in [0,1)");
        }
        if (!(kind.theta > -kind.alpha)) {
            throw std::invalid_argument("StickKind: PD needs theta > -alpha");
        }
        if (kind.alpha == 0.0 && !(kind.theta > 0.0)) {
            throw std::invalid_argument(
                "StickKind: PD with alpha = 0 needs theta > 0");
        }
    } else {
        if (!(kind.alpha > 0.0) || !(kind.alpha < 1.0)) {
            throw std::invalid_argument("StickKind: alpha outside (0,1)");
        }
    }
}

// One PG step from the running sum z: appends an exponential increment and
// returns (W, z_next) with 1 - W = Beta(1-alpha,alpha) * (1 - R).
std::pair<double, double> pg_step(double z, double alpha, RngStream& rng) {
    const double z_next = z + rng.exponential();
    // 1 - R with R = (z/z_next)^{1/alpha}; exact 1 when z == 0.
    const double one_minus_r = -std::expm1(std::log(z / z_next) / alpha);
    const double b = rng.beta(1.0 - alpha, alpha);
    return {1.0 - b * one_minus_r, z_next};
}

// Reduction loop shared by the stream-to-partition samplers: sticks until the
// residual drops below eps (PD betas, or PG steps from the running sum z),
// then the Bernoulli(q) keep/merge pass for the extended family, then ranking.
MassPartition reduce_stream(const StickKind& kind, double z, bool epg,
                            double q, double eps, RngStream& rng,
                            std::size_t max_sticks) {
    std::vector<double> atoms;
    double residual = 1.0;
    std::size_t k = 0;
    while (residual >= eps) {
        if (k >= max_sticks) {
            throw std::runtime_error(
                "stick_stream_to_partition: max_sticks exhausted before eps");
        }
        ++k;
        double w;
        if (kind.family == StickKind::Family::PD) {
            w = rng.beta(kind.theta + static_cast<double>(k) * kind.alpha,
                         1.0 - kind.alpha);
        } else {
            auto [w_step, z_next] = pg_step(z, kind.alpha, rng);
            w = w_step;
            z = z_next;
        }
        atoms.push_back(residual * (1.0 - w));
        residual *= w;
    }

    if (epg) {
        // Merge each atom independently with probability 1 - q.
        std::vector<double> kept;
        kept.reserve(atoms.size());
        double merged = 0.0;
        for (double a : atoms) {
            if (rng.uniform() < q) {
                kept.push_back(a);
            } else {
                merged += a;
            }
        }
        if (merged > 0.0) kept.push_back(merged);
        atoms = std::move(kept);
    }

    MassPartition mp = rank(std::move(atoms), residual);
    mp.eps_trunc = eps;
    return mp;
}

}  // namespace

StickKind StickKind::pd(double alpha, double theta) {
    StickKind kind;
    kind.family = Family::PD;
    kind.alpha = alpha;
    kind.theta = theta;
    validate(kind);
    return kind;
}

StickKind StickKind::pg(double alpha, ZetaSpec zeta) {
    StickKind kind;
    kind.family = Family::PG;
    kind.alpha = alpha;
    kind.zeta = std::move(zeta);
    validate(kind);
    return kind;
}

StickKind StickKind::epg(double alpha, ZetaSpec zeta) {
    StickKind kind;
    kind.family = Family::EPG;
    kind.alpha = alpha;
    kind.zeta = std::move(zeta);
    validate(kind);
    return kind;
}

StickState make_stick_state(const StickKind& kind, RngStream& rng) {
    validate(kind);
    StickState state;
    switch (kind.family) {
        case StickKind::Family::PD:
            break;
        case StickKind::Family::PG:
            state.zeta_k = kind.zeta.draw(rng);
            break;
        case StickKind::Family::EPG:
            state.zeta_k = kind.zeta.draw(rng);
            state.eps_alpha =
                rng.gamma((1.0 - kind.alpha) / kind.alpha);
            state.zeta_k += state.eps_alpha;
            break;
    }
    return state;
}

double next_stick(StickState& state, const StickKind& kind, RngStream& rng) {
    double w = 0.0;
    if (kind.family == StickKind::Family::PD) {
        const double k = static_cast<double>(state.k) + 1.0;
        w = rng.beta(kind.theta + k * kind.alpha, 1.0 - kind.alpha);
    } else {
        auto [w_step, z_next] = pg_step(state.zeta_k, kind.alpha, rng);
        w = w_step;
        state.zeta_k = z_next;
    }
    ++state.k;
    state.w_list.push_back(w);
    state.product *= w;
    return w;
}

MassPartition stick_stream_to_partition(const StickKind& kind, double eps,
                                        RngStream& rng,
                                        std::size_t max_sticks) {
    validate(kind);
    if (!(eps > 0.0) || !(eps < 1.0)) {
        throw std::invalid_argument(
            "stick_stream_to_partition: eps outside (0,1)");
    }

    double q = 0.0;  // EPG coagulation survival probability
    double z = 0.0;
    double eps_alpha = 0.0;
    const bool epg = kind.family == StickKind::Family::EPG;
    if (kind.family != StickKind::Family::PD) {
        z = kind.zeta.draw(rng);
        if (epg) {
            if (z == 0.0) {
                // EPG(alpha, 0) is the point mass at (1, 0, 0, ...).
                MassPartition mp;
                mp.weights = {1.0};
                mp.dust = 0.0;
                mp.eps_trunc = eps;
                return mp;
            }
            eps_alpha = rng.gamma((1.0 - kind.alpha) / kind.alpha);
            q = z / (z + eps_alpha);
            z += eps_alpha;
        }
    }

    return reduce_stream(kind, z, epg, q, eps, rng, max_sticks);
}

MassPartition epg_partition_given(double alpha, double zeta, double eps_alpha,
                                  double eps, RngStream& rng,
                                  std::size_t max_sticks) {
    if (!(alpha > 0.0) || !(alpha < 1.0)) {
        throw std::invalid_argument("epg_partition_given: alpha outside (0,1)");
    }
    if (!(zeta > 0.0) || !(eps_alpha > 0.0)) {
        throw std::invalid_argument(
            "epg_partition_given: zeta and eps_alpha must be positive");
    }
    if (!(eps > 0.0) || !(eps < 1.0)) {
        throw std::invalid_argument("epg_partition_given: eps outside (0,1)");
    }
    return reduce_stream(StickKind::epg(alpha, ZetaSpec::constant(zeta)),
                         zeta + eps_alpha, true, zeta / (zeta + eps_alpha),
                         eps, rng, max_sticks);
}

RSequence r_sequence_full(const StickKind& kind, std::size_t k,
                          RngStream& rng) {
    if (kind.family != StickKind::Family::PG) {
        throw std::invalid_argument("r_sequence: PG kind required");
    }
    validate(kind);
    if (k < 1) {
        throw std::invalid_argument("r_sequence: k >= 1 required");
    }
    RSequence out;
    out.zeta0 = kind.zeta.draw(rng);
    double z = out.zeta0;
    out.r.reserve(k);
    for (std::size_t j = 0; j < k; ++j) {
        const double z_next = z + rng.exponential();
        out.r.push_back(std::pow(z / z_next, 1.0 / kind.alpha));
        z = z_next;
    }
    out.zeta_k = z;
    return out;
}

std::vector<double> r_sequence(const StickKind& kind, std::size_t k,
                               RngStream& rng) {
    return r_sequence_full(kind, k, rng).r;
}

}  // namespace pgsim
