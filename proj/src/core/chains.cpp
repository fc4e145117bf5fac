#include "core/chains.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <utility>

#include "core/densities.hpp"

namespace pgsim {

namespace {

void check_chain_args(const char* who, double alpha, int steps) {
    if (!(alpha > 0.0) || !(alpha < 1.0)) {
        throw std::invalid_argument(std::string(who) + ": alpha outside (0,1)");
    }
    if (steps < 1) {
        throw std::invalid_argument(std::string(who) + ": steps must be >= 1");
    }
}

// States k = 0..n from the deepest total mass back through the exact step
// t_{k-1} = t_k * grow(factor_k); diversity is recomputed from t_hat so the
// two columns stay consistent even at an infinite t_hat_0.
template <typename Grow>
std::vector<ChainState> assemble(double alpha, const std::vector<double>& aux,
                                 const std::vector<double>& factors,
                                 double t_deep, Grow grow) {
    const std::size_t n = factors.size();
    std::vector<double> t(n + 1);
    t[n] = t_deep;
    for (std::size_t k = n; k > 0; --k) t[k - 1] = t[k] * grow(factors[k - 1]);

    std::vector<ChainState> states(n + 1);
    for (std::size_t k = 0; k <= n; ++k) {
        states[k].k = static_cast<int>(k);
        states[k].t_hat = t[k];
        states[k].diversity = std::pow(t[k], -alpha);
        states[k].aux = aux[k];
        states[k].factors.assign(
            factors.begin(), factors.begin() + static_cast<std::ptrdiff_t>(k));
    }
    return states;
}

}  // namespace

std::string chain_state_csv_row(const ChainState& st) {
    const double factor = st.factors.empty() ? 0.0 : st.factors.back();
    char buf[256];
    std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%.17g,%.17g", st.k,
                  st.t_hat, st.diversity, factor, st.waiting_time);
    return std::string(buf);
}

std::vector<ChainState> run_v_chain(double alpha, const ZetaSpec& zeta,
                                    int steps, RngStream& rng) {
    check_chain_args("run_v_chain", alpha, steps);
    const std::size_t n = static_cast<std::size_t>(steps);
    const double c = (1.0 - alpha) / alpha;

    std::vector<double> aux(n + 1);
    std::vector<double> factors(n);
    aux[0] = zeta.draw(rng);
    for (std::size_t k = 1; k <= n; ++k) {
        const double e = rng.exponential();
        const double eps = rng.gamma(c);
        const double num = aux[k - 1] + e;
        aux[k] = num + eps;
        factors[k - 1] = num / aux[k];
    }
    const double t_deep = rng.tilted_stable(alpha, aux[n]);
    const double inv = -1.0 / alpha;
    return assemble(alpha, aux, factors, t_deep,
                    [inv](double v) { return std::pow(v, inv); });
}

std::vector<ChainState> run_w_chain(double alpha, const ZetaSpec& zeta,
                                    int steps, RngStream& rng) {
    check_chain_args("run_w_chain", alpha, steps);
    const std::size_t n = static_cast<std::size_t>(steps);
    const StickKind kind = StickKind::pg(alpha, zeta);
    StickState st = make_stick_state(kind, rng);

    std::vector<double> aux(n + 1);
    std::vector<double> factors(n);
    aux[0] = st.zeta_k;
    for (std::size_t k = 1; k <= n; ++k) {
        factors[k - 1] = next_stick(st, kind, rng);
        aux[k] = st.zeta_k;
    }
    const double t_deep = rng.tilted_stable(alpha, aux[n]);
    return assemble(alpha, aux, factors, t_deep,
                    [](double w) { return 1.0 / w; });
}

std::vector<ChainState> run_q_chain(double alpha, const ZetaSpec& zeta,
                                    int steps, RngStream& rng) {
    check_chain_args("run_q_chain", alpha, steps);
    const std::size_t n = static_cast<std::size_t>(steps);
    const double c = (1.0 - alpha) / alpha;

    std::vector<double> aux(n + 1);
    std::vector<double> factors(n);
    aux[0] = zeta.draw(rng);
    for (std::size_t k = 1; k <= n; ++k) {
        const double eps = rng.gamma(c);
        const double e = rng.exponential();
        factors[k - 1] =
            aux[k - 1] > 0.0 ? aux[k - 1] / (aux[k - 1] + eps) : 0.0;
        aux[k] = aux[k - 1] + e + eps;
    }
    // The state variable is the total mass of the extended family at level
    // aux[n]: an independent Gamma((1-alpha)/alpha) piece joins the tilting
    // before the deepest draw.
    const double eps_deep = rng.gamma(c);
    const double xi = aux[n] + eps_deep;
    const double t_deep =
        std::pow(xi / aux[n], 1.0 / alpha) * rng.tilted_stable(alpha, xi);
    const double inv = -1.0 / alpha;
    return assemble(alpha, aux, factors, t_deep,
                    [inv](double q) { return std::pow(q, inv); });
}

std::vector<BdgmStep> bdgm_chain(double alpha, const ZetaSpec& zeta, int steps,
                                 double trunc, RngStream& rng,
                                 std::size_t max_sticks) {
    check_chain_args("bdgm_chain", alpha, steps);
    if (!(trunc > 0.0) || !(trunc < 1.0)) {
        throw std::invalid_argument("bdgm_chain: trunc outside (0,1)");
    }
    const std::size_t n = static_cast<std::size_t>(steps);
    const double c = (1.0 - alpha) / alpha;

    std::vector<double> aux(n + 1);
    std::vector<double> factors(n);
    std::vector<SimpleBridge> links(n);
    std::vector<double> tags(n);
    aux[0] = zeta.draw(rng);
    for (std::size_t k = 1; k <= n; ++k) {
        const double eps = rng.gamma(c);
        const double e = rng.exponential();
        const double q =
            aux[k - 1] > 0.0 ? aux[k - 1] / (aux[k - 1] + eps) : 0.0;
        factors[k - 1] = q;
        aux[k] = aux[k - 1] + e + eps;
        links[k - 1] = SimpleBridge{q, rng.uniform()};
        // Tag: the subordinator increment over the gap, a unit exponential
        // since gap is Gamma(1/alpha) and the tilting telescopes.
        const double gap = e + eps;
        tags[k - 1] =
            std::pow(gap, 1.0 / alpha) * rng.tilted_stable(alpha, gap);
    }
    const double eps_deep = rng.gamma(c);
    const double xi = aux[n] + eps_deep;
    const double t_deep =
        std::pow(xi / aux[n], 1.0 / alpha) * rng.tilted_stable(alpha, xi);

    // Deepest bridge shares (aux[n], eps_deep) with the deepest state; the
    // earlier bridges are its exact coagulations, never fresh samples.
    std::vector<Bridge> bridges(n + 1);
    bridges[n] =
        build_epg_bridge_given(alpha, aux[n], eps_deep, trunc, rng, max_sticks);
    for (std::size_t k = n; k > 0; --k) {
        bridges[k - 1] = compose(bridges[k], links[k - 1]);
    }

    const double inv = -1.0 / alpha;
    std::vector<ChainState> states =
        assemble(alpha, aux, factors, t_deep,
                 [inv](double q) { return std::pow(q, inv); });

    std::vector<BdgmStep> out(n + 1);
    for (std::size_t k = 0; k <= n; ++k) {
        out[k].bridge = std::move(bridges[k]);
        if (k > 0) {
            out[k].link = links[k - 1];
            out[k].waiting_time = tags[k - 1];
            states[k].waiting_time = tags[k - 1];
        }
        out[k].state = std::move(states[k]);
    }
    return out;
}

double transition_density(TransitionKind kind, double alpha, double t,
                          double s) {
    if (!(alpha > 0.0) || !(alpha < 1.0)) {
        throw std::invalid_argument("transition_density: alpha outside (0,1)");
    }
    if (!(t > 0.0) || !(s > 0.0) || !(s < t)) {
        throw std::domain_error("transition_density: need 0 < s < t");
    }
    const double fs = stable_density(alpha, s);
    const double ft = stable_density(alpha, t);
    if (kind == TransitionKind::V) {
        const double c = (1.0 - alpha) / alpha;
        const double r = s / t;
        const double coef = alpha * alpha * std::exp(-std::lgamma(c));
        return coef * std::pow(r, alpha - 1.0) *
               std::pow(1.0 - std::pow(r, alpha), c - 1.0) * fs / (t * t * ft);
    }
    const double coef = alpha * std::exp(-std::lgamma(1.0 - alpha));
    return coef * std::pow(t - s, -alpha) * fs / (t * ft);
}

CrossLink cross_chain_step(double alpha, const ZetaSpec& zeta,
                           RngStream& rng) {
    if (!(alpha > 0.0) || !(alpha < 1.0)) {
        throw std::invalid_argument("cross_chain_step: alpha outside (0,1)");
    }
    const double z0 = zeta.draw(rng);
    const double e1 = rng.exponential();
    const double eps1 = rng.gamma((1.0 - alpha) / alpha);
    const double z1 = z0 + e1;    // stick chain level after one step
    const double za1 = z1 + eps1; // remainder chain level after one step

    // Split the level-1 total mass into the piece the first stick keeps and
    // the fresh piece the remainder step adds; both are scaled subordinator
    // increments, so every ratio below is exact.
    const double t_alpha = rng.tilted_stable(alpha, z1);
    const double a = std::pow(z1, 1.0 / alpha) * t_alpha;
    const double b =
        std::pow(eps1, 1.0 / alpha) * rng.tilted_stable(alpha, eps1);

    CrossLink out;
    out.v1 = z1 / za1;
    out.w1 = a / (a + b);
    out.t_hat_alpha = t_alpha;
    out.t_hat_1 = (a + b) / std::pow(za1, 1.0 / alpha);
    out.t_hat_0 = (a + b) / std::pow(z1, 1.0 / alpha);
    return out;
}

}  // namespace pgsim
