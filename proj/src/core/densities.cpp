#include "core/densities.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <stdexcept>
#include <tuple>
#include <vector>

#include "core/special.hpp"

namespace pgsim {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

void check_alpha(double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::invalid_argument("alpha must lie in (0,1)");
}

// Integrand A(u) e^{-A(u) c} of the single-integral representation, guarded so
// the blow-up of A near u = pi cannot produce inf * 0.
double zolotarev_integrand(double alpha, double u, double c) {
    if (u <= 0.0 || u >= kPi) return 0.0;
    const double la = zolotarev_log_a(alpha, u);
    const double a = std::exp(la);
    if (!std::isfinite(a)) return 0.0;
    const double e = la - a * c;
    return e < -745.0 ? 0.0 : std::exp(e);
}

} // namespace

double psi(double alpha, double omega) {
    check_alpha(alpha);
    if (!(omega >= 0.0)) throw std::invalid_argument("psi: omega must be >= 0");
    return std::pow(1.0 + omega, alpha) - 1.0;
}

double psi(double alpha, double omega, double zeta) {
    check_alpha(alpha);
    if (!(omega >= 0.0)) throw std::invalid_argument("psi: omega must be >= 0");
    if (!(zeta >= 0.0)) throw std::invalid_argument("psi: zeta must be >= 0");
    return std::pow(std::pow(zeta, 1.0 / alpha) + omega, alpha) - zeta;
}

double stable_density_integral(double alpha, double x, const QuadratureConfig& cfg) {
    check_alpha(alpha);
    if (!(x > 0.0)) throw std::invalid_argument("stable_density: x must be > 0");
    const double c = std::pow(x, -alpha / (1.0 - alpha));

    // The integrand peaks where A(u) = 1/c; split there so the adaptive rule
    // sees two monotone flanks instead of a narrow interior spike.
    double split = -1.0;
    const double target = -std::log(c);
    if (zolotarev_log_a(alpha, 1e-9) < target) {
        double lo = 1e-9;
        double hi = kPi - 1e-9;
        if (zolotarev_log_a(alpha, hi) > target) {
            for (int i = 0; i < 100 && hi - lo > 1e-13; ++i) {
                const double mid = 0.5 * (lo + hi);
                (zolotarev_log_a(alpha, mid) < target ? lo : hi) = mid;
            }
            split = 0.5 * (lo + hi);
        }
    }

    auto f = [alpha, c](double u) { return zolotarev_integrand(alpha, u, c); };
    double integral;
    if (split > 0.0)
        integral = integrate(f, 0.0, split, cfg) + integrate(f, split, kPi, cfg);
    else
        integral = integrate(f, 0.0, kPi, cfg);
    if (!(integral > 0.0)) return 0.0;

    const double log_pref =
        std::log(alpha / ((1.0 - alpha) * kPi)) - std::log(x) / (1.0 - alpha);
    return std::exp(log_pref + std::log(integral));
}

double stable_density_series(double alpha, double x) {
    check_alpha(alpha);
    if (!(x > 0.0)) throw std::invalid_argument("stable_density: x must be > 0");
    const double log_x = std::log(x);
    double sum = 0.0;
    double max_term = 0.0;
    int small_streak = 0;
    for (int k = 1; k <= 500; ++k) {
        const double log_mag =
            std::lgamma(k * alpha + 1.0) - std::lgamma(k + 1.0) - (k * alpha + 1.0) * log_x;
        const double mag = std::exp(log_mag);
        const double term = (k % 2 == 1 ? mag : -mag) * std::sin(k * kPi * alpha);
        sum += term;
        max_term = std::max(max_term, std::fabs(term));
        // sin(k pi alpha) vanishes on a sublattice for rational alpha, so the
        // stopping rule watches the sin-free magnitude and demands two hits.
        if (mag < 1e-18 * std::max(std::fabs(sum), 1e-300)) {
            if (++small_streak >= 2) {
                if (max_term > 1e13 * std::fabs(sum))
                    throw std::runtime_error("stable_density_series: catastrophic cancellation");
                return sum / kPi;
            }
        } else {
            small_streak = 0;
        }
    }
    throw std::runtime_error("stable_density_series: no convergence within 500 terms");
}

double stable_density(double alpha, double x, const QuadratureConfig& cfg) {
    check_alpha(alpha);
    if (!(x > 0.0)) throw std::invalid_argument("stable_density: x must be > 0");
    if (x > 3.0) {
        try {
            return stable_density_series(alpha, x);
        } catch (const std::runtime_error&) {
            // fall through to the integral representation
        }
    }
    return stable_density_integral(alpha, x, cfg);
}

double neg_moment(double alpha, double theta, double delta) {
    check_alpha(alpha);
    if (!(theta > -alpha)) throw std::invalid_argument("neg_moment: need theta > -alpha");
    if (!(theta + delta > -alpha))
        throw std::invalid_argument("neg_moment: need theta + delta > -alpha");
    return std::exp(std::lgamma((theta + delta) / alpha + 1.0) - std::lgamma(theta + delta + 1.0) +
                    std::lgamma(theta + 1.0) - std::lgamma(theta / alpha + 1.0));
}

double density_exp_over_tau(double alpha, double zeta, double y) {
    check_alpha(alpha);
    if (!(zeta > 0.0)) throw std::invalid_argument("density_exp_over_tau: zeta must be > 0");
    if (!(y >= 0.0)) throw std::invalid_argument("density_exp_over_tau: y must be >= 0");
    return alpha * zeta * std::pow(1.0 + y, alpha - 1.0) *
           std::exp(-zeta * (std::pow(1.0 + y, alpha) - 1.0));
}

double survival_exp_over_tau(double alpha, double zeta, double y) {
    check_alpha(alpha);
    if (!(zeta > 0.0)) throw std::invalid_argument("survival_exp_over_tau: zeta must be > 0");
    if (!(y >= 0.0)) throw std::invalid_argument("survival_exp_over_tau: y must be >= 0");
    return std::exp(-zeta * (std::pow(1.0 + y, alpha) - 1.0));
}

namespace {

// Form I: alpha/Gamma(theta/alpha) * integral_0^inf e^{-(y+r)^alpha} r^{theta-1} dr.
// For theta < 1 the substitution r = v^{1/theta} removes the endpoint power.
double survival_form_i(double alpha, double theta, double y, const QuadratureConfig& cfg) {
    double integral;
    if (theta < 1.0) {
        const double inv = 1.0 / theta;
        integral = inv * integrate_to_infinity(
                             [alpha, y, inv](double v) {
                                 const double r = std::pow(v, inv);
                                 const double e = -std::pow(y + r, alpha);
                                 return e < -745.0 ? 0.0 : std::exp(e);
                             },
                             0.0, cfg);
    } else {
        integral = integrate_to_infinity(
            [alpha, theta, y](double r) {
                if (r <= 0.0) return 0.0;
                const double e = -std::pow(y + r, alpha) + (theta - 1.0) * std::log(r);
                return e < -745.0 ? 0.0 : std::exp(e);
            },
            0.0, cfg);
    }
    if (!(integral > 0.0)) return 0.0;
    return std::exp(std::log(alpha) - log_gamma(theta / alpha) + std::log(integral));
}

// Form II: 1/Gamma(theta/alpha + 1) * integral_{y^alpha}^inf e^{-r} (r^{1/alpha} - y)^theta dr.
double survival_form_ii(double alpha, double theta, double y, const QuadratureConfig& cfg) {
    const double a0 = std::pow(y, alpha);
    const double integral = integrate_to_infinity(
        [alpha, theta, y](double r) {
            const double root = std::pow(r, 1.0 / alpha);
            if (root <= y) return 0.0;
            const double e = -r + theta * std::log(root - y);
            return e < -745.0 ? 0.0 : std::exp(e);
        },
        a0, cfg);
    if (!(integral > 0.0)) return 0.0;
    return std::exp(-log_gamma(theta / alpha + 1.0) + std::log(integral));
}

// theta in (-alpha, 0): survival via the Laplace transform of the tilted law,
// c_{alpha,theta} * integral e^{-ys} s^{-theta} f_alpha(s) ds.
double survival_negative_theta(double alpha, double theta, double y, const QuadratureConfig& cfg) {
    QuadratureConfig inner = cfg;
    inner.abs_tol = std::max(cfg.abs_tol, 1e-12);
    const double integral = integrate_to_infinity(
        [alpha, theta, y, inner](double s) {
            if (s <= 0.0) return 0.0;
            const double f = stable_density(alpha, s, inner);
            if (f <= 0.0) return 0.0;
            const double e = -y * s - theta * std::log(s) + std::log(f);
            return e < -745.0 ? 0.0 : std::exp(e);
        },
        0.0, cfg);
    if (!(integral > 0.0)) return 0.0;
    const double log_c = std::lgamma(theta + 1.0) - std::lgamma(theta / alpha + 1.0);
    return std::exp(log_c + std::log(integral));
}

} // namespace

double survival_S(double alpha, double theta, double y, const QuadratureConfig& cfg,
                  SurvivalForm form) {
    check_alpha(alpha);
    if (!(theta > -alpha)) throw std::invalid_argument("survival_S: need theta > -alpha");
    if (!(y >= 0.0)) throw std::invalid_argument("survival_S: y must be >= 0");
    if (y == 0.0) return 1.0;
    if (theta == 0.0) return std::exp(-std::pow(y, alpha));
    if (theta < 0.0) {
        if (form != SurvivalForm::Auto)
            throw std::invalid_argument("survival_S: explicit forms require theta >= 0");
        return survival_negative_theta(alpha, theta, y, cfg);
    }
    switch (form) {
        case SurvivalForm::FormII: return survival_form_ii(alpha, theta, y, cfg);
        case SurvivalForm::FormI:
        case SurvivalForm::Auto:
        default: return survival_form_i(alpha, theta, y, cfg);
    }
}

namespace {

// log of the raw form-I/form-II integrand of the density of gamma(1)/S_{alpha,theta}.
// Returns -inf when the value underflows.
double log_density_E_raw(double alpha, double theta, double y, const QuadratureConfig& cfg,
                         EForm form) {
    const double neg_inf = -std::numeric_limits<double>::infinity();
    if (form == EForm::FormIII) {
        const double s = survival_S(alpha, theta - 1.0, y, cfg);
        return s > 0.0 ? std::log(alpha) + std::log(s) : neg_inf;
    }
    if (theta == 0.0) {
        // gamma(1)/S_alpha is exactly Weibull(alpha): alpha y^{alpha-1} e^{-y^alpha}.
        return std::log(alpha) + (alpha - 1.0) * std::log(y) - std::pow(y, alpha);
    }
    const double ya = std::pow(y, alpha);
    double integral;
    if (form == EForm::FormI) {
        if (theta < 1.0) {
            const double inv = 1.0 / theta;
            integral = inv * integrate_to_infinity(
                                 [alpha, ya, inv](double v) {
                                     const double r = std::pow(v, inv);
                                     const double e = -std::pow(1.0 + r, alpha) * ya +
                                                      (alpha - 1.0) * std::log1p(r);
                                     return e < -745.0 ? 0.0 : std::exp(e);
                                 },
                                 0.0, cfg);
        } else {
            integral = integrate_to_infinity(
                [alpha, theta, ya](double r) {
                    if (r <= 0.0) return 0.0;
                    const double e = -std::pow(1.0 + r, alpha) * ya + (theta - 1.0) * std::log(r) +
                                     (alpha - 1.0) * std::log1p(r);
                    return e < -745.0 ? 0.0 : std::exp(e);
                },
                0.0, cfg);
        }
        if (!(integral > 0.0)) return neg_inf;
        return (theta + alpha - 1.0) * std::log(y) + 2.0 * std::log(alpha) -
               log_gamma(theta / alpha) + std::log(integral);
    }
    // Form II in the shifted variable w = v - 1; for theta < 1 the extra
    // substitution w = z^{1/theta} cancels the endpoint power exactly.
    // (1+w)^{1/alpha} - 1 goes through expm1/log1p: near w = 0 the direct
    // subtraction loses every digit while the integrand stays order one.
    auto log_root = [alpha](double w) {
        return std::log(std::expm1(std::log1p(w) / alpha));
    };
    if (theta < 1.0) {
        const double inv = 1.0 / theta;
        integral = inv * integrate_to_infinity(
                             [alpha, theta, ya, inv, log_root](double z) {
                                 if (z <= 0.0) return 0.0;
                                 const double w = std::pow(z, inv);
                                 const double lr = log_root(w);
                                 if (!std::isfinite(lr)) return 0.0;
                                 const double e = -(1.0 + w) * ya + (theta - 1.0) * lr +
                                                  (inv - 1.0) * std::log(z);
                                 return e < -745.0 ? 0.0 : std::exp(e);
                             },
                             0.0, cfg);
    } else {
        integral = integrate_to_infinity(
            [alpha, theta, ya, log_root](double w) {
                if (w <= 0.0) return 0.0;
                const double lr = log_root(w);
                if (!std::isfinite(lr)) return 0.0;
                const double e = -(1.0 + w) * ya + (theta - 1.0) * lr;
                return e < -745.0 ? 0.0 : std::exp(e);
            },
            0.0, cfg);
    }
    if (!(integral > 0.0)) return neg_inf;
    return (theta + alpha - 1.0) * std::log(y) + std::log(alpha) - log_gamma(theta / alpha) +
           std::log(integral);
}

double density_E_form_integral(double alpha, double theta, const QuadratureConfig& cfg,
                               EForm form) {
    if (form == EForm::FormIII) {
        return integrate_to_infinity(
            [alpha, theta, cfg](double y) {
                if (y <= 0.0) return 0.0;
                const double lr = log_density_E_raw(alpha, theta, y, cfg, EForm::FormIII);
                return std::isfinite(lr) ? std::exp(lr) : 0.0;
            },
            0.0, cfg);
    }
    if (theta == 0.0) return 1.0; // exact Weibull
    // Substitute y = z^{1/(theta+alpha)}; the endpoint power y^{theta+alpha-1}
    // cancels against the Jacobian in log space.
    const double p = theta + alpha;
    return integrate_to_infinity(
        [alpha, theta, p, cfg, form](double z) {
            if (z <= 0.0) return 0.0;
            const double y = std::pow(z, 1.0 / p);
            const double lr = log_density_E_raw(alpha, theta, y, cfg, form);
            if (!std::isfinite(lr)) return 0.0;
            const double e = lr + (1.0 / p - 1.0) * std::log(z) - std::log(p);
            return e < -745.0 ? 0.0 : std::exp(e);
        },
        0.0, cfg);
}

std::mutex g_form_integral_mutex;
std::map<std::tuple<double, double, int>, double> g_form_integral_cache;

double density_E_form_integral_cached(double alpha, double theta, const QuadratureConfig& cfg,
                                      EForm form) {
    const auto key = std::make_tuple(alpha, theta, static_cast<int>(form));
    {
        std::lock_guard<std::mutex> lock(g_form_integral_mutex);
        const auto it = g_form_integral_cache.find(key);
        if (it != g_form_integral_cache.end()) return it->second;
    }
    const double value = density_E_form_integral(alpha, theta, cfg, form);
    std::lock_guard<std::mutex> lock(g_form_integral_mutex);
    g_form_integral_cache.emplace(key, value);
    return value;
}

} // namespace

FormDensity density_E_report(double alpha, double theta, double y, const QuadratureConfig& cfg,
                             EForm form) {
    check_alpha(alpha);
    if (!(y > 0.0)) throw std::invalid_argument("density_E: y must be > 0");
    if (form == EForm::FormIII) {
        if (!(theta > 1.0 - alpha))
            throw std::invalid_argument("density_E: form III needs theta > 1 - alpha");
    } else if (!(theta >= 0.0)) {
        throw std::invalid_argument("density_E: forms I and II need theta >= 0");
    }
    FormDensity out;
    const double lr = log_density_E_raw(alpha, theta, y, cfg, form);
    out.raw = std::isfinite(lr) ? std::exp(lr) : 0.0;
    out.form_integral = density_E_form_integral_cached(alpha, theta, cfg, form);
    if (!(out.form_integral > 0.0))
        throw std::runtime_error("density_E: form integral is not positive");
    out.normalized = out.raw / out.form_integral;
    return out;
}

double density_E(double alpha, double theta, double y, const QuadratureConfig& cfg, EForm form) {
    return density_E_report(alpha, theta, y, cfg, form).normalized;
}

double delta_density(double alpha, double x) {
    check_alpha(alpha);
    if (!(x > 0.0)) throw std::invalid_argument("delta_density: x must be > 0");
    const double xa = std::pow(x, alpha);
    const double angle = std::atan2(std::sin(kPi * alpha), std::cos(kPi * alpha) + xa);
    const double num = std::sin(angle / alpha);
    const double den =
        std::pow(xa * xa + 2.0 * xa * std::cos(alpha * kPi) + 1.0, 1.0 / (2.0 * alpha));
    return num / (kPi * den);
}

double omega_density(double alpha, double y, double q) {
    check_alpha(alpha);
    if (!(y > 0.0 && y < 1.0)) throw std::invalid_argument("omega_density: y must be in (0,1)");
    if (!(q > 0.0 && q < 1.0)) throw std::invalid_argument("omega_density: q must be in (0,1)");
    const double x = std::pow((1.0 - q) / q, 1.0 / alpha) * y / (1.0 - y);
    return delta_density(alpha, x) / ((1.0 - y) * std::pow(q, 1.0 / alpha));
}

double rho_merge_density(double alpha, double theta, double p) {
    check_alpha(alpha);
    if (!(theta > -alpha)) throw std::invalid_argument("rho_merge_density: need theta > -alpha");
    if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("rho_merge_density: p must be in (0,1)");
    return beta_pdf(1.0 / alpha + 1.0, theta / alpha + 1.0, p);
}

MixingValue h_mixing(double alpha, const ZetaSpec& zeta, double s, MixingKind kind, RngStream* rng,
                     std::size_t mc_samples) {
    check_alpha(alpha);
    if (!(s > 0.0)) throw std::invalid_argument("h_mixing: s must be > 0");
    const double inv_alpha = 1.0 / alpha;

    auto pg_point = [&](double z) {
        return z == 0.0 ? 1.0 : std::exp(z - s * std::pow(z, inv_alpha));
    };
    auto epg_point = [&](double z) {
        // Limit of the size-biased integrand as z -> 0 is 0 for alpha < 1; the
        // point mass at zero has no mixing-density representation.
        if (z == 0.0) return 0.0;
        return s * inv_alpha * std::pow(z, inv_alpha - 1.0) *
               std::exp(z - s * std::pow(z, inv_alpha));
    };

    switch (zeta.kind) {
        case ZetaSpec::Kind::Zero:
            return {kind == MixingKind::PG ? 1.0 : 0.0, 0.0};
        case ZetaSpec::Kind::Const: {
            const double v = zeta.value;
            return {kind == MixingKind::PG ? pg_point(v) : epg_point(v), 0.0};
        }
        case ZetaSpec::Kind::GammaShape: {
            const double b = zeta.value;
            double log_h;
            if (kind == MixingKind::PG) {
                log_h = std::log(alpha) + std::lgamma(alpha * b) - std::lgamma(b) -
                        alpha * b * std::log(s);
            } else {
                log_h = std::lgamma(alpha * (b - 1.0) + 1.0) - std::lgamma(b) -
                        alpha * (b - 1.0) * std::log(s);
            }
            return {std::exp(log_h), 0.0};
        }
        case ZetaSpec::Kind::Custom:
        default: {
            if (rng == nullptr)
                throw std::invalid_argument("h_mixing: Custom zeta needs an RngStream");
            if (mc_samples == 0)
                throw std::invalid_argument("h_mixing: mc_samples must be positive");
            double sum = 0.0;
            double sum_sq = 0.0;
            for (std::size_t i = 0; i < mc_samples; ++i) {
                const double z = zeta.draw(*rng);
                const double h = kind == MixingKind::PG ? pg_point(z) : epg_point(z);
                sum += h;
                sum_sq += h * h;
            }
            const double n = static_cast<double>(mc_samples);
            const double mean = sum / n;
            const double var = std::max(0.0, sum_sq / n - mean * mean);
            return {mean, std::sqrt(var / n)};
        }
    }
}

} // namespace pgsim
