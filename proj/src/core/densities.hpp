#pragma once

#include <cstddef>

#include "core/quadrature.hpp"
#include "core/rng.hpp"

namespace pgsim {

// Levy exponent (1+omega)^alpha - 1 of the unit-tilted stable subordinator.
double psi(double alpha, double omega);

// Shifted exponent (zeta^{1/alpha}+omega)^alpha - zeta; reduces to omega^alpha at zeta=0.
double psi(double alpha, double omega, double zeta);

// Density of the one-sided alpha-stable law normalized by E[e^{-t S^alpha}]... E[e^{-wS}]=e^{-w^alpha}.
// Integral representation for small x, convergent series for large x.
double stable_density(double alpha, double x, const QuadratureConfig& cfg = QuadratureConfig{});
double stable_density_integral(double alpha, double x, const QuadratureConfig& cfg = QuadratureConfig{});
double stable_density_series(double alpha, double x);

// E[S^{-delta}] under the power-tilted stable law with index theta; exact log-gamma ratio.
double neg_moment(double alpha, double theta, double delta);

// Density and survival of gamma(1)/tau_alpha(zeta): alpha zeta (y+1)^{alpha-1} e^{-zeta psi_alpha(y)}.
double density_exp_over_tau(double alpha, double zeta, double y);
double survival_exp_over_tau(double alpha, double zeta, double y);

enum class SurvivalForm { Auto, FormI, FormII };

// Survival function of the size-biased ratio law with parameter theta > -alpha.
// FormI integrates e^{-(y+r)^alpha} r^{theta-1}; FormII integrates e^{-r} (r^{1/alpha}-y)^theta.
// theta = 0 collapses to exp(-y^alpha); theta < 0 falls back to the Laplace-transform route.
double survival_S(double alpha, double theta, double y,
                  const QuadratureConfig& cfg = QuadratureConfig{},
                  SurvivalForm form = SurvivalForm::Auto);

enum class EForm { FormI, FormII, FormIII };

struct FormDensity {
    double raw = 0.0;           // form evaluated with its printed constant
    double normalized = 0.0;    // raw / form_integral
    double form_integral = 0.0; // integral of the raw form over (0, infinity)
};

// Density of E = gamma(1)/S_{alpha,theta}. Forms I and II need theta >= 0;
// Form III is alpha * survival_S(alpha, theta-1, y) and needs theta > 1-alpha.
// Every form is renormalized by its computed integral; the raw value and the
// integral are reported so callers can log the ratio.
FormDensity density_E_report(double alpha, double theta, double y,
                             const QuadratureConfig& cfg = QuadratureConfig{},
                             EForm form = EForm::FormII);
double density_E(double alpha, double theta, double y,
                 const QuadratureConfig& cfg = QuadratureConfig{},
                 EForm form = EForm::FormII);

// Density of the ratio of a stable variable to an independent power-tilted one (index 1).
double delta_density(double alpha, double x);

// Density of the PD(alpha,1) bridge evaluated at fixed q, composed from delta_density.
double omega_density(double alpha, double y, double q);

// Normalized merge kernel: Beta(1/alpha+1, theta/alpha+1) density in the merged fraction p.
double rho_merge_density(double alpha, double theta, double p);

enum class MixingKind { PG, EPG };

struct MixingValue {
    double value = 0.0;
    double std_error = 0.0; // zero when computed in closed form
};

// Mixing density h against the stable law: PG uses E[e^{-(s zeta^{1/alpha} - zeta)}],
// EPG uses the size-biased variant s E[(1/alpha) zeta^{1/alpha-1} e^{-(s zeta^{1/alpha}-zeta)}].
// Zero/Const/GammaShape evaluate in closed form; Custom needs an RngStream for Monte Carlo.
MixingValue h_mixing(double alpha, const ZetaSpec& zeta, double s, MixingKind kind,
                     RngStream* rng = nullptr, std::size_t mc_samples = 200000);

} // namespace pgsim
