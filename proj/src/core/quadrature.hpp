// Adaptive Gauss-Kronrod (7, 15) integration on finite and right-unbounded
// intervals.  Throws on tolerance exhaustion rather than returning a silently
// degraded estimate.
#pragma once

#include <cstddef>
#include <functional>

namespace pgsim {

struct QuadratureConfig {
    double abs_tol = 1e-10;
    double rel_tol = 1e-8;
    int max_depth = 52;
};

// Integral of f over [a, b], a <= b.
double integrate(const std::function<double(double)>& f, double a, double b,
                 const QuadratureConfig& cfg = {});

// Integral of f over [a, infinity), mapped to (0, 1) by x = a + t / (1 - t).
double integrate_to_infinity(const std::function<double(double)>& f, double a,
                             const QuadratureConfig& cfg = {});

}  // namespace pgsim
