// Seedable counter-based random streams and the exact variate samplers
// used everywhere else in the library.  No global state: every consumer
// owns an RngStream.
#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>

namespace pgsim {

// Identical (seed, stream_id) pairs reproduce the same sequence bit for bit;
// distinct stream_ids give statistically independent streams.
class RngStream {
public:
    RngStream(std::uint64_t seed, std::uint64_t stream_id);

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream_id() const { return stream_id_; }
    std::uint64_t counter() const { return counter_; }

    std::uint64_t next_u64();
    double uniform();      // strictly inside (0,1)
    double exponential();  // rate 1
    double normal();       // standard normal, polar method with cached spare

    // Gamma(shape, scale 1).  shape < 1 uses the shape+1 boost with a
    // uniform power; shape <= 0 is a domain error.
    double gamma(double shape);

    // Beta(a, b) by Cheng's BB/BC rejection.  The gamma-ratio construction
    // lives in the tests as an independent oracle.
    double beta(double a, double b);

    // Positive alpha-stable S_alpha, 0 < alpha < 1, normalised so that
    // E[exp(-w S)] = exp(-w^alpha).  Kanter inversion: S = (A(U)/E)^((1-a)/a).
    double stable(double alpha);

    // Exponentially tilted stable: density f_alpha(t) exp(-(t zeta^(1/alpha) - zeta)).
    // Equivalently tau_alpha(zeta) / zeta^(1/alpha) for the subordinator with
    // Laplace exponent (1+w)^alpha - 1.  Block-splitting rejection with
    // m = max(1, ceil(zeta)) blocks; zeta = 0 degrades to stable().
    double tilted_stable(double alpha, double zeta);

private:
    std::uint64_t s_[4];
    std::uint64_t seed_, stream_id_, counter_;
    double spare_normal_ = 0.0;
    bool has_spare_ = false;
};

// Zolotarev's A function on (0, pi), shared by the stable sampler and the
// stable density integral:  A(u) = sin(a u)^(a/(1-a)) sin((1-a)u) / sin(u)^(1/(1-a)).
double zolotarev_log_a(double alpha, double u);

// FNV-1a, used to derive stream ids from task labels.
std::uint64_t hash64(const char* data, std::size_t len);
std::uint64_t hash64_combine(std::uint64_t a, std::uint64_t b);

struct StableIndex {
    double value;
    explicit StableIndex(double a) : value(a) {
        if (!(a > 0.0 && a < 1.0))
            throw std::domain_error("stable index must lie in (0,1)");
    }
};

// Law of the zeta parameter attached to a PG/EPG family.
struct ZetaSpec {
    enum class Kind { Zero, Const, GammaShape, Custom };
    Kind kind = Kind::Zero;
    double value = 0.0;  // Const value or GammaShape shape
    std::function<double(RngStream&)> sampler;  // Custom only

    static ZetaSpec zero() { return {}; }
    static ZetaSpec constant(double v);
    static ZetaSpec gamma_shape(double a);
    static ZetaSpec custom(std::function<double(RngStream&)> f);

    double draw(RngStream& rng) const;
};

}  // namespace pgsim
