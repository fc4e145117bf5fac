#include "core/rng.hpp"

#include <cmath>

namespace pgsim {

namespace {

inline std::uint64_t splitmix64(std::uint64_t& x) {
    x += 0x9E3779B97F4A7C15ull;
    std::uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

inline std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
}

}  // namespace

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_id)
    : seed_(seed), stream_id_(stream_id), counter_(0) {
    std::uint64_t z = seed;
    z ^= 0x9E3779B97F4A7C15ull * (stream_id + 1);
    z ^= rotl(stream_id, 29);
    s_[0] = splitmix64(z);
    s_[1] = splitmix64(z);
    s_[2] = splitmix64(z);
    s_[3] = splitmix64(z);
    if ((s_[0] | s_[1] | s_[2] | s_[3]) == 0) s_[0] = 1;  // xoshiro forbids all-zero
}

std::uint64_t RngStream::next_u64() {
    // xoshiro256**
    const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    ++counter_;
    return result;
}

double RngStream::uniform() {
    // 53-bit mantissa shifted into (0,1); the +0.5 keeps 0 out of range.
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double RngStream::exponential() { return -std::log(uniform()); }

double RngStream::normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_normal_;
    }
    double u, v, s;
    do {
        u = 2.0 * uniform() - 1.0;
        v = 2.0 * uniform() - 1.0;
        s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double f = std::sqrt(-2.0 * std::log(s) / s);
    spare_normal_ = v * f;
    has_spare_ = true;
    return u * f;
}

double RngStream::gamma(double shape) {
    if (!(shape > 0.0)) throw std::domain_error("gamma shape must be positive");
    if (shape < 1.0) {
        // boost: gamma(a) = gamma(a+1) * U^(1/a)
        const double g = gamma(shape + 1.0);
        return g * std::pow(uniform(), 1.0 / shape);
    }
    // Marsaglia-Tsang squeeze
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double x, v;
        do {
            x = normal();
            v = 1.0 + c * x;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = uniform();
        if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
        if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
    }
}

double RngStream::beta(double a, double b) {
    if (!(a > 0.0) || !(b > 0.0)) throw std::domain_error("beta parameters must be positive");
    const double p = std::min(a, b);
    const double q = std::max(a, b);
    const double sum = a + b;
    const double log4 = 1.3862943611198906;
    double w;
    if (p > 1.0) {
        // Cheng BB
        const double lam = std::sqrt((sum - 2.0) / (2.0 * a * b - sum));
        const double gam = p + 1.0 / lam;
        for (;;) {
            const double u1 = uniform();
            const double u2 = uniform();
            const double v = lam * std::log(u1 / (1.0 - u1));
            w = (v > 700.0) ? p * std::exp(700.0) : p * std::exp(v);
            const double z = u1 * u1 * u2;
            const double r = gam * v - log4;
            const double s = p + r - w;
            if (s + 2.609437912434100 >= 5.0 * z) break;
            const double t = std::log(z);
            if (s >= t) break;
            if (r + sum * std::log(sum / (q + w)) >= t) break;
        }
    } else {
        // Cheng BC, q = max >= p = min with min <= 1
        const double pp = q, qq = p;  // BC is stated with p = max
        const double lam = 1.0 / qq;
        const double delta = 1.0 + pp - qq;
        const double k1 = delta * (0.0138889 + 0.0416667 * qq) / (pp * lam - 0.777778);
        const double k2 = 0.25 + (0.5 + 0.25 / delta) * qq;
        for (;;) {
            const double u1 = uniform();
            const double u2 = uniform();
            double v, z;
            if (u1 < 0.5) {
                const double y = u1 * u2;
                z = u1 * y;
                if (0.25 * u2 + z - y >= k1) continue;
            } else {
                z = u1 * u1 * u2;
                if (z <= 0.25) {
                    v = lam * std::log(u1 / (1.0 - u1));
                    w = (v > 700.0) ? pp * std::exp(700.0) : pp * std::exp(v);
                    break;
                }
                if (z >= k2) continue;
            }
            v = lam * std::log(u1 / (1.0 - u1));
            w = (v > 700.0) ? pp * std::exp(700.0) : pp * std::exp(v);
            if (sum * (std::log(sum / (qq + w)) + v) - log4 >= std::log(z)) break;
        }
        // map back: w is associated with max(a,b)
        return (a == q) ? w / (qq + w) : qq / (qq + w);
    }
    return (a == p) ? w / (q + w) : q / (q + w);
}

double zolotarev_log_a(double alpha, double u) {
    const double om = 1.0 - alpha;
    return (alpha / om) * std::log(std::sin(alpha * u)) + std::log(std::sin(om * u)) -
           (1.0 / om) * std::log(std::sin(u));
}

double RngStream::stable(double alpha) {
    StableIndex check(alpha);
    const double pi = 3.14159265358979323846;
    const double u = pi * uniform();
    const double e = exponential();
    const double log_a = zolotarev_log_a(alpha, u);
    return std::exp(((1.0 - alpha) / alpha) * (log_a - std::log(e)));
}

double RngStream::tilted_stable(double alpha, double zeta) {
    StableIndex check(alpha);
    if (zeta < 0.0) throw std::domain_error("tilted_stable requires zeta >= 0");
    if (zeta == 0.0) return stable(alpha);
    const int m = std::max(1, static_cast<int>(std::ceil(zeta)));
    const double b = zeta / m;                  // per-block tilt, b <= 1
    const double c = std::pow(b, 1.0 / alpha);  // per-block scale
    double sum = 0.0;
    for (int i = 0; i < m; ++i) {
        // accept proposal s ~ f_alpha with probability exp(-c s); rate exp(-b) >= exp(-1)
        for (;;) {
            const double s = stable(alpha);
            if (uniform() < std::exp(-c * s)) {
                sum += s;
                break;
            }
        }
    }
    return sum * std::pow(static_cast<double>(m), -1.0 / alpha);
}

std::uint64_t hash64(const char* data, std::size_t len) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (std::size_t i = 0; i < len; ++i) {
        h ^= static_cast<unsigned char>(data[i]);
        h *= 0x100000001b3ull;
    }
    return h;
}

std::uint64_t hash64_combine(std::uint64_t a, std::uint64_t b) {
    std::uint64_t z = a ^ (0x9E3779B97F4A7C15ull + (b << 6) + (b >> 2));
    return splitmix64(z);
}

ZetaSpec ZetaSpec::constant(double v) {
    if (!(v >= 0.0)) throw std::domain_error("Const zeta must be >= 0");
    ZetaSpec z;
    z.kind = Kind::Const;
    z.value = v;
    return z;
}

ZetaSpec ZetaSpec::gamma_shape(double a) {
    if (!(a > 0.0)) throw std::domain_error("GammaShape zeta needs shape > 0");
    ZetaSpec z;
    z.kind = Kind::GammaShape;
    z.value = a;
    return z;
}

ZetaSpec ZetaSpec::custom(std::function<double(RngStream&)> f) {
    ZetaSpec z;
    z.kind = Kind::Custom;
    z.sampler = std::move(f);
    return z;
}

double ZetaSpec::draw(RngStream& rng) const {
    switch (kind) {
        case Kind::Zero: return 0.0;
        case Kind::Const: return value;
        case Kind::GammaShape: return rng.gamma(value);
        case Kind::Custom: {
            const double v = sampler(rng);
            if (!(v >= 0.0)) throw std::domain_error("custom zeta sampler returned negative value");
            return v;
        }
    }
    throw std::logic_error("unreachable zeta kind");
}

}  // namespace pgsim
