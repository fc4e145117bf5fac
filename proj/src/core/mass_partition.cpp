#include "core/mass_partition.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <stdexcept>

#include "core/rng.hpp"

namespace pgsim {

namespace {

constexpr double kMassSlack = 1e-9;

std::string format_double(double x) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

}  // namespace

MassPartition rank(std::vector<double> weights, double dust, bool fold_dust) {
    if (dust < 0.0) {
        throw std::invalid_argument("rank: negative dust");
    }
    double total = dust;
    for (double w : weights) {
        if (w < 0.0) {
            throw std::invalid_argument("rank: negative weight");
        }
        total += w;
    }
    if (total > 1.0 + kMassSlack) {
        throw std::invalid_argument("rank: total mass exceeds 1");
    }
    if (fold_dust && dust > 0.0) {
        weights.push_back(dust);
        dust = 0.0;
    }
    weights.erase(std::remove(weights.begin(), weights.end(), 0.0),
                  weights.end());
    std::sort(weights.begin(), weights.end(), std::greater<double>());
    MassPartition mp;
    mp.weights = std::move(weights);
    mp.dust = dust;
    // Record the actual deficit so the type invariant holds for any input.
    mp.eps_trunc = std::max(1e-10, 1.0 - total);
    return mp;
}

SizeBiasedSequence size_biased_prefix(const MassPartition& mp, RngStream& rng,
                                      std::size_t count) {
    if (mp.dust > mp.eps_trunc + 1e-15) {
        throw std::invalid_argument(
            "size_biased_permutation: dust exceeds truncation budget");
    }
    std::vector<double> pool = mp.weights;
    double remaining =
        std::accumulate(pool.begin(), pool.end(), 0.0);
    SizeBiasedSequence out;
    count = std::min(count, pool.size());
    out.picks.reserve(count);
    double picked_mass = 0.0;
    for (std::size_t step = 0; step < count; ++step) {
        // Kill accumulated subtraction drift periodically.
        if ((step & 1023u) == 1023u) {
            remaining = std::accumulate(pool.begin(), pool.end(), 0.0);
        }
        const double target = rng.uniform() * remaining;
        double cum = 0.0;
        std::size_t idx = pool.size() - 1;
        for (std::size_t j = 0; j < pool.size(); ++j) {
            cum += pool[j];
            if (target < cum) {
                idx = j;
                break;
            }
        }
        const double w = pool[idx];
        out.picks.push_back(w);
        picked_mass += w;
        pool[idx] = pool.back();
        pool.pop_back();
        remaining -= w;
    }
    out.residual = std::max(0.0, 1.0 - picked_mass);
    return out;
}

SizeBiasedSequence size_biased_permutation(const MassPartition& mp,
                                           RngStream& rng) {
    return size_biased_prefix(mp, rng, mp.weights.size());
}

double alpha_diversity_estimate(std::size_t block_count, std::size_t n,
                                double alpha) {
    if (block_count < 1 || block_count > n) {
        throw std::invalid_argument(
            "alpha_diversity_estimate: need 1 <= block_count <= n");
    }
    if (!(alpha > 0.0) || !(alpha < 1.0)) {
        throw std::invalid_argument(
            "alpha_diversity_estimate: alpha outside (0,1)");
    }
    return static_cast<double>(block_count) /
           std::pow(static_cast<double>(n), alpha);
}

std::string mass_partition_csv_row(const MassPartition& mp) {
    std::string row;
    for (double w : mp.weights) {
        row += format_double(w);
        row += ',';
    }
    row += format_double(mp.dust);
    return row;
}

std::string mass_partition_json(const MassPartition& mp) {
    std::string out = "[";
    for (double w : mp.weights) {
        out += format_double(w);
        out += ',';
    }
    out += format_double(mp.dust);
    out += ']';
    return out;
}

}  // namespace pgsim
