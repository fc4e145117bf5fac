#include "core/bridges.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>

#include "json.hpp"

#include "core/mass_partition.hpp"

namespace pgsim {

namespace {

constexpr double kMassSlack = 1e-9;

void check_unit(double x, const char* what) {
    if (!(x >= 0.0 && x <= 1.0)) {
        throw std::invalid_argument(std::string(what) +
                                    " must lie in [0,1]");
    }
}

// First y in [0,1] with inner(y) >= v; +infinity when v exceeds inner(1).
// Values inside a jump interval (lo, hi] land on the atom itself, which is
// what folds outer atoms into the inner atom's image under composition.
double inner_preimage(const Bridge& inner, double v) {
    if (v <= 0.0) return 0.0;
    double cum = 0.0;
    for (const BridgeAtom& a : inner.atoms) {
        if (inner.dust > 0.0) {
            const double y = (v - cum) / inner.dust;
            if (y < a.location) return std::max(y, 0.0);
        }
        if (v <= inner.dust * a.location + cum + a.weight) return a.location;
        cum += a.weight;
    }
    if (inner.dust > 0.0) {
        const double y = (v - cum) / inner.dust;
        if (y <= 1.0) return std::max(y, 0.0);
    }
    return std::numeric_limits<double>::infinity();
}

}  // namespace

Bridge make_bridge(std::vector<BridgeAtom> atoms, double dust) {
    check_unit(dust, "bridge dust");
    double total = dust;
    for (const BridgeAtom& a : atoms) {
        check_unit(a.location, "atom location");
        if (!(a.weight >= 0.0)) {
            throw std::invalid_argument("atom weight must be >= 0");
        }
        total += a.weight;
    }
    if (total > 1.0 + kMassSlack) {
        throw std::invalid_argument("bridge mass exceeds 1");
    }
    std::sort(atoms.begin(), atoms.end(),
              [](const BridgeAtom& x, const BridgeAtom& y) {
                  return x.location < y.location;
              });
    Bridge b;
    b.dust = dust;
    b.atoms.reserve(atoms.size());
    for (const BridgeAtom& a : atoms) {
        if (a.weight == 0.0) continue;
        if (!b.atoms.empty() && b.atoms.back().location == a.location) {
            b.atoms.back().weight += a.weight;
        } else {
            b.atoms.push_back(a);
        }
    }
    return b;
}

Bridge to_bridge(const SimpleBridge& sb) {
    check_unit(sb.q, "simple bridge q");
    check_unit(sb.atom_location, "simple bridge atom");
    return make_bridge({{sb.atom_location, 1.0 - sb.q}}, sb.q);
}

double bridge_total_mass(const Bridge& b) {
    double total = b.dust;
    for (const BridgeAtom& a : b.atoms) total += a.weight;
    return total;
}

double bridge_largest_atom(const Bridge& b) {
    double best = 0.0;
    for (const BridgeAtom& a : b.atoms) best = std::max(best, a.weight);
    return best;
}

double bridge_eval(const Bridge& b, double y) {
    if (!(y >= 0.0 && y <= 1.0)) {
        throw std::invalid_argument("bridge_eval: y outside [0,1]");
    }
    double f = b.dust * y;
    for (const BridgeAtom& a : b.atoms) {
        if (a.location > y) break;
        f += a.weight;
    }
    return f;
}

double bridge_eval(const SimpleBridge& b, double y) {
    if (!(y >= 0.0 && y <= 1.0)) {
        throw std::invalid_argument("bridge_eval: y outside [0,1]");
    }
    return b.q * y + (b.atom_location <= y ? 1.0 - b.q : 0.0);
}

// Standard quantile convention: inf{v : F(v) >= r} for r > 0 and the left
// edge of the support at r = 0.  This agrees with the strict-inequality
// inverse except on the null set of attained flat levels, where the strict
// form would break quantile(eval(y)) <= y on dustless bridges.
double bridge_quantile(const Bridge& b, double r) {
    r = std::min(std::max(r, 0.0), 1.0);
    if (r <= 0.0) {
        if (b.dust > 0.0) return 0.0;
        return b.atoms.empty() ? 1.0 : b.atoms.front().location;
    }
    if (r > bridge_total_mass(b)) return 1.0;
    double cum = 0.0;
    for (const BridgeAtom& a : b.atoms) {
        const double before_jump = b.dust * a.location + cum;
        if (b.dust > 0.0 && r <= before_jump) return (r - cum) / b.dust;
        if (r <= before_jump + a.weight) return a.location;
        cum += a.weight;
    }
    return std::min((r - cum) / b.dust, 1.0);
}

double bridge_quantile(const SimpleBridge& b, double r) {
    r = std::min(std::max(r, 0.0), 1.0);
    if (r <= 0.0) return b.q > 0.0 ? 0.0 : b.atom_location;
    const double lo = b.q * b.atom_location;
    if (r < lo) return r / b.q;
    if (r <= lo + 1.0 - b.q) return b.atom_location;
    return std::min((r - (1.0 - b.q)) / b.q, 1.0);
}

Bridge compose(const Bridge& outer, const Bridge& inner) {
    std::vector<BridgeAtom> atoms;
    atoms.reserve(inner.atoms.size() + outer.atoms.size());
    if (outer.dust > 0.0) {
        for (const BridgeAtom& a : inner.atoms) {
            atoms.push_back({a.location, outer.dust * a.weight});
        }
    }
    for (const BridgeAtom& o : outer.atoms) {
        const double y = inner_preimage(inner, o.location);
        if (y <= 1.0) atoms.push_back({y, o.weight});
    }
    return make_bridge(std::move(atoms), outer.dust * inner.dust);
}

Bridge compose(const Bridge& outer, const SimpleBridge& inner) {
    return compose(outer, to_bridge(inner));
}

double bridge_first_pick(const Bridge& b, RngStream& rng) {
    const double r = rng.uniform();
    double cum = 0.0;
    for (const BridgeAtom& a : b.atoms) {
        cum += a.weight;
        if (r < cum) return a.weight;
    }
    return 0.0;
}

Bridge build_bridge(const StickKind& kind, double trunc, RngStream& rng,
                    std::size_t max_sticks) {
    const MassPartition mp =
        stick_stream_to_partition(kind, trunc, rng, max_sticks);
    std::vector<BridgeAtom> atoms;
    atoms.reserve(mp.weights.size());
    for (double w : mp.weights) atoms.push_back({rng.uniform(), w});
    return make_bridge(std::move(atoms), 0.0);
}

Bridge build_epg_bridge_given(double alpha, double zeta, double eps_alpha,
                              double trunc, RngStream& rng,
                              std::size_t max_sticks) {
    const MassPartition mp =
        epg_partition_given(alpha, zeta, eps_alpha, trunc, rng, max_sticks);
    std::vector<BridgeAtom> atoms;
    atoms.reserve(mp.weights.size());
    for (double w : mp.weights) atoms.push_back({rng.uniform(), w});
    return make_bridge(std::move(atoms), 0.0);
}

Bridge flow_bridge(double alpha, const ZetaSpec& zeta, std::size_t n,
                   RngStream& rng) {
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw std::invalid_argument("flow_bridge: alpha outside (0,1)");
    }
    if (n < 1) throw std::invalid_argument("flow_bridge: n >= 1 required");
    double z = zeta.draw(rng);
    Bridge acc;
    for (std::size_t k = 1; k <= n; ++k) {
        const double eps = rng.gamma((1.0 - alpha) / alpha);
        const SimpleBridge lam{z / (z + eps), rng.uniform()};
        acc = (k == 1) ? to_bridge(lam) : compose(to_bridge(lam), acc);
        z += eps + rng.exponential();
    }
    return acc;
}

Bridge posterior_bridge(double alpha, double theta,
                        const std::vector<long long>& block_sizes,
                        RngStream& rng) {
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw std::invalid_argument("posterior_bridge: alpha outside (0,1)");
    }
    if (!(theta > -alpha)) {
        throw std::invalid_argument("posterior_bridge: theta <= -alpha");
    }
    if (block_sizes.empty()) {
        throw std::invalid_argument("posterior_bridge: no blocks");
    }
    for (long long nj : block_sizes) {
        if (nj <= 0) {
            throw std::invalid_argument("posterior_bridge: block size < 1");
        }
    }
    const double k = static_cast<double>(block_sizes.size());
    const double g0 = rng.gamma(theta / alpha + k);
    double total = g0;
    std::vector<double> g(block_sizes.size());
    for (std::size_t j = 0; j < block_sizes.size(); ++j) {
        g[j] = rng.gamma((static_cast<double>(block_sizes[j]) - alpha) / alpha);
        total += g[j];
    }
    std::vector<BridgeAtom> atoms;
    atoms.reserve(g.size());
    for (double gj : g) atoms.push_back({rng.uniform(), gj / total});
    return make_bridge(std::move(atoms), g0 / total);
}

Bridge pitman_frag_bridge(double alpha, double theta, double delta,
                          double trunc, RngStream& rng,
                          std::size_t max_sticks) {
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw std::invalid_argument("pitman_frag_bridge: alpha outside (0,1)");
    }
    if (!(delta >= 0.0 && delta <= 1.0)) {
        throw std::invalid_argument("pitman_frag_bridge: delta outside [0,1]");
    }
    if (!(theta > -alpha * delta)) {
        throw std::invalid_argument(
            "pitman_frag_bridge: theta <= -alpha*delta");
    }
    if (!(trunc > 0.0 && trunc < 1.0)) {
        throw std::invalid_argument("pitman_frag_bridge: trunc outside (0,1)");
    }
    const MassPartition outer = stick_stream_to_partition(
        StickKind::pd(alpha * delta, theta), 0.5 * trunc, rng, max_sticks);
    std::vector<BridgeAtom> atoms;
    for (double m : outer.weights) {
        if (delta == 1.0) {
            atoms.push_back({rng.uniform(), m});
            continue;
        }
        const MassPartition inner = stick_stream_to_partition(
            StickKind::pd(alpha, -alpha * delta), 0.5 * trunc, rng,
            max_sticks);
        for (double p : inner.weights) {
            atoms.push_back({rng.uniform(), m * p});
        }
    }
    return make_bridge(std::move(atoms), 0.0);
}

NtrPath ntr_fragmenter(double alpha, const ZetaSpec& zeta, double horizon,
                       RngStream& rng) {
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw std::invalid_argument("ntr_fragmenter: alpha outside (0,1)");
    }
    if (!(horizon > 0.0)) {
        throw std::invalid_argument("ntr_fragmenter: horizon must be > 0");
    }
    NtrPath path;
    path.zeta = zeta.draw(rng);
    double z = path.zeta;
    double t = 0.0;
    double level = 1.0;
    for (;;) {
        t += rng.exponential();
        if (t > horizon) break;
        const double z_next = z + rng.exponential();
        level *= std::pow(z / z_next, 1.0 / alpha);
        z = z_next;
        path.times.push_back(t);
        path.levels.push_back(level);
    }
    return path;
}

std::string bridge_json(const Bridge& b) {
    nlohmann::json j;
    j["atoms"] = nlohmann::json::array();
    for (const BridgeAtom& a : b.atoms) {
        j["atoms"].push_back({a.location, a.weight});
    }
    j["dust"] = b.dust;
    return j.dump();
}

Bridge bridge_from_json(const std::string& text) {
    const nlohmann::json j = nlohmann::json::parse(text);
    if (!j.is_object() || !j.contains("atoms") || !j.contains("dust")) {
        throw std::invalid_argument("bridge_from_json: need atoms and dust");
    }
    std::vector<BridgeAtom> atoms;
    for (const auto& pair : j.at("atoms")) {
        if (!pair.is_array() || pair.size() != 2) {
            throw std::invalid_argument("bridge_from_json: atom not a pair");
        }
        atoms.push_back({pair.at(0).get<double>(), pair.at(1).get<double>()});
    }
    return make_bridge(std::move(atoms), j.at("dust").get<double>());
}

}  // namespace pgsim
