#include "core/partitions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

#include "core/special.hpp"

namespace pgsim {

namespace {

void canonicalize(SetPartition& p) {
    for (auto& block : p.blocks) std::sort(block.begin(), block.end());
    std::sort(p.blocks.begin(), p.blocks.end(),
              [](const std::vector<int>& a, const std::vector<int>& b) {
                  return a.front() < b.front();
              });
}

SetPartition crp_partition(double alpha, double theta, int n,
                           RngStream& rng) {
    std::vector<std::vector<int>> blocks;
    blocks.push_back({1});
    for (int i = 2; i <= n; ++i) {
        const double total = theta + static_cast<double>(i - 1);
        double r = rng.uniform() * total;
        const double fresh =
            theta + static_cast<double>(blocks.size()) * alpha;
        if (r < fresh) {
            blocks.push_back({i});
            continue;
        }
        r -= fresh;
        bool seated = false;
        for (auto& block : blocks) {
            const double w = static_cast<double>(block.size()) - alpha;
            if (r < w) {
                block.push_back(i);
                seated = true;
                break;
            }
            r -= w;
        }
        if (!seated) blocks.back().push_back(i);  // rounding at the edge
    }
    SetPartition p{n, std::move(blocks)};
    canonicalize(p);
    return p;
}

// Seats customers on sticks instantiated on demand. Joining an existing
// stick uses its mass; the residual always opens exactly the next stick,
// because stick order is discovery order for size-biased masses. flags
// records the EPG coagulation indicator drawn when each stick is created.
SetPartition lazy_stick_partition(const StickKind& kind, int n,
                                  RngStream& rng,
                                  std::vector<char>* flags_out) {
    StickState state = make_stick_state(kind, rng);
    double q = 1.0;
    if (kind.family == StickKind::Family::EPG) {
        const double z = state.zeta_k - state.eps_alpha;
        q = state.zeta_k > 0.0 ? z / state.zeta_k : 0.0;
    }
    std::vector<double> cum;
    std::vector<std::vector<int>> blocks;
    std::vector<char> flags;
    for (int i = 1; i <= n; ++i) {
        const double u = rng.uniform();
        if (!cum.empty() && u < cum.back()) {
            const std::size_t j = static_cast<std::size_t>(
                std::upper_bound(cum.begin(), cum.end(), u) - cum.begin());
            blocks[j].push_back(i);
            continue;
        }
        const double before = state.product;
        const double w = next_stick(state, kind, rng);
        const double pick = (1.0 - w) * before;
        cum.push_back(cum.empty() ? pick : cum.back() + pick);
        blocks.push_back({i});
        flags.push_back(kind.family == StickKind::Family::EPG &&
                                rng.uniform() < 1.0 - q
                            ? 1
                            : 0);
    }
    if (flags_out) *flags_out = std::move(flags);
    SetPartition p{n, std::move(blocks)};
    canonicalize(p);
    return p;
}

// Merges the flagged blocks into one; an empty or singleton flag set leaves
// the block count unchanged.
SetPartition merge_flagged(const SetPartition& p,
                           const std::vector<char>& flagged) {
    std::vector<std::vector<int>> blocks;
    std::vector<int> merged;
    for (std::size_t j = 0; j < p.blocks.size(); ++j) {
        if (flagged[j]) {
            merged.insert(merged.end(), p.blocks[j].begin(),
                          p.blocks[j].end());
        } else {
            blocks.push_back(p.blocks[j]);
        }
    }
    if (!merged.empty()) blocks.push_back(std::move(merged));
    SetPartition out{p.n, std::move(blocks)};
    canonicalize(out);
    return out;
}

double log_choose(int b, int j) {
    return log_gamma(b + 1.0) - log_gamma(j + 1.0) - log_gamma(b - j + 1.0);
}

}  // namespace

SetPartition make_set_partition(int n, std::vector<std::vector<int>> blocks) {
    if (n < 1) throw std::invalid_argument("make_set_partition: n < 1");
    std::vector<char> seen(static_cast<std::size_t>(n) + 1, 0);
    std::size_t covered = 0;
    for (const auto& block : blocks) {
        if (block.empty()) {
            throw std::invalid_argument("make_set_partition: empty block");
        }
        for (int e : block) {
            if (e < 1 || e > n) {
                throw std::invalid_argument(
                    "make_set_partition: element out of range");
            }
            if (seen[static_cast<std::size_t>(e)]) {
                throw std::invalid_argument(
                    "make_set_partition: duplicate element");
            }
            seen[static_cast<std::size_t>(e)] = 1;
            ++covered;
        }
    }
    if (covered != static_cast<std::size_t>(n)) {
        throw std::invalid_argument("make_set_partition: missing elements");
    }
    SetPartition p{n, std::move(blocks)};
    canonicalize(p);
    return p;
}

bool set_partition_valid(const SetPartition& p) {
    if (p.n < 1) return false;
    std::vector<char> seen(static_cast<std::size_t>(p.n) + 1, 0);
    std::size_t covered = 0;
    for (const auto& block : p.blocks) {
        if (block.empty()) return false;
        for (int e : block) {
            if (e < 1 || e > p.n) return false;
            if (seen[static_cast<std::size_t>(e)]) return false;
            seen[static_cast<std::size_t>(e)] = 1;
            ++covered;
        }
    }
    return covered == static_cast<std::size_t>(p.n);
}

std::string rgs_key(const SetPartition& p) {
    std::vector<int> id(static_cast<std::size_t>(p.n) + 1, -1);
    for (std::size_t j = 0; j < p.blocks.size(); ++j) {
        for (int e : p.blocks[j]) id[static_cast<std::size_t>(e)] =
            static_cast<int>(j);
    }
    std::ostringstream out;
    for (int e = 1; e <= p.n; ++e) {
        if (e > 1) out << ',';
        out << id[static_cast<std::size_t>(e)];
    }
    return out.str();
}

std::string set_partition_json(const SetPartition& p) {
    return nlohmann::json(p.blocks).dump();
}

std::string set_partition_csv_row(const SetPartition& p) {
    std::ostringstream out;
    out << p.n << ',' << p.blocks.size();
    for (const auto& block : p.blocks) out << ',' << block.size();
    return out.str();
}

SetPartition sample_partition(const StickKind& kind, int n, RngStream& rng) {
    if (n < 1) throw std::invalid_argument("sample_partition: n < 1");
    if (kind.family == StickKind::Family::PD) {
        return crp_partition(kind.alpha, kind.theta, n, rng);
    }
    std::vector<char> flags;
    SetPartition p = lazy_stick_partition(kind, n, rng, &flags);
    if (kind.family == StickKind::Family::PG) return p;
    // flags are in stick-creation order, which is least-element order and
    // therefore already matches the canonical block order.
    return merge_flagged(p, flags);
}

std::pair<SetPartition, MergeOutcome> epg_coag_partition(double alpha,
                                                         const ZetaSpec& zeta,
                                                         int n,
                                                         RngStream& rng) {
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw std::invalid_argument("epg_coag_partition: alpha outside (0,1)");
    }
    if (n < 1) throw std::invalid_argument("epg_coag_partition: n < 1");
    const double z = zeta.draw(rng);
    const double eps = rng.gamma((1.0 - alpha) / alpha);
    const SetPartition base = sample_partition(
        StickKind::pg(alpha, ZetaSpec::constant(z + eps)), n, rng);
    const double q = z / (z + eps);
    const double u1 = rng.uniform();
    std::vector<char> flagged(base.blocks.size(), 0);
    int count = 0;
    for (std::size_t j = 0; j < base.blocks.size(); ++j) {
        const double mark = rng.uniform();
        if (mark > q * u1 && mark <= q * u1 + (1.0 - q)) {
            flagged[j] = 1;
            ++count;
        }
    }
    MergeOutcome outcome;
    outcome.input_blocks = static_cast<int>(base.blocks.size());
    outcome.merged_count = count;
    outcome.output = merge_flagged(base, flagged);
    return {base, outcome};
}

std::vector<double> merge_size_pmf(double alpha, double theta, int b) {
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw std::invalid_argument("merge_size_pmf: alpha outside (0,1)");
    }
    if (!(theta > -alpha)) {
        throw std::invalid_argument("merge_size_pmf: theta <= -alpha");
    }
    if (b < 0) throw std::invalid_argument("merge_size_pmf: b < 0");
    const double aq = (theta + alpha) / alpha;
    const double ap = (1.0 - alpha) / alpha;
    const double norm = log_beta(aq, ap);
    std::vector<double> pmf(static_cast<std::size_t>(b) + 1);
    for (int j = 0; j <= b; ++j) {
        pmf[static_cast<std::size_t>(j)] = std::exp(
            log_choose(b, j) + log_beta(aq + (b - j), ap + j) - norm);
    }
    return pmf;
}

BetaSplitReport beta_splitting_check(double alpha, int b) {
    if (b < 2) throw std::invalid_argument("beta_splitting_check: b < 2");
    const std::vector<double> full = merge_size_pmf(alpha, 1.0 - 2.0 * alpha, b);
    const double beta = (1.0 - alpha) / alpha - 1.0;
    BetaSplitReport report;
    report.merge_pmf.assign(full.begin() + 1, full.end() - 1);
    // the kernel is normalized in log space so large beta cannot underflow
    std::vector<double> log_split(static_cast<std::size_t>(b) - 1);
    double peak = -std::numeric_limits<double>::infinity();
    for (int j = 1; j <= b - 1; ++j) {
        log_split[static_cast<std::size_t>(j - 1)] =
            log_choose(b, j) + log_beta(beta + 1.0 + j, beta + 1.0 + b - j);
        peak = std::max(peak, log_split[static_cast<std::size_t>(j - 1)]);
    }
    report.split_pmf.resize(log_split.size());
    for (std::size_t j = 0; j < log_split.size(); ++j) {
        report.split_pmf[j] = std::exp(log_split[j] - peak);
    }
    for (auto* pmf : {&report.merge_pmf, &report.split_pmf}) {
        double total = 0.0;
        for (double v : *pmf) total += v;
        for (double& v : *pmf) v /= total;
    }
    for (std::size_t j = 0; j < report.merge_pmf.size(); ++j) {
        const double dev =
            std::fabs(report.merge_pmf[j] - report.split_pmf[j]) /
            report.split_pmf[j];
        report.max_rel_dev = std::max(report.max_rel_dev, dev);
    }
    return report;
}

MassPartition coag_mass(const MassPartition& mp, const SimpleBridge& simple,
                        RngStream& rng) {
    if (!(simple.q >= 0.0 && simple.q <= 1.0)) {
        throw std::invalid_argument("coag_mass: q outside [0,1]");
    }
    if (mp.dust > 1e-2) {
        throw std::invalid_argument("coag_mass: dust exceeds tolerance");
    }
    std::vector<double> kept;
    kept.reserve(mp.weights.size() + 1);
    double merged = 0.0;
    for (double w : mp.weights) {
        if (rng.uniform() < 1.0 - simple.q) {
            merged += w;
        } else {
            kept.push_back(w);
        }
    }
    if (merged > 0.0) kept.push_back(merged);
    MassPartition out = rank(std::move(kept), mp.dust);
    out.eps_trunc = mp.eps_trunc;
    return out;
}

std::size_t size_biased_index(const MassPartition& mp, RngStream& rng) {
    double total = 0.0;
    for (double w : mp.weights) total += w;
    if (!(total > 0.0)) {
        throw std::invalid_argument("size_biased_index: no mass");
    }
    const double u = rng.uniform() * total;
    double cum = 0.0;
    for (std::size_t j = 0; j < mp.weights.size(); ++j) {
        cum += mp.weights[j];
        if (u < cum) return j;
    }
    return mp.weights.size() - 1;
}

MassPartition frag_mass(const MassPartition& mp, std::size_t pick_index,
                        const MassPartition& fragmenting) {
    if (pick_index >= mp.weights.size()) {
        throw std::invalid_argument("frag_mass: pick_index out of range");
    }
    if (fragmenting.dust > 1e-2) {
        throw std::invalid_argument("frag_mass: fragmenting dust too large");
    }
    const double m = mp.weights[pick_index];
    std::vector<double> weights;
    weights.reserve(mp.weights.size() + fragmenting.weights.size());
    for (std::size_t j = 0; j < mp.weights.size(); ++j) {
        if (j != pick_index) weights.push_back(mp.weights[j]);
    }
    for (double f : fragmenting.weights) weights.push_back(m * f);
    MassPartition out = rank(std::move(weights), mp.dust + m * fragmenting.dust);
    out.eps_trunc = mp.eps_trunc + fragmenting.eps_trunc;
    return out;
}

SetPartition discrete_base_project(const SetPartition& p,
                                   const std::vector<int>& labels) {
    if (labels.size() != p.blocks.size()) {
        throw std::invalid_argument(
            "discrete_base_project: one label per block required");
    }
    std::map<int, std::vector<int>> by_atom;
    for (std::size_t j = 0; j < p.blocks.size(); ++j) {
        auto& merged = by_atom[labels[j]];
        merged.insert(merged.end(), p.blocks[j].begin(), p.blocks[j].end());
    }
    SetPartition out;
    out.n = p.n;
    for (auto& [atom, block] : by_atom) out.blocks.push_back(std::move(block));
    canonicalize(out);
    return out;
}

}  // namespace pgsim
