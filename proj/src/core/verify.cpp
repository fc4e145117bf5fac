#include "core/verify.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <mutex>
#include <stdexcept>
#include <thread>
#include <utility>

#include "core/special.hpp"
#include "core/sticks.hpp"

namespace pgsim {

namespace {

enum class Id {
    PyProp21,
    Keydd,
    Keydd2,
    PpyFundid,
    JamesFundid,
    GammaId,
    BiasCase1,
    RecursiveEpgPg,
    RkJump,
    PAlpha2,
};

struct RegistryEntry {
    Id id;
    const char* name;
    bool uses_theta;
    bool uses_zeta;
};

// Canonical order; aliases resolve below.
const RegistryEntry kRegistry[] = {
    {Id::PyProp21, "PY-prop21-gamma-total-mass", true, false},
    {Id::Keydd, "keydd", false, true},
    {Id::Keydd2, "keydd2", false, true},
    {Id::PpyFundid, "PPY-fundid", true, false},
    {Id::JamesFundid, "James-fundid", true, false},
    {Id::GammaId, "gammaid", true, false},
    {Id::BiasCase1, "biascase1", true, false},
    {Id::RecursiveEpgPg, "recursive-EPG-PG", false, true},
    {Id::RkJump, "Rk-jump-correspondence", false, false},
    {Id::PAlpha2, "P-alpha2-uniform-mixture", false, false},
};

const RegistryEntry& lookup(const std::string& id) {
    std::string name = id;
    if (name == "PY-prop21") name = "PY-prop21-gamma-total-mass";
    for (const RegistryEntry& e : kRegistry) {
        if (name == e.name) return e;
    }
    throw std::invalid_argument("unknown identity id: " + id);
}

// Evaluation point for the bridge-valued mixture identity.
constexpr double kMixQ = 0.35;

// Stick cap for the ranked-ratio sampler; the stopping time has all moments
// finite, so the cap is hit with negligible probability.
constexpr std::size_t kRankedStickCap = 1000000;

// Total mass of the tilted subordinator run for time s.
double tilted_total(RngStream& rng, double a, double s) {
    if (s <= 0.0) return 0.0;
    return std::pow(s, 1.0 / a) * rng.tilted_stable(a, s);
}

// Power-tilted stable S_{a,delta}, delta >= 0: the total-mass law whose
// polynomially tilted density carries index delta.
double sample_size_biased_total(RngStream& rng, double a, double delta) {
    if (delta == 0.0) return rng.stable(a);
    return rng.tilted_stable(a, rng.gamma(delta / a));
}

// PD(a,theta) bridge evaluated at the fixed point q in (0,1): atom
// locations are iid uniform, so the mass left of q is the subordinator
// increment over a time fraction q, independent of the rest.
double bridge_at_point(RngStream& rng, double a, double theta, double q) {
    const double z = rng.gamma(theta / a);
    const double left = tilted_total(rng, a, z * q);
    const double right = tilted_total(rng, a, z * (1.0 - q));
    return left / (left + right);
}

// P2/P1 of a PD(a,0) mass partition. Size-biased sticks W_k ~
// Beta(k a, 1-a) are generated until the residual mass drops below the
// second-largest atom seen, after which no later atom can alter the top
// two, so the ratio is exact.
double ranked_ratio_pd0(RngStream& rng, double a) {
    double residual = 1.0;
    double top1 = 0.0;
    double top2 = 0.0;
    for (std::size_t k = 1; residual >= top2 && k <= kRankedStickCap; ++k) {
        const double w = rng.beta(static_cast<double>(k) * a, 1.0 - a);
        const double atom = residual * (1.0 - w);
        residual *= w;
        if (atom > top1) {
            top2 = top1;
            top1 = atom;
        } else if (atom > top2) {
            top2 = atom;
        }
    }
    return top2 / top1;
}

bool zeta_positive_as(const ZetaSpec& zeta) {
    switch (zeta.kind) {
        case ZetaSpec::Kind::Zero: return false;
        case ZetaSpec::Kind::Const: return zeta.value > 0.0;
        case ZetaSpec::Kind::GammaShape: return true;
        case ZetaSpec::Kind::Custom: return true;  // caller's responsibility
    }
    return false;
}

void sample_pair(const RegistryEntry& entry, double alpha,
                 const IdentityParams& p, RngStream& rng, double& lhs,
                 double& rhs) {
    const double ar = p.rhs_alpha.value_or(alpha);
    const double tr = p.rhs_theta.value_or(p.theta);
    const ZetaSpec& zr = p.rhs_zeta ? *p.rhs_zeta : p.zeta;
    switch (entry.id) {
        case Id::PyProp21: {
            // zeta^{1/a} tilted(a, zeta) with zeta ~ Gamma(theta/a) against
            // a plain Gamma(theta) total mass.
            lhs = tilted_total(rng, alpha, rng.gamma(p.theta / alpha));
            rhs = rng.gamma(tr);
            return;
        }
        case Id::Keydd: {
            // zeta^{1/a} e / tau_a(zeta), with the zeta^{1/a} factors
            // cancelled, against (e'+zeta)^{1/a} - zeta^{1/a}.
            const double z = p.zeta.draw(rng);
            lhs = rng.exponential() / rng.tilted_stable(alpha, z);
            const double z2 = zr.draw(rng);
            rhs = std::pow(rng.exponential() + z2, 1.0 / ar) -
                  std::pow(z2, 1.0 / ar);
            return;
        }
        case Id::Keydd2: {
            // e / tau_a(zeta) against ((e'+zeta)/zeta)^{1/a} - 1.
            const double z = p.zeta.draw(rng);
            lhs = rng.exponential() / tilted_total(rng, alpha, z);
            const double z2 = zr.draw(rng);
            rhs = std::pow((rng.exponential() + z2) / z2, 1.0 / ar) - 1.0;
            return;
        }
        case Id::PpyFundid: {
            // S_{a,theta} against S_{a,theta+a} / Beta(theta+a, 1-a).
            lhs = sample_size_biased_total(rng, alpha, p.theta);
            rhs = sample_size_biased_total(rng, ar, tr + ar) /
                  rng.beta(tr + ar, 1.0 - ar);
            return;
        }
        case Id::JamesFundid: {
            // S_{a,theta} against S_{a,theta+1} Beta((theta+a)/a,
            // (1-a)/a)^{-1/a}.
            lhs = sample_size_biased_total(rng, alpha, p.theta);
            rhs = sample_size_biased_total(rng, ar, tr + 1.0) *
                  std::pow(rng.beta((tr + ar) / ar, (1.0 - ar) / ar),
                           -1.0 / ar);
            return;
        }
        case Id::GammaId: {
            // Gamma((theta+a)/a)^{1/a} against Gamma(theta+a) / S_{a,theta+a}.
            lhs = std::pow(rng.gamma((p.theta + alpha) / alpha), 1.0 / alpha);
            rhs = rng.gamma(tr + ar) / sample_size_biased_total(rng, ar, tr + ar);
            return;
        }
        case Id::BiasCase1: {
            // e / S_{a,theta} against Beta(theta+a,1-a) e' / S_{a,theta+a}.
            lhs = rng.exponential() / sample_size_biased_total(rng, alpha, p.theta);
            rhs = rng.beta(tr + ar, 1.0 - ar) * rng.exponential() /
                  sample_size_biased_total(rng, ar, tr + ar);
            return;
        }
        case Id::RecursiveEpgPg: {
            // First size-biased pick on both sides: for the extended family
            // at tilt e + zeta it is Gamma(1-a) / (Gamma(1-a) + tau_a(e+zeta));
            // for the tilted family at zeta it is 1 - W_1 from the stick
            // stream.
            const double g = rng.gamma(1.0 - alpha);
            const double z = rng.exponential() + p.zeta.draw(rng);
            lhs = g / (g + tilted_total(rng, alpha, z));
            const StickKind kind = StickKind::pg(ar, zr);
            StickState st = make_stick_state(kind, rng);
            rhs = 1.0 - next_stick(st, kind, rng);
            return;
        }
        case Id::RkJump: {
            // Ratio of the two largest PD(a,0) masses against
            // (zeta_0/zeta_1)^{1/a} with zeta_0 ~ Gamma(1),
            // zeta_1 = zeta_0 + e.
            lhs = ranked_ratio_pd0(rng, alpha);
            const double z = rng.exponential();
            rhs = std::pow(z / (z + rng.exponential()), 1.0 / ar);
            return;
        }
        case Id::PAlpha2: {
            // Bridge value at q: theta = 2 on the left, a uniform mixture of
            // two independent theta = 1 bridge values on the right.
            lhs = bridge_at_point(rng, alpha, 2.0, kMixQ);
            const double component_theta = p.rhs_theta.value_or(1.0);
            const double u = rng.uniform();
            rhs = u * bridge_at_point(rng, ar, component_theta, kMixQ) +
                  (1.0 - u) * bridge_at_point(rng, ar, component_theta, kMixQ);
            return;
        }
    }
    throw std::logic_error("sample_pair: unhandled identity");
}

std::string json_escape(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        if (c == '"' || c == '\\') out.push_back('\\');
        out.push_back(c);
    }
    return out;
}

std::string describe(double alpha, const IdentityParams& p) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "alpha=%g theta=%g zeta=%s", alpha, p.theta,
                  zeta_spec_label(p.zeta).c_str());
    std::string notes = buf;
    if (p.rhs_alpha) {
        std::snprintf(buf, sizeof buf, " rhs_alpha=%g", *p.rhs_alpha);
        notes += buf;
    }
    if (p.rhs_theta) {
        std::snprintf(buf, sizeof buf, " rhs_theta=%g", *p.rhs_theta);
        notes += buf;
    }
    if (p.rhs_zeta) {
        notes += " rhs_zeta=" + zeta_spec_label(*p.rhs_zeta);
    }
    return notes;
}

std::uint64_t stream_for(const std::string& cid, double alpha,
                         const IdentityParams& p) {
    const std::string label = cid + "|" + describe(alpha, p);
    return hash64(label.data(), label.size());
}

}  // namespace

void set_verdict(TestReport& report, double significance) {
    report.verdict = report.p_value > significance ? "pass" : "fail";
}

std::string test_report_json(const TestReport& report) {
    char num[512];
    std::snprintf(num, sizeof num,
                  "\"statistic\":%.17g,\"p_value\":%.17g,\"n_samples\":%zu,"
                  "\"seed\":%llu",
                  report.statistic, report.p_value, report.n_samples,
                  static_cast<unsigned long long>(report.seed));
    return "{\"identity_id\":\"" + json_escape(report.identity_id) + "\"," +
           num + ",\"verdict\":\"" + report.verdict + "\",\"notes\":\"" +
           json_escape(report.notes) + "\"}";
}

std::string test_reports_json(const std::vector<TestReport>& reports) {
    std::string out = "[";
    for (std::size_t i = 0; i < reports.size(); ++i) {
        out += i == 0 ? "\n  " : ",\n  ";
        out += test_report_json(reports[i]);
    }
    out += reports.empty() ? "]" : "\n]";
    return out;
}

TestReport ks_two_sample(const std::vector<double>& xs,
                         const std::vector<double>& ys) {
    if (xs.empty() || ys.empty()) {
        throw std::invalid_argument("ks_two_sample: empty sample");
    }
    std::vector<double> a = xs;
    std::vector<double> b = ys;
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const std::size_t n = a.size();
    const std::size_t m = b.size();
    std::size_t i = 0;
    std::size_t j = 0;
    double d = 0.0;
    while (i < n && j < m) {
        const double v = std::min(a[i], b[j]);
        while (i < n && a[i] <= v) ++i;
        while (j < m && b[j] <= v) ++j;
        d = std::max(d, std::fabs(static_cast<double>(i) / n -
                                  static_cast<double>(j) / m));
    }
    const double ne = static_cast<double>(n) * static_cast<double>(m) /
                      static_cast<double>(n + m);
    TestReport report;
    report.statistic = d;
    report.p_value = kolmogorov_q(std::sqrt(ne) * d);
    report.n_samples = n + m;
    char buf[96];
    std::snprintf(buf, sizeof buf, "two-sample KS, n=%zu, m=%zu", n, m);
    report.notes = buf;
    set_verdict(report);
    return report;
}

TestReport chi_square_pmf(const std::vector<std::int64_t>& observed,
                          const std::vector<double>& pmf) {
    if (observed.empty() || observed.size() != pmf.size()) {
        throw std::invalid_argument("chi_square_pmf: size mismatch");
    }
    double total_p = 0.0;
    for (double p : pmf) {
        if (!(p >= 0.0)) {
            throw std::invalid_argument("chi_square_pmf: negative pmf entry");
        }
        total_p += p;
    }
    if (std::fabs(total_p - 1.0) > 1e-9) {
        throw std::invalid_argument("chi_square_pmf: pmf does not sum to 1");
    }
    double total_n = 0.0;
    for (std::int64_t c : observed) {
        if (c < 0) {
            throw std::invalid_argument("chi_square_pmf: negative count");
        }
        total_n += static_cast<double>(c);
    }

    // Pool forward until each cell expects >= 5; the tail remainder joins
    // the last pooled cell.
    std::vector<double> obs_cells;
    std::vector<double> exp_cells;
    double acc_obs = 0.0;
    double acc_exp = 0.0;
    for (std::size_t i = 0; i < pmf.size(); ++i) {
        acc_obs += static_cast<double>(observed[i]);
        acc_exp += total_n * pmf[i];
        if (acc_exp >= 5.0) {
            obs_cells.push_back(acc_obs);
            exp_cells.push_back(acc_exp);
            acc_obs = 0.0;
            acc_exp = 0.0;
        }
    }
    if (acc_exp > 0.0 && !exp_cells.empty()) {
        obs_cells.back() += acc_obs;
        exp_cells.back() += acc_exp;
    }

    TestReport report;
    report.n_samples = static_cast<std::size_t>(total_n);
    const int dof = static_cast<int>(obs_cells.size()) - 1;
    if (dof < 1) {
        report.statistic = 0.0;
        report.p_value = 1.0;
        report.notes = "chi-square: fewer than two pooled cells";
        set_verdict(report);
        return report;
    }
    double stat = 0.0;
    for (std::size_t i = 0; i < obs_cells.size(); ++i) {
        const double diff = obs_cells[i] - exp_cells[i];
        stat += diff * diff / exp_cells[i];
    }
    report.statistic = stat;
    report.p_value = chi2_sf(stat, dof);
    char buf[96];
    std::snprintf(buf, sizeof buf, "chi-square, %zu pooled cells, dof=%d",
                  obs_cells.size(), dof);
    report.notes = buf;
    set_verdict(report);
    return report;
}

const std::vector<std::string>& registered_identities() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> out;
        for (const RegistryEntry& e : kRegistry) out.push_back(e.name);
        return out;
    }();
    return names;
}

std::string canonical_identity(const std::string& id) {
    return lookup(id).name;
}

bool identity_uses_theta(const std::string& id) {
    return lookup(id).uses_theta;
}

bool identity_uses_zeta(const std::string& id) {
    return lookup(id).uses_zeta;
}

bool identity_in_domain(const std::string& id, double alpha,
                        const IdentityParams& params) {
    const RegistryEntry& entry = lookup(id);
    if (!(alpha > 0.0 && alpha < 1.0)) return false;
    if (params.rhs_alpha &&
        !(*params.rhs_alpha > 0.0 && *params.rhs_alpha < 1.0)) {
        return false;
    }
    const double tr = params.rhs_theta.value_or(params.theta);
    const ZetaSpec& zr = params.rhs_zeta ? *params.rhs_zeta : params.zeta;
    switch (entry.id) {
        case Id::PyProp21:
            return params.theta > 0.0 && tr > 0.0;
        case Id::PpyFundid:
        case Id::JamesFundid:
        case Id::GammaId:
        case Id::BiasCase1:
            return params.theta >= 0.0 && tr >= 0.0;
        case Id::Keydd2:
            return zeta_positive_as(params.zeta) && zeta_positive_as(zr);
        case Id::Keydd:
        case Id::RecursiveEpgPg:
        case Id::RkJump:
        case Id::PAlpha2:
            return true;
    }
    return false;
}

TestReport run_identity(const std::string& id, double alpha,
                        const IdentityParams& params, std::size_t n_samples,
                        RngStream& rng, std::uint64_t seed_label) {
    const RegistryEntry& entry = lookup(id);
    if (n_samples == 0) {
        throw std::invalid_argument("run_identity: n_samples must be positive");
    }
    if (!identity_in_domain(id, alpha, params)) {
        throw std::domain_error(std::string("run_identity: parameters outside "
                                            "the domain of ") +
                                entry.name);
    }
    std::vector<double> lhs(n_samples);
    std::vector<double> rhs(n_samples);
    for (std::size_t i = 0; i < n_samples; ++i) {
        sample_pair(entry, alpha, params, rng, lhs[i], rhs[i]);
    }
    TestReport report = ks_two_sample(lhs, rhs);
    report.identity_id = entry.name;
    report.n_samples = n_samples;
    report.seed = seed_label;
    report.notes = describe(alpha, params);
    set_verdict(report, params.significance);
    return report;
}

TestReport run_identity(const std::string& id, double alpha,
                        const IdentityParams& params, std::size_t n_samples,
                        std::uint64_t seed) {
    RngStream rng(seed, stream_for(canonical_identity(id), alpha, params));
    return run_identity(id, alpha, params, n_samples, rng, seed);
}

std::vector<TestReport> run_identity_grid(const GridConfig& cfg) {
    struct Job {
        std::string id;
        double alpha;
        IdentityParams params;
        std::uint64_t seed;
    };
    const std::vector<std::string>& ids =
        cfg.ids.empty() ? registered_identities() : cfg.ids;
    std::vector<Job> jobs;
    for (const std::string& id : ids) {
        const std::string cid = canonical_identity(id);
        const std::vector<double> thetas =
            identity_uses_theta(cid) ? cfg.thetas : std::vector<double>{0.0};
        const std::vector<ZetaSpec> zetas =
            identity_uses_zeta(cid) ? cfg.zetas
                                    : std::vector<ZetaSpec>{ZetaSpec::constant(1.0)};
        for (double alpha : cfg.alphas) {
            for (double theta : thetas) {
                for (const ZetaSpec& zeta : zetas) {
                    IdentityParams params;
                    params.theta = theta;
                    params.zeta = zeta;
                    params.significance = cfg.significance;
                    if (!identity_in_domain(cid, alpha, params)) continue;
                    for (std::uint64_t seed : cfg.seeds) {
                        jobs.push_back({cid, alpha, params, seed});
                    }
                }
            }
        }
    }

    int threads = cfg.threads;
    if (threads <= 0) {
        threads = 1;
        if (const char* env = std::getenv("PGSIM_THREADS")) {
            const long parsed = std::strtol(env, nullptr, 10);
            if (parsed > 0) threads = static_cast<int>(std::min(parsed, 64L));
        }
    }
    threads = static_cast<int>(
        std::min<std::size_t>(static_cast<std::size_t>(threads),
                              std::max<std::size_t>(jobs.size(), 1)));

    std::vector<TestReport> reports(jobs.size());
    if (threads <= 1) {
        for (std::size_t i = 0; i < jobs.size(); ++i) {
            const Job& job = jobs[i];
            reports[i] =
                run_identity(job.id, job.alpha, job.params, cfg.n_samples,
                             job.seed);
        }
        return reports;
    }

    std::atomic<std::size_t> next{0};
    std::mutex error_mutex;
    std::exception_ptr first_error;
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= jobs.size()) return;
            try {
                const Job& job = jobs[i];
                reports[i] = run_identity(job.id, job.alpha, job.params,
                                          cfg.n_samples, job.seed);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
    return reports;
}

std::size_t failure_budget(std::size_t total_runs) { return total_runs / 100; }

std::string zeta_spec_label(const ZetaSpec& zeta) {
    char buf[64];
    switch (zeta.kind) {
        case ZetaSpec::Kind::Zero:
            return "zero";
        case ZetaSpec::Kind::Const:
            std::snprintf(buf, sizeof buf, "const:%g", zeta.value);
            return buf;
        case ZetaSpec::Kind::GammaShape:
            std::snprintf(buf, sizeof buf, "gamma:%g", zeta.value);
            return buf;
        case ZetaSpec::Kind::Custom:
            return "custom";
    }
    return "zero";
}

EppfTable eppf_oracle(double alpha, double theta, int n) {
    if (!(alpha >= 0.0 && alpha < 1.0)) {
        throw std::domain_error("eppf_oracle: alpha outside [0,1)");
    }
    if (!(theta > -alpha)) {
        throw std::domain_error("eppf_oracle: requires theta > -alpha");
    }
    if (n < 1 || n > 7) {
        throw std::invalid_argument("eppf_oracle: n must lie in 1..7");
    }

    EppfTable table;
    table.n = n;

    // Denominator (theta+1)_(n-1) is shared by every partition.
    double denom = 1.0;
    for (int m = 1; m <= n - 1; ++m) denom *= theta + m;

    // Lexicographic restricted-growth enumeration: position i may join any
    // existing block or open the next one.
    std::vector<int> rgs(static_cast<std::size_t>(n), 0);
    auto emit = [&] {
        int k = 0;
        for (int v : rgs) k = std::max(k, v + 1);
        std::vector<std::vector<int>> blocks(static_cast<std::size_t>(k));
        for (int i = 0; i < n; ++i) {
            blocks[static_cast<std::size_t>(rgs[static_cast<std::size_t>(i)])]
                .push_back(i + 1);
        }
        double prob = 1.0;
        for (int i = 1; i <= k - 1; ++i) prob *= theta + i * alpha;
        for (const std::vector<int>& block : blocks) {
            for (std::size_t m = 1; m + 1 <= block.size(); ++m) {
                prob *= static_cast<double>(m) - alpha;
            }
        }
        prob /= denom;
        table.partitions.push_back(make_set_partition(n, std::move(blocks)));
        table.probabilities.push_back(prob);
    };
    auto recurse = [&](auto&& self, int pos, int max_used) -> void {
        if (pos == n) {
            emit();
            return;
        }
        for (int v = 0; v <= max_used + 1; ++v) {
            rgs[static_cast<std::size_t>(pos)] = v;
            self(self, pos + 1, std::max(max_used, v));
        }
    };
    recurse(recurse, 1, 0);
    return table;
}

}  // namespace pgsim
