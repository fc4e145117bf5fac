// Monte-Carlo identity-testing harness: a registry of named distributional
// identities, each sampled on both sides and compared by a two-sample KS
// test, plus the chi-square helper and the exact EPPF oracle the partition
// checks are measured against.
#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "core/partitions.hpp"
#include "core/rng.hpp"

namespace pgsim {

inline constexpr double kDefaultSignificance = 0.001;

// Outcome of one statistical check. verdict is "pass" exactly when p_value
// exceeds the significance the check was evaluated at.
struct TestReport {
    std::string identity_id;
    double statistic = 0.0;
    double p_value = 1.0;
    std::size_t n_samples = 0;
    std::uint64_t seed = 0;
    std::string verdict = "pass";
    std::string notes;
};

void set_verdict(TestReport& report, double significance = kDefaultSignificance);

std::string test_report_json(const TestReport& report);
std::string test_reports_json(const std::vector<TestReport>& reports);

// Two-sample Kolmogorov-Smirnov statistic with the asymptotic tail
// kolmogorov_q(sqrt(nm/(n+m)) D). Ties are safe: both empirical cdfs are
// compared after all equal values have been consumed. Throws
// std::invalid_argument when either sample is empty.
TestReport ks_two_sample(const std::vector<double>& xs,
                         const std::vector<double>& ys);

// Pearson chi-square of counts against a fixed pmf. Cells are pooled left
// to right until each pooled cell expects at least 5; a trailing remainder
// joins the last pooled cell; dof = pooled cells - 1 (p = 1 when nothing
// is left to compare). Throws std::invalid_argument when the vectors
// differ in length, a count is negative, or the pmf is not normalized to
// 1 within 1e-9.
TestReport chi_square_pmf(const std::vector<std::int64_t>& observed,
                          const std::vector<double>& pmf);

// Parameters for a registry run. Identities read only the fields they
// involve (theta for the gamma-embedding family, zeta for the tilted
// family, neither for the parameter-free ones). The rhs_* overrides
// redirect the right-hand sampler only; they exist as negative controls
// for power checks and leave the left side untouched.
struct IdentityParams {
    double theta = 0.0;
    ZetaSpec zeta = ZetaSpec::constant(1.0);
    std::optional<double> rhs_alpha;
    std::optional<double> rhs_theta;
    std::optional<ZetaSpec> rhs_zeta;
    double significance = kDefaultSignificance;
};

// Canonical identity names in registry order.
const std::vector<std::string>& registered_identities();

// Resolves aliases to canonical names ("PY-prop21" names the
// gamma-total-mass identity). Throws std::invalid_argument on unknown ids.
std::string canonical_identity(const std::string& id);

// Whether the identity reads the theta / zeta fields at all; the grid
// runner collapses the dimensions an identity ignores.
bool identity_uses_theta(const std::string& id);
bool identity_uses_zeta(const std::string& id);

// True when (alpha, params) lie inside the identity's parameter domain,
// e.g. the gamma-total-mass identity needs theta > 0 and keydd2 needs a
// tilt that is positive almost surely.
bool identity_in_domain(const std::string& id, double alpha,
                        const IdentityParams& params);

// Samples both sides of the named identity n_samples times by composing
// the library samplers and returns the two-sample KS report (every
// registered identity compares continuous laws). seed_label is recorded
// in the report; the overload taking a bare seed derives the stream id
// from the identity and parameters so distinct runs are independent and
// reproducible. Throws std::invalid_argument for unknown ids and
// std::domain_error when the parameters leave the identity's domain.
TestReport run_identity(const std::string& id, double alpha,
                        const IdentityParams& params, std::size_t n_samples,
                        RngStream& rng, std::uint64_t seed_label = 0);
TestReport run_identity(const std::string& id, double alpha,
                        const IdentityParams& params, std::size_t n_samples,
                        std::uint64_t seed);

// Standard verification sweep: every requested identity across the alpha,
// theta and zeta grids and all seeds, skipping combinations outside an
// identity's domain and collapsing the dimensions it ignores. Reports
// come back in deterministic (id, alpha, theta, zeta, seed) order no
// matter how many workers run; threads = 0 reads PGSIM_THREADS and falls
// back to 1.
struct GridConfig {
    std::vector<std::string> ids;  // empty = all registered
    std::vector<double> alphas{0.3, 0.5, 0.7};
    std::vector<double> thetas{0.0, 0.5, 1.0};
    std::vector<ZetaSpec> zetas{ZetaSpec::constant(1.0),
                                ZetaSpec::gamma_shape(2.0)};
    std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
    std::size_t n_samples = 100000;
    double significance = kDefaultSignificance;
    int threads = 0;
};
std::vector<TestReport> run_identity_grid(const GridConfig& cfg);

// Multiple-testing budget: one allowed failure per 100 runs.
std::size_t failure_budget(std::size_t total_runs);

// Label used in notes and reports: "zero", "const:<v>", "gamma:<a>",
// "custom".
std::string zeta_spec_label(const ZetaSpec& zeta);

// Exact exchangeable partition probabilities over every set partition of
// {1..n}, enumerated in lexicographic restricted-growth order:
//   p(blocks) = prod_{i=1}^{k-1}(theta + i alpha)
//               * prod_j (1-alpha)_(size_j - 1) / (theta+1)_(n-1).
// Requires 0 <= alpha < 1, theta > -alpha, 1 <= n <= 7; the probabilities
// sum to 1 within 1e-12.
struct EppfTable {
    int n = 0;
    std::vector<SetPartition> partitions;
    std::vector<double> probabilities;
};
EppfTable eppf_oracle(double alpha, double theta, int n);

}  // namespace pgsim
