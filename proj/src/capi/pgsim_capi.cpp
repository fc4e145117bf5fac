// C binding of the core library.  Exceptions stop at this boundary: argument
// shape problems map to PGSIM_ERR_PARAM, law-domain violations to
// PGSIM_ERR_DOMAIN, iteration and allocation failures to PGSIM_ERR_NUMERIC,
// with the message kept in a thread-local slot for pgsim_last_error.

#include "pgsim/pgsim.h"

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <exception>
#include <new>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "core/bridges.hpp"
#include "core/chains.hpp"
#include "core/densities.hpp"
#include "core/mass_partition.hpp"
#include "core/partitions.hpp"
#include "core/rng.hpp"
#include "core/sticks.hpp"
#include "core/verify.hpp"

struct pgsim_rng {
    pgsim::RngStream impl;
};

struct pgsim_zeta {
    pgsim::ZetaSpec impl;
};

struct pgsim_mass_partition {
    pgsim::MassPartition impl;
};

struct pgsim_bridge {
    pgsim::Bridge impl;
};

struct pgsim_partition {
    pgsim::SetPartition impl;
};

struct pgsim_chain {
    std::vector<pgsim::ChainState> states;
};

namespace {

thread_local std::string t_error;

pgsim_status fail(pgsim_status code, const std::string& what) {
    t_error = what;
    return code;
}

pgsim_status null_arg(const char* name) {
    return fail(PGSIM_ERR_PARAM, std::string("null argument: ") + name);
}

// Runs the body, clears the error slot on success and maps exceptions to
// status codes.  The body only writes through out-pointers after every
// throwing step is done, so failed calls leave caller state untouched.
template <typename F>
pgsim_status guarded(F&& body) {
    try {
        const pgsim_status rc = body();
        if (rc == PGSIM_OK) t_error.clear();
        return rc;
    } catch (const std::invalid_argument& e) {
        return fail(PGSIM_ERR_PARAM, e.what());
    } catch (const std::domain_error& e) {
        return fail(PGSIM_ERR_DOMAIN, e.what());
    } catch (const std::bad_alloc&) {
        return fail(PGSIM_ERR_NUMERIC, "allocation failed");
    } catch (const std::exception& e) {
        return fail(PGSIM_ERR_NUMERIC, e.what());
    }
}

template <typename F>
pgsim_status eval_into(double* out, F&& value) {
    if (!out) return null_arg("out");
    return guarded([&] {
        const double v = value();
        *out = v;
        return PGSIM_OK;
    });
}

pgsim_status copy_string(const std::string& text, char** out) {
    char* buf = static_cast<char*>(std::malloc(text.size() + 1));
    if (!buf) return fail(PGSIM_ERR_NUMERIC, "allocation failed");
    std::memcpy(buf, text.c_str(), text.size() + 1);
    *out = buf;
    return PGSIM_OK;
}

template <typename F>
pgsim_status string_into(char** out, F&& text) {
    if (!out) return null_arg("out");
    return guarded([&] { return copy_string(text(), out); });
}

pgsim::StickKind to_kind(pgsim_family family, double alpha, double theta,
                         const pgsim_zeta* zeta) {
    switch (family) {
        case PGSIM_FAMILY_PD:
            return pgsim::StickKind::pd(alpha, theta);
        case PGSIM_FAMILY_PG:
        case PGSIM_FAMILY_EPG: {
            if (!zeta) {
                throw std::invalid_argument(
                    "tilted families need a zeta spec");
            }
            return family == PGSIM_FAMILY_PG
                       ? pgsim::StickKind::pg(alpha, zeta->impl)
                       : pgsim::StickKind::epg(alpha, zeta->impl);
        }
    }
    throw std::invalid_argument("unknown family code");
}

pgsim::ZetaSpec parse_zeta_text(const std::string& text) {
    if (text == "zero") return pgsim::ZetaSpec::zero();
    const auto colon = text.find(':');
    if (colon != std::string::npos) {
        const std::string head = text.substr(0, colon);
        const std::string tail = text.substr(colon + 1);
        if ((head == "const" || head == "gamma") && !tail.empty()) {
            std::size_t used = 0;
            double value = 0.0;
            bool numeric = true;
            try {
                value = std::stod(tail, &used);
            } catch (const std::exception&) {
                numeric = false;
            }
            if (numeric && used == tail.size() && std::isfinite(value)) {
                return head == "const" ? pgsim::ZetaSpec::constant(value)
                                       : pgsim::ZetaSpec::gamma_shape(value);
            }
        }
    }
    throw std::invalid_argument(
        "zeta spec must be \"zero\", \"const:<value>\" or \"gamma:<shape>\", "
        "got \"" + text + "\"");
}

}  // namespace

extern "C" {

const char* pgsim_version(void) { return "1.0.0"; }

const char* pgsim_last_error(void) { return t_error.c_str(); }

void pgsim_string_free(char* text) { std::free(text); }

uint64_t pgsim_hash64(const void* data, size_t len) {
    if (!data) len = 0;
    return pgsim::hash64(static_cast<const char*>(data), len);
}

uint64_t pgsim_hash64_combine(uint64_t a, uint64_t b) {
    return pgsim::hash64_combine(a, b);
}

pgsim_status pgsim_rng_create(uint64_t seed, uint64_t stream_id,
                              pgsim_rng** out) {
    if (!out) return null_arg("out");
    return guarded([&] {
        *out = new pgsim_rng{pgsim::RngStream(seed, stream_id)};
        return PGSIM_OK;
    });
}

void pgsim_rng_destroy(pgsim_rng* rng) { delete rng; }

pgsim_status pgsim_rng_uniform(pgsim_rng* rng, double* out) {
    if (!rng) return null_arg("rng");
    return eval_into(out, [&] { return rng->impl.uniform(); });
}

pgsim_status pgsim_rng_exponential(pgsim_rng* rng, double* out) {
    if (!rng) return null_arg("rng");
    return eval_into(out, [&] { return rng->impl.exponential(); });
}

pgsim_status pgsim_rng_normal(pgsim_rng* rng, double* out) {
    if (!rng) return null_arg("rng");
    return eval_into(out, [&] { return rng->impl.normal(); });
}

pgsim_status pgsim_rng_gamma(pgsim_rng* rng, double shape, double* out) {
    if (!rng) return null_arg("rng");
    return eval_into(out, [&] { return rng->impl.gamma(shape); });
}

pgsim_status pgsim_rng_beta(pgsim_rng* rng, double a, double b, double* out) {
    if (!rng) return null_arg("rng");
    return eval_into(out, [&] { return rng->impl.beta(a, b); });
}

pgsim_status pgsim_rng_stable(pgsim_rng* rng, double alpha, double* out) {
    if (!rng) return null_arg("rng");
    return eval_into(out, [&] { return rng->impl.stable(alpha); });
}

pgsim_status pgsim_rng_tilted_stable(pgsim_rng* rng, double alpha, double zeta,
                                     double* out) {
    if (!rng) return null_arg("rng");
    return eval_into(out, [&] { return rng->impl.tilted_stable(alpha, zeta); });
}

pgsim_status pgsim_zeta_create(pgsim_zeta_kind kind, double value,
                               pgsim_zeta** out) {
    if (!out) return null_arg("out");
    return guarded([&] {
        pgsim::ZetaSpec spec = pgsim::ZetaSpec::zero();
        switch (kind) {
            case PGSIM_ZETA_ZERO:
                break;
            case PGSIM_ZETA_CONST:
                spec = pgsim::ZetaSpec::constant(value);
                break;
            case PGSIM_ZETA_GAMMA:
                spec = pgsim::ZetaSpec::gamma_shape(value);
                break;
            default:
                throw std::invalid_argument("unknown zeta kind code");
        }
        *out = new pgsim_zeta{std::move(spec)};
        return PGSIM_OK;
    });
}

pgsim_status pgsim_zeta_parse(const char* text, pgsim_zeta** out) {
    if (!text) return null_arg("text");
    if (!out) return null_arg("out");
    return guarded([&] {
        *out = new pgsim_zeta{parse_zeta_text(text)};
        return PGSIM_OK;
    });
}

pgsim_status pgsim_zeta_label(const pgsim_zeta* zeta, char** out) {
    if (!zeta) return null_arg("zeta");
    return string_into(out, [&] { return pgsim::zeta_spec_label(zeta->impl); });
}

pgsim_status pgsim_zeta_draw(const pgsim_zeta* zeta, pgsim_rng* rng,
                             double* out) {
    if (!zeta) return null_arg("zeta");
    if (!rng) return null_arg("rng");
    return eval_into(out, [&] { return zeta->impl.draw(rng->impl); });
}

void pgsim_zeta_destroy(pgsim_zeta* zeta) { delete zeta; }

pgsim_status pgsim_sticks_sample(pgsim_family family, double alpha,
                                 double theta, const pgsim_zeta* zeta,
                                 size_t count, pgsim_rng* rng, double* sticks) {
    if (!rng) return null_arg("rng");
    if (count > 0 && !sticks) return null_arg("sticks");
    return guarded([&] {
        const pgsim::StickKind kind = to_kind(family, alpha, theta, zeta);
        std::vector<double> draws(count);
        pgsim::StickState state = pgsim::make_stick_state(kind, rng->impl);
        for (size_t k = 0; k < count; ++k) {
            draws[k] = pgsim::next_stick(state, kind, rng->impl);
        }
        std::memcpy(sticks, draws.data(), count * sizeof(double));
        return PGSIM_OK;
    });
}

pgsim_status pgsim_mass_partition_sample(pgsim_family family, double alpha,
                                         double theta, const pgsim_zeta* zeta,
                                         double trunc, pgsim_rng* rng,
                                         pgsim_mass_partition** out) {
    if (!rng) return null_arg("rng");
    if (!out) return null_arg("out");
    return guarded([&] {
        const pgsim::StickKind kind = to_kind(family, alpha, theta, zeta);
        pgsim::MassPartition mp =
            pgsim::stick_stream_to_partition(kind, trunc, rng->impl);
        *out = new pgsim_mass_partition{std::move(mp)};
        return PGSIM_OK;
    });
}

size_t pgsim_mass_partition_size(const pgsim_mass_partition* mp) {
    return mp ? mp->impl.weights.size() : 0;
}

pgsim_status pgsim_mass_partition_weight(const pgsim_mass_partition* mp,
                                         size_t index, double* out) {
    if (!mp) return null_arg("mp");
    if (index >= mp->impl.weights.size()) {
        return fail(PGSIM_ERR_PARAM, "weight index out of range");
    }
    return eval_into(out, [&] { return mp->impl.weights[index]; });
}

pgsim_status pgsim_mass_partition_dust(const pgsim_mass_partition* mp,
                                       double* out) {
    if (!mp) return null_arg("mp");
    return eval_into(out, [&] { return mp->impl.dust; });
}

pgsim_status pgsim_mass_partition_csv_row(const pgsim_mass_partition* mp,
                                          char** out) {
    if (!mp) return null_arg("mp");
    return string_into(out,
                       [&] { return pgsim::mass_partition_csv_row(mp->impl); });
}

pgsim_status pgsim_mass_partition_json(const pgsim_mass_partition* mp,
                                       char** out) {
    if (!mp) return null_arg("mp");
    return string_into(out,
                       [&] { return pgsim::mass_partition_json(mp->impl); });
}

void pgsim_mass_partition_destroy(pgsim_mass_partition* mp) { delete mp; }

pgsim_status pgsim_bridge_build(pgsim_family family, double alpha,
                                double theta, const pgsim_zeta* zeta,
                                double trunc, pgsim_rng* rng,
                                pgsim_bridge** out) {
    if (!rng) return null_arg("rng");
    if (!out) return null_arg("out");
    return guarded([&] {
        const pgsim::StickKind kind = to_kind(family, alpha, theta, zeta);
        pgsim::Bridge b = pgsim::build_bridge(kind, trunc, rng->impl);
        *out = new pgsim_bridge{std::move(b)};
        return PGSIM_OK;
    });
}

pgsim_status pgsim_bridge_flow(double alpha, const pgsim_zeta* zeta, size_t n,
                               pgsim_rng* rng, pgsim_bridge** out) {
    if (!zeta) return null_arg("zeta");
    if (!rng) return null_arg("rng");
    if (!out) return null_arg("out");
    return guarded([&] {
        pgsim::Bridge b = pgsim::flow_bridge(alpha, zeta->impl, n, rng->impl);
        *out = new pgsim_bridge{std::move(b)};
        return PGSIM_OK;
    });
}

size_t pgsim_bridge_atom_count(const pgsim_bridge* b) {
    return b ? b->impl.atoms.size() : 0;
}

pgsim_status pgsim_bridge_atom(const pgsim_bridge* b, size_t index,
                               double* location, double* weight) {
    if (!b) return null_arg("b");
    if (index >= b->impl.atoms.size()) {
        return fail(PGSIM_ERR_PARAM, "atom index out of range");
    }
    return guarded([&] {
        if (location) *location = b->impl.atoms[index].location;
        if (weight) *weight = b->impl.atoms[index].weight;
        return PGSIM_OK;
    });
}

pgsim_status pgsim_bridge_dust(const pgsim_bridge* b, double* out) {
    if (!b) return null_arg("b");
    return eval_into(out, [&] { return b->impl.dust; });
}

pgsim_status pgsim_bridge_total_mass(const pgsim_bridge* b, double* out) {
    if (!b) return null_arg("b");
    return eval_into(out, [&] { return pgsim::bridge_total_mass(b->impl); });
}

pgsim_status pgsim_bridge_largest_atom(const pgsim_bridge* b, double* out) {
    if (!b) return null_arg("b");
    return eval_into(out, [&] { return pgsim::bridge_largest_atom(b->impl); });
}

pgsim_status pgsim_bridge_eval(const pgsim_bridge* b, double y, double* out) {
    if (!b) return null_arg("b");
    return eval_into(out, [&] { return pgsim::bridge_eval(b->impl, y); });
}

pgsim_status pgsim_bridge_quantile(const pgsim_bridge* b, double r,
                                   double* out) {
    if (!b) return null_arg("b");
    return eval_into(out, [&] { return pgsim::bridge_quantile(b->impl, r); });
}

pgsim_status pgsim_bridge_first_pick(const pgsim_bridge* b, pgsim_rng* rng,
                                     double* out) {
    if (!b) return null_arg("b");
    if (!rng) return null_arg("rng");
    return eval_into(out,
                     [&] { return pgsim::bridge_first_pick(b->impl, rng->impl); });
}

pgsim_status pgsim_bridge_compose(const pgsim_bridge* outer,
                                  const pgsim_bridge* inner,
                                  pgsim_bridge** out) {
    if (!outer) return null_arg("outer");
    if (!inner) return null_arg("inner");
    if (!out) return null_arg("out");
    return guarded([&] {
        pgsim::Bridge b = pgsim::compose(outer->impl, inner->impl);
        *out = new pgsim_bridge{std::move(b)};
        return PGSIM_OK;
    });
}

pgsim_status pgsim_bridge_json(const pgsim_bridge* b, char** out) {
    if (!b) return null_arg("b");
    return string_into(out, [&] { return pgsim::bridge_json(b->impl); });
}

void pgsim_bridge_destroy(pgsim_bridge* b) { delete b; }

pgsim_status pgsim_partition_sample(pgsim_family family, double alpha,
                                    double theta, const pgsim_zeta* zeta,
                                    int n, pgsim_rng* rng,
                                    pgsim_partition** out) {
    if (!rng) return null_arg("rng");
    if (!out) return null_arg("out");
    return guarded([&] {
        const pgsim::StickKind kind = to_kind(family, alpha, theta, zeta);
        pgsim::SetPartition p = pgsim::sample_partition(kind, n, rng->impl);
        *out = new pgsim_partition{std::move(p)};
        return PGSIM_OK;
    });
}

pgsim_status pgsim_partition_size(const pgsim_partition* p, int* out) {
    if (!p) return null_arg("p");
    if (!out) return null_arg("out");
    return guarded([&] {
        *out = p->impl.n;
        return PGSIM_OK;
    });
}

size_t pgsim_partition_block_count(const pgsim_partition* p) {
    return p ? p->impl.blocks.size() : 0;
}

pgsim_status pgsim_partition_block_size(const pgsim_partition* p, size_t block,
                                        size_t* out) {
    if (!p) return null_arg("p");
    if (!out) return null_arg("out");
    if (block >= p->impl.blocks.size()) {
        return fail(PGSIM_ERR_PARAM, "block index out of range");
    }
    return guarded([&] {
        *out = p->impl.blocks[block].size();
        return PGSIM_OK;
    });
}

pgsim_status pgsim_partition_element(const pgsim_partition* p, size_t block,
                                     size_t index, int* out) {
    if (!p) return null_arg("p");
    if (!out) return null_arg("out");
    if (block >= p->impl.blocks.size()) {
        return fail(PGSIM_ERR_PARAM, "block index out of range");
    }
    if (index >= p->impl.blocks[block].size()) {
        return fail(PGSIM_ERR_PARAM, "element index out of range");
    }
    return guarded([&] {
        *out = p->impl.blocks[block][index];
        return PGSIM_OK;
    });
}

pgsim_status pgsim_partition_rgs_key(const pgsim_partition* p, char** out) {
    if (!p) return null_arg("p");
    return string_into(out, [&] { return pgsim::rgs_key(p->impl); });
}

pgsim_status pgsim_partition_json(const pgsim_partition* p, char** out) {
    if (!p) return null_arg("p");
    return string_into(out, [&] { return pgsim::set_partition_json(p->impl); });
}

pgsim_status pgsim_partition_csv_row(const pgsim_partition* p, char** out) {
    if (!p) return null_arg("p");
    return string_into(out,
                       [&] { return pgsim::set_partition_csv_row(p->impl); });
}

void pgsim_partition_destroy(pgsim_partition* p) { delete p; }

pgsim_status pgsim_chain_run(pgsim_chain_kind kind, double alpha,
                             const pgsim_zeta* zeta, int steps, double trunc,
                             pgsim_rng* rng, pgsim_chain** out) {
    if (!zeta) return null_arg("zeta");
    if (!rng) return null_arg("rng");
    if (!out) return null_arg("out");
    return guarded([&] {
        std::vector<pgsim::ChainState> states;
        switch (kind) {
            case PGSIM_CHAIN_V:
                states = pgsim::run_v_chain(alpha, zeta->impl, steps, rng->impl);
                break;
            case PGSIM_CHAIN_W:
                states = pgsim::run_w_chain(alpha, zeta->impl, steps, rng->impl);
                break;
            case PGSIM_CHAIN_Q:
                states = pgsim::run_q_chain(alpha, zeta->impl, steps, rng->impl);
                break;
            case PGSIM_CHAIN_BDGM: {
                std::vector<pgsim::BdgmStep> path = pgsim::bdgm_chain(
                    alpha, zeta->impl, steps, trunc, rng->impl);
                states.reserve(path.size());
                for (pgsim::BdgmStep& step : path) {
                    states.push_back(std::move(step.state));
                }
                break;
            }
            default:
                throw std::invalid_argument("unknown chain kind code");
        }
        *out = new pgsim_chain{std::move(states)};
        return PGSIM_OK;
    });
}

size_t pgsim_chain_length(const pgsim_chain* chain) {
    return chain ? chain->states.size() : 0;
}

pgsim_status pgsim_chain_state(const pgsim_chain* chain, size_t index, int* k,
                               double* t_hat, double* diversity, double* aux,
                               double* factor, double* waiting_time) {
    if (!chain) return null_arg("chain");
    if (index >= chain->states.size()) {
        return fail(PGSIM_ERR_PARAM, "state index out of range");
    }
    return guarded([&] {
        const pgsim::ChainState& st = chain->states[index];
        if (k) *k = st.k;
        if (t_hat) *t_hat = st.t_hat;
        if (diversity) *diversity = st.diversity;
        if (aux) *aux = st.aux;
        if (factor) *factor = st.factors.empty() ? 0.0 : st.factors.back();
        if (waiting_time) *waiting_time = st.waiting_time;
        return PGSIM_OK;
    });
}

pgsim_status pgsim_chain_csv(const pgsim_chain* chain, char** out) {
    if (!chain) return null_arg("chain");
    return string_into(out, [&] {
        std::string text = "k,t_hat,diversity,factor,waiting_time\n";
        for (const pgsim::ChainState& st : chain->states) {
            text += pgsim::chain_state_csv_row(st);
            text += '\n';
        }
        return text;
    });
}

void pgsim_chain_destroy(pgsim_chain* chain) { delete chain; }

pgsim_status pgsim_transition_density(pgsim_transition_kind kind, double alpha,
                                      double t, double s, double* out) {
    return eval_into(out, [&] {
        pgsim::TransitionKind k;
        switch (kind) {
            case PGSIM_TRANSITION_V:
                k = pgsim::TransitionKind::V;
                break;
            case PGSIM_TRANSITION_W:
                k = pgsim::TransitionKind::W;
                break;
            default:
                throw std::invalid_argument("unknown transition kind code");
        }
        return pgsim::transition_density(k, alpha, t, s);
    });
}

pgsim_status pgsim_stable_density(double alpha, double x, double* out) {
    return eval_into(out, [&] { return pgsim::stable_density(alpha, x); });
}

pgsim_status pgsim_delta_density(double alpha, double x, double* out) {
    return eval_into(out, [&] { return pgsim::delta_density(alpha, x); });
}

pgsim_status pgsim_omega_density(double alpha, double y, double q,
                                 double* out) {
    return eval_into(out, [&] { return pgsim::omega_density(alpha, y, q); });
}

pgsim_status pgsim_density_exp_over_tau(double alpha, double zeta, double y,
                                        double* out) {
    return eval_into(out,
                     [&] { return pgsim::density_exp_over_tau(alpha, zeta, y); });
}

pgsim_status pgsim_survival_exp_over_tau(double alpha, double zeta, double y,
                                         double* out) {
    return eval_into(
        out, [&] { return pgsim::survival_exp_over_tau(alpha, zeta, y); });
}

pgsim_status pgsim_survival_S(double alpha, double theta, double y,
                              double* out) {
    return eval_into(out, [&] { return pgsim::survival_S(alpha, theta, y); });
}

pgsim_status pgsim_density_E(double alpha, double theta, double y,
                             double* out) {
    return eval_into(out, [&] { return pgsim::density_E(alpha, theta, y); });
}

pgsim_status pgsim_rho_merge_density(double alpha, double theta, double p,
                                     double* out) {
    return eval_into(out,
                     [&] { return pgsim::rho_merge_density(alpha, theta, p); });
}

pgsim_status pgsim_neg_moment(double alpha, double theta, double delta,
                              double* out) {
    return eval_into(out,
                     [&] { return pgsim::neg_moment(alpha, theta, delta); });
}

pgsim_status pgsim_merge_size_pmf(double alpha, double theta, int b,
                                  double* pmf) {
    if (!pmf) return null_arg("pmf");
    return guarded([&] {
        const std::vector<double> values =
            pgsim::merge_size_pmf(alpha, theta, b);
        std::memcpy(pmf, values.data(), values.size() * sizeof(double));
        return PGSIM_OK;
    });
}

pgsim_status pgsim_eppf_count(int n, size_t* out) {
    if (!out) return null_arg("out");
    return guarded([&] {
        // Partition enumeration depends on n alone; the law here is a dummy.
        const size_t count = pgsim::eppf_oracle(0.5, 0.5, n).partitions.size();
        *out = count;
        return PGSIM_OK;
    });
}

pgsim_status pgsim_eppf_oracle(double alpha, double theta, int n,
                               double* probs, size_t capacity,
                               size_t* written) {
    if (!written) return null_arg("written");
    if (capacity > 0 && !probs) return null_arg("probs");
    return guarded([&] {
        const pgsim::EppfTable table = pgsim::eppf_oracle(alpha, theta, n);
        const size_t count = table.probabilities.size();
        if (count > capacity) {
            *written = count;
            return fail(PGSIM_ERR_PARAM, "probs buffer too small");
        }
        std::memcpy(probs, table.probabilities.data(),
                    count * sizeof(double));
        *written = count;
        return PGSIM_OK;
    });
}

pgsim_status pgsim_eppf_keys(int n, char** out) {
    return string_into(out, [&] {
        const pgsim::EppfTable table = pgsim::eppf_oracle(0.5, 0.5, n);
        std::string text;
        for (size_t i = 0; i < table.partitions.size(); ++i) {
            if (i > 0) text += '\n';
            text += pgsim::rgs_key(table.partitions[i]);
        }
        return text;
    });
}

size_t pgsim_identity_count(void) {
    return pgsim::registered_identities().size();
}

const char* pgsim_identity_name(size_t index) {
    const std::vector<std::string>& ids = pgsim::registered_identities();
    return index < ids.size() ? ids[index].c_str() : nullptr;
}

pgsim_status pgsim_identity_run(const char* id, double alpha, double theta,
                                const pgsim_zeta* zeta, size_t n_samples,
                                uint64_t seed, double significance,
                                double* statistic, double* p_value, int* pass,
                                char** json) {
    if (!id) return null_arg("id");
    return guarded([&] {
        pgsim::IdentityParams params;
        params.theta = theta;
        if (zeta) params.zeta = zeta->impl;
        if (significance > 0.0) params.significance = significance;
        const pgsim::TestReport report =
            pgsim::run_identity(id, alpha, params, n_samples, seed);
        char* text = nullptr;
        if (json) {
            const pgsim_status rc =
                copy_string(pgsim::test_report_json(report), &text);
            if (rc != PGSIM_OK) return rc;
        }
        if (statistic) *statistic = report.statistic;
        if (p_value) *p_value = report.p_value;
        if (pass) *pass = report.verdict == "pass" ? 1 : 0;
        if (json) *json = text;
        return PGSIM_OK;
    });
}

pgsim_status pgsim_identity_grid(const pgsim_grid_config* cfg, char** json,
                                 size_t* total, size_t* failures,
                                 size_t* budget) {
    if (!json) return null_arg("json");
    return guarded([&] {
        pgsim::GridConfig grid;
        if (cfg) {
            if (cfg->ids) {
                grid.ids.assign(cfg->ids, cfg->ids + cfg->n_ids);
            }
            if (cfg->alphas) {
                grid.alphas.assign(cfg->alphas, cfg->alphas + cfg->n_alphas);
            }
            if (cfg->thetas) {
                grid.thetas.assign(cfg->thetas, cfg->thetas + cfg->n_thetas);
            }
            if (cfg->zetas) {
                grid.zetas.clear();
                for (size_t i = 0; i < cfg->n_zetas; ++i) {
                    if (!cfg->zetas[i]) {
                        throw std::invalid_argument("null zeta in grid config");
                    }
                    grid.zetas.push_back(cfg->zetas[i]->impl);
                }
            }
            if (cfg->seeds) {
                grid.seeds.assign(cfg->seeds, cfg->seeds + cfg->n_seeds);
            }
            if (cfg->n_samples > 0) grid.n_samples = cfg->n_samples;
            if (cfg->significance > 0.0) grid.significance = cfg->significance;
            grid.threads = cfg->threads;
        }
        const std::vector<pgsim::TestReport> reports =
            pgsim::run_identity_grid(grid);
        size_t failed = 0;
        for (const pgsim::TestReport& report : reports) {
            if (report.verdict != "pass") ++failed;
        }
        char* text = nullptr;
        const pgsim_status rc =
            copy_string(pgsim::test_reports_json(reports), &text);
        if (rc != PGSIM_OK) return rc;
        if (total) *total = reports.size();
        if (failures) *failures = failed;
        if (budget) *budget = pgsim::failure_budget(reports.size());
        *json = text;
        return PGSIM_OK;
    });
}

size_t pgsim_failure_budget(size_t total) {
    return pgsim::failure_budget(total);
}

}  // extern "C"
