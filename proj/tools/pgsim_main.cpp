// Batch front end.  Every subcommand is a pure function of its flags: seeds
// split into stream ids by hashing the subcommand name with the task index,
// output floats carry 17 significant digits, and repeated invocations with
// the same flags produce identical bytes.  Exit codes: 0 on success, 2 on
// parameter problems, 1 when a verification sweep fails beyond its budget.

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "pgsim/pgsim.h"

namespace {

// Flag set shared by the subcommands; each one reads the fields it uses.
struct RunConfig {
    std::string command;
    double alpha = 0.5;
    double theta = 0.0;
    std::string zeta = "zero";
    long long n = 10;
    int steps = 20;
    double trunc = 1e-4;
    std::uint64_t seed = 1;
    std::string out;  // empty writes to stdout
    std::string format = "csv";
    double significance = 0.001;
};

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

[[noreturn]] void die(const std::string& message) {
    std::fprintf(stderr, "pgsim: %s\n", message.c_str());
    std::exit(2);
}

void need_ok(pgsim_status rc) {
    if (rc != PGSIM_OK) die(pgsim_last_error());
}

std::string take_string(char* text) {
    std::string copy = text ? text : "";
    pgsim_string_free(text);
    return copy;
}

struct RngHandle {
    pgsim_rng* p = nullptr;
    ~RngHandle() { pgsim_rng_destroy(p); }
};

struct ZetaHandle {
    pgsim_zeta* p = nullptr;
    ~ZetaHandle() { pgsim_zeta_destroy(p); }
};

struct BridgeHandle {
    pgsim_bridge* p = nullptr;
    ~BridgeHandle() { pgsim_bridge_destroy(p); }
};

struct PartitionHandle {
    pgsim_partition* p = nullptr;
    ~PartitionHandle() { pgsim_partition_destroy(p); }
};

struct ChainHandle {
    pgsim_chain* p = nullptr;
    ~ChainHandle() { pgsim_chain_destroy(p); }
};

std::uint64_t stream_for(const RunConfig& cfg, std::uint64_t task) {
    const std::uint64_t base =
        pgsim_hash64(cfg.command.data(), cfg.command.size());
    return pgsim_hash64_combine(pgsim_hash64_combine(base, cfg.seed), task);
}

pgsim_rng* open_stream(const RunConfig& cfg, std::uint64_t task,
                       RngHandle& holder) {
    need_ok(pgsim_rng_create(cfg.seed, stream_for(cfg, task), &holder.p));
    return holder.p;
}

pgsim_zeta* open_zeta(const RunConfig& cfg, ZetaHandle& holder) {
    need_ok(pgsim_zeta_parse(cfg.zeta.c_str(), &holder.p));
    return holder.p;
}

pgsim_family family_of(const std::string& kind) {
    if (kind == "pd") return PGSIM_FAMILY_PD;
    if (kind == "pg") return PGSIM_FAMILY_PG;
    return PGSIM_FAMILY_EPG;
}

// Writes the payload, then a one-line summary; the summary goes to stderr
// when the payload itself went to stdout.
void deliver(const RunConfig& cfg, const std::string& payload,
             const std::string& summary) {
    const bool to_stdout = cfg.out.empty() || cfg.out == "-";
    if (to_stdout) {
        std::fwrite(payload.data(), 1, payload.size(), stdout);
        std::fflush(stdout);
    } else {
        std::ofstream file(cfg.out, std::ios::binary);
        if (!file) die("cannot open output file: " + cfg.out);
        file.write(payload.data(),
                   static_cast<std::streamsize>(payload.size()));
        if (!file) die("cannot write output file: " + cfg.out);
    }
    const std::string where = to_stdout ? "stdout" : cfg.out;
    std::fprintf(to_stdout ? stderr : stdout, "%s: %s -> %s\n",
                 cfg.command.c_str(), summary.c_str(), where.c_str());
}

int run_sticks(const RunConfig& cfg, const std::string& kind) {
    if (cfg.n < 1) die("--n must be at least 1");
    RngHandle rng;
    ZetaHandle zeta;
    open_stream(cfg, 0, rng);
    open_zeta(cfg, zeta);
    std::vector<double> sticks(static_cast<std::size_t>(cfg.n));
    need_ok(pgsim_sticks_sample(family_of(kind), cfg.alpha, cfg.theta, zeta.p,
                                sticks.size(), rng.p, sticks.data()));

    std::string payload;
    double product = 1.0;
    if (cfg.format == "csv") payload = "k,w,pick\n";
    if (cfg.format == "json") payload = "[\n";
    for (std::size_t i = 0; i < sticks.size(); ++i) {
        const double pick = (1.0 - sticks[i]) * product;
        product *= sticks[i];
        const std::string k = std::to_string(i + 1);
        if (cfg.format == "csv") {
            payload += k + ',' + fmt(sticks[i]) + ',' + fmt(pick) + '\n';
        } else {
            payload += "  {\"k\":" + k + ",\"w\":" + fmt(sticks[i]) +
                       ",\"pick\":" + fmt(pick) + '}';
            payload += i + 1 < sticks.size() ? ",\n" : "\n";
        }
    }
    if (cfg.format == "json") payload += "]\n";
    deliver(cfg, payload,
            "kind=" + kind + " n=" + std::to_string(cfg.n) +
                " residual=" + fmt(product));
    return 0;
}

int run_bridge(const RunConfig& cfg, const std::string& kind) {
    RngHandle rng;
    ZetaHandle zeta;
    BridgeHandle bridge;
    open_stream(cfg, 0, rng);
    open_zeta(cfg, zeta);
    need_ok(pgsim_bridge_build(family_of(kind), cfg.alpha, cfg.theta, zeta.p,
                               cfg.trunc, rng.p, &bridge.p));

    std::string payload;
    if (cfg.format == "csv") {
        payload = "location,weight\n";
        const std::size_t atoms = pgsim_bridge_atom_count(bridge.p);
        for (std::size_t i = 0; i < atoms; ++i) {
            double u = 0.0;
            double w = 0.0;
            need_ok(pgsim_bridge_atom(bridge.p, i, &u, &w));
            payload += fmt(u) + ',' + fmt(w) + '\n';
        }
    } else {
        char* text = nullptr;
        need_ok(pgsim_bridge_json(bridge.p, &text));
        payload = take_string(text) + '\n';
    }
    double mass = 0.0;
    need_ok(pgsim_bridge_total_mass(bridge.p, &mass));
    deliver(cfg, payload,
            "kind=" + kind +
                " atoms=" + std::to_string(pgsim_bridge_atom_count(bridge.p)) +
                " total_mass=" + fmt(mass));
    return 0;
}

int run_partition(const RunConfig& cfg, const std::string& kind) {
    if (cfg.n < 1) die("--n must be at least 1");
    RngHandle rng;
    ZetaHandle zeta;
    PartitionHandle part;
    open_stream(cfg, 0, rng);
    open_zeta(cfg, zeta);
    need_ok(pgsim_partition_sample(family_of(kind), cfg.alpha, cfg.theta,
                                   zeta.p, static_cast<int>(cfg.n), rng.p,
                                   &part.p));

    const std::size_t blocks = pgsim_partition_block_count(part.p);
    std::string payload;
    if (cfg.format == "csv") {
        std::vector<std::size_t> block_of(static_cast<std::size_t>(cfg.n) + 1,
                                          0);
        for (std::size_t b = 0; b < blocks; ++b) {
            std::size_t size = 0;
            need_ok(pgsim_partition_block_size(part.p, b, &size));
            for (std::size_t i = 0; i < size; ++i) {
                int element = 0;
                need_ok(pgsim_partition_element(part.p, b, i, &element));
                block_of[static_cast<std::size_t>(element)] = b;
            }
        }
        payload = "element,block\n";
        for (long long e = 1; e <= cfg.n; ++e) {
            payload += std::to_string(e) + ',' +
                       std::to_string(block_of[static_cast<std::size_t>(e)]) +
                       '\n';
        }
    } else {
        char* text = nullptr;
        need_ok(pgsim_partition_json(part.p, &text));
        payload = take_string(text) + '\n';
    }
    deliver(cfg, payload,
            "kind=" + kind + " n=" + std::to_string(cfg.n) +
                " blocks=" + std::to_string(blocks));
    return 0;
}

int run_chain(const RunConfig& cfg, const std::string& chain_name) {
    if (cfg.steps < 0) die("--steps must be nonnegative");
    pgsim_chain_kind kind = PGSIM_CHAIN_Q;
    if (chain_name == "v") kind = PGSIM_CHAIN_V;
    if (chain_name == "w") kind = PGSIM_CHAIN_W;
    if (chain_name == "bdgm") kind = PGSIM_CHAIN_BDGM;
    RngHandle rng;
    ZetaHandle zeta;
    ChainHandle chain;
    open_stream(cfg, 0, rng);
    open_zeta(cfg, zeta);
    need_ok(pgsim_chain_run(kind, cfg.alpha, zeta.p, cfg.steps, cfg.trunc,
                            rng.p, &chain.p));

    const std::size_t length = pgsim_chain_length(chain.p);
    std::string payload;
    if (cfg.format == "csv") {
        char* text = nullptr;
        need_ok(pgsim_chain_csv(chain.p, &text));
        payload = take_string(text);
    } else {
        payload = "[\n";
        for (std::size_t i = 0; i < length; ++i) {
            int k = 0;
            double t_hat = 0.0;
            double diversity = 0.0;
            double factor = 0.0;
            double waiting = 0.0;
            need_ok(pgsim_chain_state(chain.p, i, &k, &t_hat, &diversity,
                                      nullptr, &factor, &waiting));
            payload += "  {\"k\":" + std::to_string(k) +
                       ",\"t_hat\":" + fmt(t_hat) +
                       ",\"diversity\":" + fmt(diversity) +
                       ",\"factor\":" + fmt(factor) +
                       ",\"waiting_time\":" + fmt(waiting) + '}';
            payload += i + 1 < length ? ",\n" : "\n";
        }
        payload += "]\n";
    }
    double final_diversity = 0.0;
    need_ok(pgsim_chain_state(chain.p, length - 1, nullptr, nullptr,
                              &final_diversity, nullptr, nullptr, nullptr));
    deliver(cfg, payload,
            "chain=" + chain_name + " steps=" + std::to_string(cfg.steps) +
                " final_diversity=" + fmt(final_diversity));
    return 0;
}

struct GridSpec {
    double lo = 0.0;
    double hi = 0.0;
    double step = 0.0;
};

GridSpec parse_grid(const std::string& text) {
    GridSpec grid;
    char tail = 0;
    const int got = std::sscanf(text.c_str(), "%lf:%lf:%lf%c", &grid.lo,
                                &grid.hi, &grid.step, &tail);
    if (got != 3) die("--grid expects <lo>:<hi>:<step>, got \"" + text + "\"");
    if (!(grid.step > 0.0)) die("--grid step must be positive");
    if (grid.hi < grid.lo) die("--grid needs hi >= lo");
    return grid;
}

int run_density_table(const RunConfig& cfg, const std::string& which,
                      const std::string& grid_text, double q,
                      double zeta_value, double start) {
    const GridSpec grid = parse_grid(grid_text);
    const double span = (grid.hi - grid.lo) / grid.step;
    if (span > 1e7) die("--grid asks for more than 10^7 points");
    const std::size_t points = static_cast<std::size_t>(span + 1e-9) + 1;

    auto evaluate = [&](double x, double* value) -> pgsim_status {
        if (which == "delta") return pgsim_delta_density(cfg.alpha, x, value);
        if (which == "stable") return pgsim_stable_density(cfg.alpha, x, value);
        if (which == "omega") return pgsim_omega_density(cfg.alpha, x, q, value);
        if (which == "exp-over-tau") {
            return pgsim_density_exp_over_tau(cfg.alpha, zeta_value, x, value);
        }
        if (which == "survival-exp-over-tau") {
            return pgsim_survival_exp_over_tau(cfg.alpha, zeta_value, x, value);
        }
        if (which == "survival-s") {
            return pgsim_survival_S(cfg.alpha, cfg.theta, x, value);
        }
        if (which == "density-e") {
            return pgsim_density_E(cfg.alpha, cfg.theta, x, value);
        }
        if (which == "rho-merge") {
            return pgsim_rho_merge_density(cfg.alpha, cfg.theta, x, value);
        }
        if (which == "transition-v") {
            return pgsim_transition_density(PGSIM_TRANSITION_V, cfg.alpha,
                                            start, x, value);
        }
        return pgsim_transition_density(PGSIM_TRANSITION_W, cfg.alpha, start,
                                        x, value);
    };

    std::string csv = "x,value\n";
    std::string json = "[\n";
    std::size_t rows = 0;
    std::string last_error;
    for (std::size_t i = 0; i < points; ++i) {
        const double x = grid.lo + static_cast<double>(i) * grid.step;
        double value = 0.0;
        const pgsim_status rc = evaluate(x, &value);
        if (rc == PGSIM_ERR_NUMERIC) die(pgsim_last_error());
        if (rc != PGSIM_OK) {
            // Grid points outside the evaluator's support are skipped.
            last_error = pgsim_last_error();
            continue;
        }
        if (rows > 0) json += ",\n";
        csv += fmt(x) + ',' + fmt(value) + '\n';
        json += "  {\"x\":" + fmt(x) + ",\"value\":" + fmt(value) + '}';
        ++rows;
    }
    json += rows > 0 ? "\n]\n" : "]\n";
    if (rows == 0) die("no grid point was inside the support: " + last_error);

    deliver(cfg, cfg.format == "csv" ? csv : json,
            "which=" + which + " points=" + std::to_string(points) +
                " rows=" + std::to_string(rows) + " skipped=" +
                std::to_string(points - rows));
    return 0;
}

int run_verify(const RunConfig& cfg, const std::vector<std::string>& ids,
               const std::vector<double>& alphas,
               const std::vector<double>& thetas,
               const std::vector<std::string>& zetas, int runs, int threads) {
    if (cfg.format != "json") die("verify emits json; drop --format csv");
    if (runs < 1) die("--runs must be at least 1");
    if (cfg.n < 1) die("--n must be at least 1");

    std::vector<ZetaHandle> zeta_holders(zetas.size());
    std::vector<const pgsim_zeta*> zeta_ptrs;
    for (std::size_t i = 0; i < zetas.size(); ++i) {
        need_ok(pgsim_zeta_parse(zetas[i].c_str(), &zeta_holders[i].p));
        zeta_ptrs.push_back(zeta_holders[i].p);
    }
    std::vector<const char*> id_ptrs;
    for (const std::string& id : ids) id_ptrs.push_back(id.c_str());
    std::vector<std::uint64_t> seeds;
    for (int r = 0; r < runs; ++r) {
        seeds.push_back(cfg.seed + static_cast<std::uint64_t>(r));
    }

    pgsim_grid_config grid = {};
    if (!id_ptrs.empty()) {
        grid.ids = id_ptrs.data();
        grid.n_ids = id_ptrs.size();
    }
    if (!alphas.empty()) {
        grid.alphas = alphas.data();
        grid.n_alphas = alphas.size();
    }
    if (!thetas.empty()) {
        grid.thetas = thetas.data();
        grid.n_thetas = thetas.size();
    }
    if (!zeta_ptrs.empty()) {
        grid.zetas = zeta_ptrs.data();
        grid.n_zetas = zeta_ptrs.size();
    }
    grid.seeds = seeds.data();
    grid.n_seeds = seeds.size();
    grid.n_samples = static_cast<std::size_t>(cfg.n);
    grid.significance = cfg.significance;
    grid.threads = threads;

    char* text = nullptr;
    std::size_t total = 0;
    std::size_t failures = 0;
    std::size_t budget = 0;
    need_ok(pgsim_identity_grid(&grid, &text, &total, &failures, &budget));
    deliver(cfg, take_string(text) + '\n',
            "total=" + std::to_string(total) +
                " failures=" + std::to_string(failures) +
                " budget=" + std::to_string(budget));
    return failures > budget ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Samplers, density tables and distributional checks for "
                 "stick-breaking families and their tilted extensions."};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(pgsim_version()));

    const auto kind_check = CLI::IsMember({"pd", "pg", "epg"});
    const auto format_check = CLI::IsMember({"csv", "json"});

    int exit_code = 0;

    // sample-sticks
    RunConfig sticks_cfg;
    std::string sticks_kind = "pd";
    CLI::App* sticks = app.add_subcommand(
        "sample-sticks", "Write the first n sticks and size-biased picks");
    sticks->add_option("--kind", sticks_kind, "pd, pg or epg")
        ->check(kind_check);
    sticks->add_option("--alpha", sticks_cfg.alpha, "stability index")
        ->required();
    sticks->add_option("--theta", sticks_cfg.theta, "pd concentration");
    sticks->add_option("--zeta", sticks_cfg.zeta,
                       "tilt spec: zero, const:<v> or gamma:<a>");
    sticks->add_option("--n", sticks_cfg.n, "number of sticks");
    sticks->add_option("--seed", sticks_cfg.seed, "rng seed");
    sticks->add_option("--out", sticks_cfg.out, "output path, default stdout");
    sticks->add_option("--format", sticks_cfg.format, "csv or json")
        ->check(format_check);
    sticks->callback([&] {
        sticks_cfg.command = "sample-sticks";
        exit_code = run_sticks(sticks_cfg, sticks_kind);
    });

    // sample-bridge
    RunConfig bridge_cfg;
    std::string bridge_kind = "pd";
    CLI::App* bridge = app.add_subcommand(
        "sample-bridge", "Sample one bridge and write its atoms");
    bridge->add_option("--kind", bridge_kind, "pd, pg or epg")
        ->check(kind_check);
    bridge->add_option("--alpha", bridge_cfg.alpha, "stability index")
        ->required();
    bridge->add_option("--theta", bridge_cfg.theta, "pd concentration");
    bridge->add_option("--zeta", bridge_cfg.zeta,
                       "tilt spec: zero, const:<v> or gamma:<a>");
    bridge->add_option("--trunc", bridge_cfg.trunc,
                       "residual mass left unsampled");
    bridge->add_option("--seed", bridge_cfg.seed, "rng seed");
    bridge->add_option("--out", bridge_cfg.out, "output path, default stdout");
    bridge->add_option("--format", bridge_cfg.format, "csv or json")
        ->check(format_check);
    bridge->callback([&] {
        bridge_cfg.command = "sample-bridge";
        exit_code = run_bridge(bridge_cfg, bridge_kind);
    });

    // sample-partition
    RunConfig part_cfg;
    std::string part_kind = "pd";
    CLI::App* part = app.add_subcommand(
        "sample-partition", "Sample one partition of {1..n} by seating");
    part->add_option("--kind", part_kind, "pd, pg or epg")->check(kind_check);
    part->add_option("--alpha", part_cfg.alpha, "stability index")->required();
    part->add_option("--theta", part_cfg.theta, "pd concentration");
    part->add_option("--zeta", part_cfg.zeta,
                     "tilt spec: zero, const:<v> or gamma:<a>");
    part->add_option("--n", part_cfg.n, "ground set size");
    part->add_option("--seed", part_cfg.seed, "rng seed");
    part->add_option("--out", part_cfg.out, "output path, default stdout");
    part->add_option("--format", part_cfg.format, "csv or json")
        ->check(format_check);
    part->callback([&] {
        part_cfg.command = "sample-partition";
        exit_code = run_partition(part_cfg, part_kind);
    });

    // run-chain
    RunConfig chain_cfg;
    chain_cfg.zeta = "const:1";
    std::string chain_name = "q";
    CLI::App* chain = app.add_subcommand(
        "run-chain", "Run a total-mass chain and write its states");
    chain->add_option("--chain", chain_name, "v, w, q or bdgm")
        ->check(CLI::IsMember({"v", "w", "q", "bdgm"}));
    chain->add_option("--alpha", chain_cfg.alpha, "stability index")
        ->required();
    chain->add_option("--zeta", chain_cfg.zeta,
                      "tilt spec: zero, const:<v> or gamma:<a>");
    chain->add_option("--steps", chain_cfg.steps, "number of steps");
    chain->add_option("--trunc", chain_cfg.trunc,
                      "per-bridge residual for bdgm");
    chain->add_option("--seed", chain_cfg.seed, "rng seed");
    chain->add_option("--out", chain_cfg.out, "output path, default stdout");
    chain->add_option("--format", chain_cfg.format, "csv or json")
        ->check(format_check);
    chain->callback([&] {
        chain_cfg.command = "run-chain";
        exit_code = run_chain(chain_cfg, chain_name);
    });

    // density-table
    RunConfig dens_cfg;
    std::string which = "delta";
    std::string grid_text;
    double omega_q = 0.5;
    double zeta_value = 1.0;
    double start = 1.0;
    CLI::App* dens = app.add_subcommand(
        "density-table", "Tabulate a closed-form density over a grid");
    dens->add_option("--which", which, "density to tabulate")
        ->check(CLI::IsMember({"delta", "stable", "omega", "exp-over-tau",
                               "survival-exp-over-tau", "survival-s",
                               "density-e", "rho-merge", "transition-v",
                               "transition-w"}));
    dens->add_option("--alpha", dens_cfg.alpha, "stability index")->required();
    dens->add_option("--theta", dens_cfg.theta,
                     "concentration for survival-s, density-e, rho-merge");
    dens->add_option("--q", omega_q, "conditioning point for omega");
    dens->add_option("--zeta-value", zeta_value,
                     "tilt for the exp-over-tau forms");
    dens->add_option("--t", start, "start point for the transition kernels");
    dens->add_option("--grid", grid_text, "<lo>:<hi>:<step>")->required();
    dens->add_option("--out", dens_cfg.out, "output path, default stdout");
    dens->add_option("--format", dens_cfg.format, "csv or json")
        ->check(format_check);
    dens->callback([&] {
        dens_cfg.command = "density-table";
        exit_code = run_density_table(dens_cfg, which, grid_text, omega_q,
                                      zeta_value, start);
    });

    // verify
    RunConfig verify_cfg;
    verify_cfg.format = "json";
    verify_cfg.n = 100000;
    std::vector<std::string> ids;
    std::vector<double> alphas;
    std::vector<double> thetas;
    std::vector<std::string> zetas;
    int runs = 5;
    int threads = 0;
    CLI::App* verify = app.add_subcommand(
        "verify", "Run the distributional identity suite");
    verify->add_option("--id", ids, "identity ids, default all registered");
    verify->add_option("--alpha", alphas, "alpha grid, default 0.3 0.5 0.7");
    verify->add_option("--theta", thetas, "theta grid, default 0 0.5 1");
    verify->add_option("--zeta", zetas,
                       "zeta specs, default const:1 and gamma:2");
    verify->add_option("--n", verify_cfg.n, "samples per side");
    verify->add_option("--seed", verify_cfg.seed, "first seed");
    verify->add_option("--runs", runs, "seeded runs per combination");
    verify->add_option("--significance", verify_cfg.significance,
                       "per-test significance");
    verify->add_option("--threads", threads,
                       "worker cap, 0 honours PGSIM_THREADS");
    verify->add_option("--out", verify_cfg.out, "output path, default stdout");
    verify->add_option("--format", verify_cfg.format, "json")
        ->check(format_check);
    verify->callback([&] {
        verify_cfg.command = "verify";
        exit_code =
            run_verify(verify_cfg, ids, alphas, thetas, zetas, runs, threads);
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }
    return exit_code;
}
