#include "iccv/cli.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>
#include <variant>

#include <CLI11.hpp>
#include <json.hpp>

#include "iccv/behavior.hpp"
#include "iccv/calib.hpp"
#include "iccv/errors.hpp"
#include "iccv/solver.hpp"

namespace iccv {

namespace {

// ---------------------------------------------------------------------------
// Output tables

using Cell = std::variant<std::monostate, long long, double, std::string, bool>;

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;

    void add_row(std::vector<Cell> row) { rows.push_back(std::move(row)); }
};

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_csv(const Table& table, std::ostream& out) {
    for (std::size_t c = 0; c < table.columns.size(); ++c) {
        if (c) out << ',';
        out << table.columns[c];
    }
    out << '\n';
    for (const auto& row : table.rows) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (c) out << ',';
            std::visit(
                [&](const auto& v) {
                    using T = std::decay_t<decltype(v)>;
                    if constexpr (std::is_same_v<T, std::monostate>) {
                    } else if constexpr (std::is_same_v<T, double>) {
                        out << format_double(v);
                    } else if constexpr (std::is_same_v<T, bool>) {
                        out << (v ? 1 : 0);
                    } else {
                        out << v;
                    }
                },
                row[c]);
        }
        out << '\n';
    }
}

void write_json(const Table& table, std::ostream& out) {
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (const auto& row : table.rows) {
        nlohmann::ordered_json obj;
        for (std::size_t c = 0; c < row.size(); ++c) {
            std::visit(
                [&](const auto& v) {
                    using T = std::decay_t<decltype(v)>;
                    if constexpr (std::is_same_v<T, std::monostate>) {
                        obj[table.columns[c]] = nullptr;
                    } else {
                        obj[table.columns[c]] = v;
                    }
                },
                row[c]);
        }
        rows.push_back(std::move(obj));
    }
    out << rows.dump(2) << '\n';
}

// ---------------------------------------------------------------------------
// Configuration

struct RunConfig {
    std::string model = "increasing-cost";
    std::string prior_kind = "normal";
    double mu = 1.99;
    double sigma = 0.40;
    double uniform_a = -1.0;
    double uniform_b = 1.0;
    double theta = 0.0;

    double payoff = 5000.0;
    double cost0 = 933.0;
    double epsilon = 1.0;
    std::string cost_kind = "auto";

    std::string tail = "two-sided";
    double alpha = 0.05;
    long reps = 100000;
    std::uint64_t seed = 20200501;
    int cap = 10000;
    int workers = 0;

    double z = 1.96;
    double theta_true = 0.0;

    double grid_lo = 1.645;
    double grid_hi = 6.0;
    double grid_step = 0.005;

    std::string axis = "cost_ratio";
    double sweep_lo = 0.05;
    double sweep_hi = 1.0;
    int sweep_points = 5;

    std::string studies_path;
    double target_n = 48.75;
    int n_bar = 4;
    int n_bar_max = 7;
    double cost_ratio = -1.0;  // <0: derive from cost0 / payoff

    double alpha_s = 1.0;
    std::string omega = "identity";
    double rho = 0.0;
    std::string lambda = "ones";
    double jitter = 1e-8;

    std::string format = "csv";
    std::string out_path;

    Tail tail_kind() const {
        return tail == "two-sided" ? Tail::two_sided : Tail::upper_one_sided;
    }

    Prior make_prior() const {
        if (prior_kind == "normal") return Prior::normal(mu, sigma);
        if (prior_kind == "uniform") return Prior::uniform(uniform_a, uniform_b);
        return Prior::point_mass(theta);
    }

    CostSchedule make_cost() const {
        if (cost_kind == "power" || (cost_kind == "auto" && model == "increasing-cost")) {
            return CostSchedule::power_law(cost0, epsilon);
        }
        return CostSchedule::constant(cost0);
    }

    Incentives make_incentives() const { return Incentives(payoff, make_cost()); }

    BehaviorModel make_model() const {
        if (model == "baseline") return BehaviorModel::baseline();
        if (model == "increasing-cost") return BehaviorModel::increasing_cost();
        if (model == "learning") return BehaviorModel::learning();
        if (model == "pooling") return BehaviorModel::pooling();
        GeneralSpec spec;
        spec.lambda_kind = lambda == "sqrt-index" ? GeneralSpec::LambdaKind::sqrt_index
                                                  : GeneralSpec::LambdaKind::ones;
        if (omega == "pooling") {
            spec.omega_kind = GeneralSpec::OmegaKind::pooling;
        } else if (omega == "constant-rho") {
            spec.omega_kind = GeneralSpec::OmegaKind::constant_rho;
        } else {
            spec.omega_kind = GeneralSpec::OmegaKind::identity;
        }
        spec.rho = rho;
        spec.alpha_s = alpha_s;
        spec.jitter = jitter;
        return BehaviorModel::general(std::move(spec));
    }

    GridSpec make_grid() const { return GridSpec{grid_lo, grid_hi, grid_step}; }
};

void add_output_options(CLI::App* cmd, RunConfig& cfg) {
    cmd->add_option("--format", cfg.format, "Output format")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();
    cmd->add_option("--out", cfg.out_path, "Write output to this file instead of stdout")
        ->capture_default_str();
}

void add_prior_options(CLI::App* cmd, RunConfig& cfg) {
    cmd->add_option("--prior", cfg.prior_kind, "Prior family over the standardized effect")
        ->check(CLI::IsMember({"normal", "uniform", "point"}))
        ->capture_default_str();
    cmd->add_option("--mu", cfg.mu, "Normal prior mean")->capture_default_str();
    cmd->add_option("--sigma", cfg.sigma, "Normal prior sd")->capture_default_str();
    cmd->add_option("--a", cfg.uniform_a, "Uniform prior lower end")->capture_default_str();
    cmd->add_option("--b", cfg.uniform_b, "Uniform prior upper end")->capture_default_str();
    cmd->add_option("--theta", cfg.theta, "Point-mass prior location")->capture_default_str();
}

void add_sim_options(CLI::App* cmd, RunConfig& cfg, bool with_model = true) {
    if (with_model) {
        cmd->add_option("--model", cfg.model, "Research process")
            ->check(CLI::IsMember({"baseline", "increasing-cost", "learning", "pooling", "general"}))
            ->capture_default_str();
    }
    add_prior_options(cmd, cfg);
    cmd->add_option("--payoff", cfg.payoff, "Publication payoff v")->capture_default_str();
    cmd->add_option("--cost0", cfg.cost0, "Marginal cost level (c, or c0 for power law)")
        ->capture_default_str();
    cmd->add_option("--epsilon", cfg.epsilon, "Cost elasticity for the power law")
        ->capture_default_str();
    cmd->add_option("--cost-kind", cfg.cost_kind,
                    "Cost schedule (auto: power law for increasing-cost, constant otherwise)")
        ->check(CLI::IsMember({"auto", "constant", "power"}))
        ->capture_default_str();
    cmd->add_option("--tail", cfg.tail, "Alternative hypothesis shape")
        ->check(CLI::IsMember({"two-sided", "upper-one-sided"}))
        ->capture_default_str();
    cmd->add_option("--alpha", cfg.alpha, "Nominal significance level")->capture_default_str();
    cmd->add_option("--reps", cfg.reps, "Monte Carlo replications")->capture_default_str();
    cmd->add_option("--seed", cfg.seed, "Root seed of the replicate substreams")
        ->capture_default_str();
    cmd->add_option("--cap", cfg.cap, "Trajectory study cap")->capture_default_str();
    cmd->add_option("--workers", cfg.workers, "Worker threads (0 = hardware)")
        ->configurable(false)
        ->capture_default_str();
    cmd->add_option("--alpha-s", cfg.alpha_s, "General model: sophistication weight")
        ->capture_default_str();
    cmd->add_option("--omega", cfg.omega, "General model: correlation generator")
        ->check(CLI::IsMember({"identity", "pooling", "constant-rho"}))
        ->capture_default_str();
    cmd->add_option("--rho", cfg.rho, "General model: constant off-diagonal correlation")
        ->capture_default_str();
    cmd->add_option("--lambda", cfg.lambda, "General model: per-study mean multipliers")
        ->check(CLI::IsMember({"ones", "sqrt-index"}))
        ->capture_default_str();
    cmd->add_option("--jitter", cfg.jitter, "General model: prior covariance jitter")
        ->capture_default_str();
    add_output_options(cmd, cfg);
}

// ---------------------------------------------------------------------------
// Subcommand handlers

Table cmd_iccv(const RunConfig& cfg) {
    const ICCVResult r =
        find_iccv(cfg.make_model(), cfg.make_prior(), cfg.make_incentives(), cfg.tail_kind(),
                  cfg.alpha, cfg.reps, cfg.seed, cfg.make_grid(), cfg.cap, cfg.workers);
    Table t;
    t.columns = {"z_star",       "size_at_z_star", "std_error", "cap_hit_rate",
                 "mean_studies", "nonzero_power",  "grid_step", "reps"};
    t.add_row({r.z_star, r.size_at_z.size, r.size_at_z.std_error, r.size_at_z.cap_hit_rate,
               r.mean_studies, r.nonzero_power, r.grid_step,
               static_cast<long long>(r.size_at_z.reps)});
    return t;
}

Table cmd_size(const RunConfig& cfg) {
    const SizeEstimate e = estimate_size(cfg.make_model(), cfg.make_prior(), cfg.make_incentives(),
                                         cfg.z, cfg.tail_kind(), cfg.reps, cfg.seed, cfg.cap,
                                         cfg.workers);
    Table t;
    t.columns = {"z", "size", "std_error", "cap_hit_rate", "reps"};
    t.add_row({cfg.z, e.size, e.std_error, e.cap_hit_rate, static_cast<long long>(e.reps)});
    return t;
}

Table cmd_power(const RunConfig& cfg) {
    const SizeEstimate e = estimate_power(cfg.make_model(), cfg.make_prior(), cfg.make_incentives(),
                                          cfg.z, cfg.tail_kind(), cfg.theta_true, cfg.reps,
                                          cfg.seed, cfg.cap, cfg.workers);
    Table t;
    t.columns = {"z", "theta_true", "power", "std_error", "cap_hit_rate", "reps"};
    t.add_row({cfg.z, cfg.theta_true, e.size, e.std_error, e.cap_hit_rate,
               static_cast<long long>(e.reps)});
    return t;
}

Table cmd_baseline_threshold(const RunConfig& cfg) {
    const Incentives inc(cfg.payoff, cfg.cost_kind == "power"
                                         ? CostSchedule::power_law(cfg.cost0, cfg.epsilon)
                                         : CostSchedule::constant(cfg.cost0));
    const double z = baseline_threshold(cfg.make_prior(), inc, cfg.tail_kind());
    Table t;
    t.columns = {"threshold", "cost_ratio"};
    t.add_row({z, inc.cost_ratio(1)});
    return t;
}

Table cmd_mean_studies(const RunConfig& cfg) {
    const double m = mean_num_studies(cfg.make_model(), cfg.make_prior(), cfg.make_incentives(),
                                      cfg.z, cfg.tail_kind(), cfg.reps, cfg.seed, cfg.cap,
                                      cfg.workers);
    Table t;
    t.columns = {"z", "mean_studies", "reps"};
    t.add_row({cfg.z, m, static_cast<long long>(cfg.reps)});
    return t;
}

RunConfig apply_axis(const RunConfig& base, const std::string& axis, double value) {
    RunConfig cfg = base;
    if (axis == "prior_mean") {
        cfg.prior_kind = "normal";
        cfg.mu = value;
    } else if (axis == "prior_sd") {
        cfg.prior_kind = "normal";
        cfg.sigma = value;
    } else if (axis == "cost_ratio") {
        cfg.cost0 = value * cfg.payoff;
    } else {  // epsilon
        cfg.cost_kind = "power";
        cfg.epsilon = value;
    }
    return cfg;
}

Table cmd_sweep(const RunConfig& cfg) {
    if (cfg.sweep_points < 1) throw std::invalid_argument("sweep: --points must be >= 1");
    if (cfg.sweep_points > 1 && !(cfg.sweep_hi >= cfg.sweep_lo)) {
        throw std::invalid_argument("sweep: requires hi >= lo");
    }
    Table t;
    t.columns = {"axis",   "value",          "classical_z",   "size_at_classical", "size_se",
                 "z_star", "size_at_z_star", "z_star_se",     "mean_studies"};
    const double classical = classical_quantile(cfg.alpha, cfg.tail_kind());
    for (int i = 0; i < cfg.sweep_points; ++i) {
        const double value =
            cfg.sweep_points == 1
                ? cfg.sweep_lo
                : cfg.sweep_lo + i * (cfg.sweep_hi - cfg.sweep_lo) / (cfg.sweep_points - 1);
        const RunConfig at = apply_axis(cfg, cfg.axis, value);
        // Common random numbers: every axis value reuses the same seed, so
        // paired panels differ only through the parameter.
        const SizeEstimate size_cl =
            estimate_size(at.make_model(), at.make_prior(), at.make_incentives(), classical,
                          at.tail_kind(), at.reps, at.seed, at.cap, at.workers);
        const ICCVResult iccv =
            find_iccv(at.make_model(), at.make_prior(), at.make_incentives(), at.tail_kind(),
                      at.alpha, at.reps, at.seed, at.make_grid(), at.cap, at.workers);
        t.add_row({cfg.axis, value, classical, size_cl.size, size_cl.std_error, iccv.z_star,
                   iccv.size_at_z.size, iccv.size_at_z.std_error, iccv.mean_studies});
    }
    return t;
}

Table cmd_calibrate_prior(const RunConfig& cfg) {
    const auto studies = load_studies_file(cfg.studies_path);
    const Prior prior = calibrate_prior(studies, cfg.target_n);
    Table t;
    t.columns = {"kind", "mean", "sd", "n_studies", "target_n"};
    if (prior.is_normal()) {
        t.add_row({std::string("normal"), prior.mu(), prior.sigma(),
                   static_cast<long long>(studies.size()), cfg.target_n});
    } else {
        t.add_row({std::string("point_mass"), prior.theta(), 0.0,
                   static_cast<long long>(studies.size()), cfg.target_n});
    }
    return t;
}

Table cmd_elicit(const RunConfig& cfg) {
    const auto [lower, upper] = elicitation_bounds(cfg.n_bar, cfg.z, Prior::normal(cfg.mu, cfg.sigma));
    Table t;
    t.columns = {"n_bar", "lower", "upper"};
    t.add_row({static_cast<long long>(cfg.n_bar), lower, upper});
    return t;
}

Table cmd_table2(const RunConfig& cfg) {
    const double ratio = cfg.cost_ratio > 0.0 ? cfg.cost_ratio : cfg.cost0 / cfg.payoff;
    const BoundsTable table =
        cost_ratio_bounds_table(cfg.z, Prior::normal(cfg.mu, cfg.sigma), cfg.n_bar_max, ratio);
    Table t;
    t.columns = {"n_bar",           "lower",           "upper",
                 "published_lower", "published_upper", "cost_ratio",
                 "is_implied_n_bar"};
    for (const BoundsRow& row : table.rows) {
        const auto published = published_cost_ratio_bounds(row.n_bar);
        std::vector<Cell> cells{static_cast<long long>(row.n_bar), row.lower, row.upper};
        if (published) {
            cells.emplace_back(published->first);
            cells.emplace_back(published->second);
        } else {
            cells.emplace_back(std::monostate{});
            cells.emplace_back(std::monostate{});
        }
        cells.emplace_back(ratio);
        cells.emplace_back(row.n_bar == table.implied_n_bar);
        t.add_row(std::move(cells));
    }
    return t;
}

} // namespace

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    RunConfig cfg;
    CLI::App app{"Incentive-compatible critical values: size distortions under strategic "
                 "researcher behavior and the critical values that undo them"};
    app.name("iccv");
    app.require_subcommand(1);

    std::map<std::string, std::function<Table(const RunConfig&)>> handlers;

    CLI::App* iccv_cmd = app.add_subcommand("iccv", "Search the incentive-compatible critical value");
    add_sim_options(iccv_cmd, cfg);
    iccv_cmd->add_option("--grid-lo", cfg.grid_lo, "Grid lower end")->capture_default_str();
    iccv_cmd->add_option("--grid-hi", cfg.grid_hi, "Grid upper end")->capture_default_str();
    iccv_cmd->add_option("--grid-step", cfg.grid_step, "Grid step")->capture_default_str();
    handlers["iccv"] = cmd_iccv;

    CLI::App* size_cmd = app.add_subcommand("size", "Estimate test size at a critical value");
    add_sim_options(size_cmd, cfg);
    size_cmd->add_option("--z", cfg.z, "Critical value")->capture_default_str();
    handlers["size"] = cmd_size;

    CLI::App* power_cmd = app.add_subcommand("power", "Estimate rejection rate at a true effect");
    add_sim_options(power_cmd, cfg);
    power_cmd->add_option("--z", cfg.z, "Critical value")->capture_default_str();
    power_cmd->add_option("--theta-true", cfg.theta_true, "True standardized effect")
        ->capture_default_str();
    handlers["power"] = cmd_power;

    CLI::App* thr_cmd = app.add_subcommand(
        "baseline-threshold", "Constant-cost boundary between endless search and no research");
    add_prior_options(thr_cmd, cfg);
    thr_cmd->add_option("--payoff", cfg.payoff, "Publication payoff v")->capture_default_str();
    thr_cmd->add_option("--cost0", cfg.cost0, "Constant marginal cost c")->capture_default_str();
    thr_cmd->add_option("--cost-kind", cfg.cost_kind, "Cost schedule")
        ->check(CLI::IsMember({"auto", "constant", "power"}))
        ->capture_default_str();
    thr_cmd->add_option("--epsilon", cfg.epsilon, "Cost elasticity (power law)")
        ->capture_default_str();
    thr_cmd->add_option("--tail", cfg.tail, "Alternative hypothesis shape")
        ->check(CLI::IsMember({"two-sided", "upper-one-sided"}))
        ->capture_default_str();
    add_output_options(thr_cmd, cfg);
    handlers["baseline-threshold"] = cmd_baseline_threshold;

    CLI::App* sweep_cmd =
        app.add_subcommand("sweep", "Size at the classical CV plus the ICCV along one parameter axis");
    add_sim_options(sweep_cmd, cfg);
    sweep_cmd->add_option("--axis", cfg.axis, "Swept parameter")
        ->check(CLI::IsMember({"prior_mean", "prior_sd", "cost_ratio", "epsilon"}))
        ->capture_default_str();
    sweep_cmd->add_option("--lo", cfg.sweep_lo, "Axis lower end")->capture_default_str();
    sweep_cmd->add_option("--hi", cfg.sweep_hi, "Axis upper end")->capture_default_str();
    sweep_cmd->add_option("--points", cfg.sweep_points, "Number of axis values")
        ->capture_default_str();
    sweep_cmd->add_option("--grid-lo", cfg.grid_lo, "ICCV grid lower end")->capture_default_str();
    sweep_cmd->add_option("--grid-hi", cfg.grid_hi, "ICCV grid upper end")->capture_default_str();
    sweep_cmd->add_option("--grid-step", cfg.grid_step, "ICCV grid step")->capture_default_str();
    handlers["sweep"] = cmd_sweep;

    CLI::App* mean_cmd = app.add_subcommand("mean-studies", "Mean study count under the null");
    add_sim_options(mean_cmd, cfg);
    mean_cmd->add_option("--z", cfg.z, "Critical value")->capture_default_str();
    handlers["mean-studies"] = cmd_mean_studies;

    CLI::App* calib_cmd =
        app.add_subcommand("calibrate-prior", "Empirical-Bayes prior from matched-pairs summaries");
    calib_cmd->add_option("--studies", cfg.studies_path, "CSV with header n,sum_x,sum_y,beta_hat")
        ->required();
    calib_cmd->add_option("--target-n", cfg.target_n, "Sample size the t-statistics are rescaled to")
        ->capture_default_str();
    add_output_options(calib_cmd, cfg);
    handlers["calibrate-prior"] = cmd_calibrate_prior;

    CLI::App* elicit_cmd =
        app.add_subcommand("elicit", "Cost-ratio bounds implied by a typical walk-away study count");
    elicit_cmd->add_option("--n-bar", cfg.n_bar, "Typical number of unrejected studies")
        ->capture_default_str();
    elicit_cmd->add_option("--z", cfg.z, "Critical value")->capture_default_str();
    elicit_cmd->add_option("--mu", cfg.mu, "Normal prior mean")->capture_default_str();
    elicit_cmd->add_option("--sigma", cfg.sigma, "Normal prior sd")->capture_default_str();
    add_output_options(elicit_cmd, cfg);
    handlers["elicit"] = cmd_elicit;

    CLI::App* table2_cmd = app.add_subcommand(
        "table2", "Cost-ratio bound table with published reference values side by side");
    table2_cmd->add_option("--nmax", cfg.n_bar_max, "Largest n_bar row")->capture_default_str();
    table2_cmd->add_option("--z", cfg.z, "Critical value")->capture_default_str();
    table2_cmd->add_option("--mu", cfg.mu, "Normal prior mean")->capture_default_str();
    table2_cmd->add_option("--sigma", cfg.sigma, "Normal prior sd")->capture_default_str();
    table2_cmd->add_option("--cost-ratio", cfg.cost_ratio,
                           "Cost-benefit ratio whose implied n_bar is flagged (default cost0/payoff)")
        ->capture_default_str();
    table2_cmd->add_option("--payoff", cfg.payoff, "Publication payoff v")->capture_default_str();
    table2_cmd->add_option("--cost0", cfg.cost0, "Marginal cost")->capture_default_str();
    add_output_options(table2_cmd, cfg);
    handlers["table2"] = cmd_table2;

    app.set_config("--config", "", "Flat key=value config file; flags override file values");
    for (CLI::App* sub : app.get_subcommands({})) {
        sub->fallthrough();  // lets --config appear after the subcommand name
    }

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, err, err);
        return 2;
    }

    CLI::App* sub = app.get_subcommands().front();
    // Resolved-config echo: a valid config file reproducing this run through
    // `<subcommand> --config <file>`.
    err << app.get_config_formatter()->to_config(sub, true, false, sub->get_name() + ".");

    try {
        const Table table = handlers.at(sub->get_name())(cfg);
        std::ofstream file;
        std::ostream* sink = &out;
        if (!cfg.out_path.empty()) {
            file.open(cfg.out_path, std::ios::binary);
            if (!file) throw std::runtime_error("cannot open output file: " + cfg.out_path);
            sink = &file;
        }
        if (cfg.format == "json") {
            write_json(table, *sink);
        } else {
            write_csv(table, *sink);
        }
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}

} // namespace iccv
