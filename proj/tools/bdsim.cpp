// bdsim: behavior-and-demography epidemic simulation laboratory.
//
// Subcommands cover the full pipeline: synthesize a world, simulate it
// under a model and vaccine plan, calibrate parameters, build plans,
// evaluate outcomes, compute the priority indices, run the regression
// study, learn comprehensive weights, and drive full sweep experiments.

#include <CLI11.hpp>
#include <array>
#include <filesystem>
#include <iostream>
#include <string>

#include "bdsim/analysis.hpp"
#include "bdsim/calibration.hpp"
#include "bdsim/csv.hpp"
#include "bdsim/engine.hpp"
#include "bdsim/errors.hpp"
#include "bdsim/experiment.hpp"
#include "bdsim/indices.hpp"
#include "bdsim/metrics.hpp"
#include "bdsim/parallel.hpp"
#include "bdsim/strategies.hpp"
#include "bdsim/synthworld.hpp"
#include "bdsim/world_io.hpp"

namespace fs = std::filesystem;
using namespace bdsim;

namespace {

std::string join_path(const std::string& dir, const char* file) {
    return (fs::path(dir) / file).string();
}

StrategyKind resolve_strategy(const std::string& name, const World& world,
                              const std::string& weights_path,
                              const std::string& coverage_path) {
    if (name == "homogeneous") return StrategyKind::homogeneous();
    if (name == "prioritize_age") return StrategyKind::prioritize(Dimension::Age);
    if (name == "prioritize_income") return StrategyKind::prioritize(Dimension::Income);
    if (name == "prioritize_occupation") return StrategyKind::prioritize(Dimension::Occupation);
    if (name == "reverse_age") return StrategyKind::reverse(Dimension::Age);
    if (name == "reverse_income") return StrategyKind::reverse(Dimension::Income);
    if (name == "reverse_occupation") return StrategyKind::reverse(Dimension::Occupation);
    if (name == "svi") return StrategyKind::svi_informed();
    if (name == "real_world") {
        std::array<double, 5> coverage{1.0, 1.0, 1.0, 1.0, 1.0};
        if (!coverage_path.empty()) {
            const auto t = csv::read_table(coverage_path);
            const int col = t.require_column("coverage");
            if (t.rows.size() != 5)
                throw ConfigError("coverage table must have 5 rows");
            for (std::size_t r = 0; r < 5; ++r) coverage[r] = csv::parse_double(t, r, col);
        }
        return StrategyKind::real_world(coverage);
    }
    if (name == "comprehensive" || name == "comprehensive_ablation") {
        if (weights_path.empty())
            throw ConfigError("strategy '" + name + "' needs --weights (see learn-weights)");
        const auto t = csv::read_table(weights_path);
        const int feature_col = t.require_column("feature");
        const int weight_col = t.require_column("weight");
        std::vector<double> weights(kComprehensiveFeatureCount, 0.0);
        for (std::size_t r = 0; r < t.rows.size(); ++r) {
            const auto& feature = t.rows[r][static_cast<std::size_t>(feature_col)];
            bool found = false;
            for (std::size_t f = 0; f < kComprehensiveFeatureCount; ++f)
                if (feature == kComprehensiveFeatureNames[f]) {
                    weights[f] = csv::parse_double(t, r, weight_col);
                    found = true;
                }
            if (!found)
                throw ConfigError(weights_path + ": unknown feature '" + feature + "'");
        }
        const auto table = std::make_shared<const IndexTable>(
            build_index_table(world, world.mobility.hours / 24));
        return name == "comprehensive"
                   ? StrategyKind::comprehensive(weights, table)
                   : StrategyKind::comprehensive_ablation(weights, table);
    }
    throw ConfigError("unknown strategy '" + name + "'");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"behavior-and-demography epidemic simulation laboratory"};
    app.require_subcommand(1);

    std::uint64_t seed = 1;
    int threads = default_threads();
    std::string out = ".";
    app.add_option("--seed", seed, "global RNG seed")->capture_default_str();
    app.add_option("--threads", threads, "worker threads")->capture_default_str();
    app.add_option("--out", out, "output directory")->capture_default_str();
    app.fallthrough();

    // synthworld
    auto* synth_cmd = app.add_subcommand("synthworld", "generate a synthetic world bundle");
    SynthConfig synth = default_synth_config();
    synth_cmd->add_option("--communities", synth.n_communities)->capture_default_str();
    synth_cmd->add_option("--pois", synth.n_pois)->capture_default_str();
    synth_cmd->add_option("--days", synth.horizon_days)->capture_default_str();
    synth_cmd->add_option("--pois-per-community", synth.pois_per_community)->capture_default_str();
    synth_cmd->add_option("--population-min", synth.population_min)->capture_default_str();
    synth_cmd->add_option("--population-max", synth.population_max)->capture_default_str();
    synth_cmd->add_option("--rho-age-income", synth.rho_age_income)->capture_default_str();
    synth_cmd->add_option("--rho-age-essential", synth.rho_age_essential)->capture_default_str();
    synth_cmd->add_option("--rho-income-essential", synth.rho_income_essential)->capture_default_str();
    synth_cmd->add_option("--rho-age-mobility", synth.rho_age_mobility)->capture_default_str();
    synth_cmd->add_option("--rho-income-mobility", synth.rho_income_mobility)->capture_default_str();
    synth_cmd->add_option("--rho-essential-mobility", synth.rho_essential_mobility)->capture_default_str();

    // simulate
    auto* sim_cmd = app.add_subcommand("simulate", "run one simulation");
    std::string sim_world, sim_model = "bd", sim_plan, sim_mode = "deterministic";
    int sim_days = -1;
    sim_cmd->add_option("--world", sim_world, "world bundle directory")->required();
    sim_cmd->add_option("--model", sim_model, "bd|metapop|seir")->capture_default_str();
    sim_cmd->add_option("--plan", sim_plan, "vaccine plan CSV");
    sim_cmd->add_option("--mode", sim_mode, "deterministic|stochastic")->capture_default_str();
    sim_cmd->add_option("--days", sim_days, "horizon (default: full mobility span)");

    // calibrate
    auto* cal_cmd = app.add_subcommand("calibrate", "grid-search parameters against observed deaths");
    std::string cal_world, cal_model = "bd", cal_grid;
    double cal_band = 1.5;
    int cal_samples = 1000;
    cal_cmd->add_option("--world", cal_world)->required();
    cal_cmd->add_option("--model", cal_model)->capture_default_str();
    cal_cmd->add_option("--grid", cal_grid, "CSV: param,min,max,steps (steps=0 samples)");
    cal_cmd->add_option("--band", cal_band, "acceptance band multiplier")->capture_default_str();
    cal_cmd->add_option("--samples", cal_samples, "evaluations for sampled search")->capture_default_str();

    // plan
    auto* plan_cmd = app.add_subcommand("plan", "build a vaccine plan");
    std::string plan_world, plan_strategy, plan_scenario = "none";
    std::string plan_weights, plan_coverage;
    double plan_budget = 0.1;
    int plan_day = 0;
    bool plan_stochastic = false;
    plan_cmd->add_option("--world", plan_world)->required();
    plan_cmd->add_option("--strategy", plan_strategy)->required();
    plan_cmd->add_option("--budget", plan_budget)->capture_default_str();
    plan_cmd->add_option("--scenario", plan_scenario)->capture_default_str();
    plan_cmd->add_option("--day", plan_day)->capture_default_str();
    plan_cmd->add_option("--weights", plan_weights, "weights CSV for comprehensive strategies");
    plan_cmd->add_option("--coverage", plan_coverage, "coverage CSV for real_world");
    plan_cmd->add_flag("--stochastic", plan_stochastic, "stochastic homogeneous selection");

    // evaluate
    auto* eval_cmd = app.add_subcommand("evaluate", "compare a vaccinated run against a baseline");
    std::string eval_world, eval_vacc, eval_base;
    int eval_groups = 5;
    eval_cmd->add_option("--world", eval_world)->required();
    eval_cmd->add_option("--vaccinated", eval_vacc, "per_community.csv of the vaccinated run")->required();
    eval_cmd->add_option("--baseline", eval_base, "per_community.csv of the unvaccinated run")->required();
    eval_cmd->add_option("--groups", eval_groups)->capture_default_str();

    // indices
    auto* idx_cmd = app.add_subcommand("indices", "compute community risk and societal harm");
    std::string idx_world;
    int idx_days = -1;
    idx_cmd->add_option("--world", idx_world)->required();
    idx_cmd->add_option("--days", idx_days, "horizon (default: full mobility span)");

    // regress
    auto* reg_cmd = app.add_subcommand("regress", "index ablation regression study");
    std::string reg_world;
    int reg_instances = 1000;
    double reg_coverage = 0.02;
    reg_cmd->add_option("--world", reg_world)->required();
    reg_cmd->add_option("--instances", reg_instances)->capture_default_str();
    reg_cmd->add_option("--coverage", reg_coverage)->capture_default_str();

    // learn-weights
    auto* learn_cmd = app.add_subcommand("learn-weights", "search comprehensive index weights");
    std::string learn_world, learn_scenario = "none";
    double learn_budget = 0.1;
    int learn_candidates = 500, learn_day = 0;
    bool learn_ablation = false;
    learn_cmd->add_option("--world", learn_world)->required();
    learn_cmd->add_option("--budget", learn_budget)->capture_default_str();
    learn_cmd->add_option("--scenario", learn_scenario)->capture_default_str();
    learn_cmd->add_option("--candidates", learn_candidates)->capture_default_str();
    learn_cmd->add_option("--day", learn_day)->capture_default_str();
    learn_cmd->add_flag("--ablation", learn_ablation, "search demographic weights only");

    // sweep
    auto* sweep_cmd = app.add_subcommand("sweep", "run a full experiment grid from a config file");
    std::string sweep_config;
    sweep_cmd->add_option("--config", sweep_config, "key=value experiment file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*synth_cmd) {
            synth.seed = seed;
            const auto world = generate_world(synth);
            save_world(world, out);
        } else if (*sim_cmd) {
            const auto world = load_world(sim_world);
            RunOptions options;
            options.mode = sim_mode == "stochastic" ? SimMode::Stochastic
                                                    : SimMode::Deterministic;
            if (sim_mode != "stochastic" && sim_mode != "deterministic")
                throw ConfigError("unknown mode '" + sim_mode + "'");
            options.seed = seed;
            options.horizon_days = sim_days >= 0 ? sim_days : world.mobility.hours / 24;
            VaccinePlan plan;
            const bool have_plan = !sim_plan.empty();
            if (have_plan) plan = load_plan(sim_plan, world);
            const auto result = run(world, parse_model_kind(sim_model),
                                    have_plan ? &plan : nullptr, options);
            fs::create_directories(out);
            save_daily_deaths(result.daily_deaths, join_path(out, "daily_deaths.csv"));
            save_per_community(result.per_community_cumulative_deaths,
                               result.per_community_cumulative_infections, world,
                               join_path(out, "per_community.csv"));
        } else if (*cal_cmd) {
            const auto world = load_world(cal_world);
            CalibrationSpec spec;
            if (cal_grid.empty()) {
                spec = default_calibration_spec(world);
            } else {
                const auto t = csv::read_table(cal_grid);
                const int name_col = t.require_column("param");
                const int min_col = t.require_column("min");
                const int max_col = t.require_column("max");
                const int steps_col = t.require_column("steps");
                for (std::size_t r = 0; r < t.rows.size(); ++r)
                    spec.search_space.push_back(
                        {t.rows[r][static_cast<std::size_t>(name_col)],
                         csv::parse_double(t, r, min_col), csv::parse_double(t, r, max_col),
                         static_cast<int>(csv::parse_long(t, r, steps_col))});
            }
            spec.acceptance_band = cal_band;
            spec.max_evaluations = cal_samples;
            spec.seed = seed;
            spec.threads = threads;
            const auto report = calibrate(world, parse_model_kind(cal_model), spec);
            fs::create_directories(out);
            {
                csv::Writer w(join_path(out, "calibration_report.csv"));
                std::vector<std::string> header{"rank", "nrmse"};
                for (const auto& range : spec.search_space) header.push_back(range.name);
                w.row(header);
                for (std::size_t i = 0; i < report.band_members.size(); ++i) {
                    const auto& member = report.band_members[i];
                    std::vector<std::string> row{std::to_string(i),
                                                 csv::format_double(member.nrmse)};
                    for (const auto& range : spec.search_space)
                        row.push_back(
                            csv::format_double(get_param(member.params, range.name)));
                    w.row(row);
                }
                w.close();
            }
            {
                csv::Writer w(join_path(out, "calibration_envelope.csv"));
                w.row({"day", "band_min", "band_max", "best"});
                for (std::size_t d = 0; d < report.band_envelope.size(); ++d)
                    w.row({std::to_string(d),
                           csv::format_double(report.band_envelope[d].first),
                           csv::format_double(report.band_envelope[d].second),
                           csv::format_double(report.best_predicted[d])});
                w.close();
            }
            std::cout << "best nrmse " << report.best_nrmse << " over "
                      << report.n_evaluated << " evaluations, band of "
                      << report.band_members.size() << "\n";
        } else if (*plan_cmd) {
            const auto world = load_world(plan_world);
            const auto kind =
                resolve_strategy(plan_strategy, world, plan_weights, plan_coverage);
            const auto scenario = AcceptanceScenario::parse(plan_scenario);
            const auto plan = make_plan(world, kind, plan_budget, scenario, plan_day, seed,
                                        plan_stochastic);
            fs::create_directories(out);
            save_plan(plan, world, join_path(out, "plan.csv"));
            if (plan.shortfall)
                std::cout << "warning: acceptance caps made the budget unsatisfiable\n";
        } else if (*eval_cmd) {
            const auto world = load_world(eval_world);
            SimulationResult vacc, base;
            load_per_community(eval_vacc, world, vacc.per_community_cumulative_deaths,
                               vacc.per_community_cumulative_infections);
            load_per_community(eval_base, world, base.per_community_cumulative_deaths,
                               base.per_community_cumulative_infections);
            const auto report = evaluate_outcome(vacc, base, world, eval_groups);
            fs::create_directories(out);
            csv::Writer w(join_path(out, "outcome_report.csv"));
            w.row({"metric", "value"});
            w.row({"utility_change", csv::format_double(report.utility_change)});
            w.row({"equity_change_age", csv::format_double(report.equity_change_age)});
            w.row({"equity_change_income", csv::format_double(report.equity_change_income)});
            w.row({"equity_change_occupation",
                   csv::format_double(report.equity_change_occupation)});
            w.row({"overall_performance", csv::format_double(report.overall_performance)});
            w.close();
        } else if (*idx_cmd) {
            const auto world = load_world(idx_world);
            const int days = idx_days >= 0 ? idx_days : world.mobility.hours / 24;
            const auto table = build_index_table(world, days);
            fs::create_directories(out);
            save_index_table(table, join_path(out, "index_table.csv"));
        } else if (*reg_cmd) {
            const auto world = load_world(reg_world);
            const auto study =
                index_ablation_study(world, reg_instances, reg_coverage, seed, threads);
            fs::create_directories(out);
            csv::Writer w(join_path(out, "regression_report.csv"));
            w.row({"target", "model", "key", "value"});
            for (const auto& pair : study) {
                for (const auto* fit : {&pair.demographics_only, &pair.with_index}) {
                    const std::string model =
                        fit == &pair.demographics_only ? "demographics"
                                                       : "demographics_plus_index";
                    w.row({pair.target, model, "adjusted_r2",
                           csv::format_double(fit->adjusted_r2)});
                    w.row({pair.target, model, "r2", csv::format_double(fit->r2)});
                    w.row({pair.target, model, "intercept",
                           csv::format_double(fit->intercept)});
                    for (std::size_t f = 0; f < fit->feature_names.size(); ++f)
                        w.row({pair.target, model, "coef_" + fit->feature_names[f],
                               csv::format_double(fit->coefficients[f])});
                }
            }
            w.close();
        } else if (*learn_cmd) {
            const auto world = load_world(learn_world);
            const auto scenario = AcceptanceScenario::parse(learn_scenario);
            const auto learned = learn_weights(world, learn_budget, scenario,
                                               learn_candidates, seed, learn_ablation,
                                               threads, learn_day);
            fs::create_directories(out);
            csv::Writer w(join_path(out, "weights.csv"));
            w.row({"feature", "weight"});
            for (std::size_t f = 0; f < kComprehensiveFeatureCount; ++f)
                w.row({kComprehensiveFeatureNames[f],
                       csv::format_double(learned.weights[f])});
            w.close();
            std::cout << "overall performance " << learned.overall_performance << " over "
                      << learned.n_candidates << " candidates\n";
        } else if (*sweep_cmd) {
            auto config = parse_experiment_config(sweep_config);
            if (app.count("--seed")) config.seed = seed;
            run_experiment(config, out, threads);
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const ValidationError& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    }
    return 0;
}
