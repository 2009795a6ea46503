#include "bdsim/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "bdsim/analysis.hpp"
#include "bdsim/csv.hpp"
#include "bdsim/errors.hpp"
#include "bdsim/metrics.hpp"
#include "bdsim/parallel.hpp"
#include "bdsim/rng.hpp"
#include "bdsim/world_io.hpp"

namespace bdsim {

namespace fs = std::filesystem;

std::vector<std::string> parse_list(const std::string& text) {
    std::vector<std::string> out;
    std::string item;
    std::stringstream ss(text);
    while (std::getline(ss, item, ',')) {
        // Trim surrounding blanks.
        const auto first = item.find_first_not_of(" \t");
        const auto last = item.find_last_not_of(" \t");
        if (first == std::string::npos) continue;
        out.push_back(item.substr(first, last - first + 1));
    }
    return out;
}

namespace {

double to_double(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        const double v = std::stod(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("experiment config: key '" + key + "' has non-numeric value '" +
                          value + "'");
    }
}

long to_long(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        const long v = std::stol(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("experiment config: key '" + key + "' has non-integer value '" +
                          value + "'");
    }
}

// FNV-1a over the canonical text form, so hashes are stable across runs
// and thread counts.
std::string series_hash(const std::vector<double>& series) {
    std::uint64_t h = 1469598103934665603ULL;
    for (double v : series) {
        for (const char ch : csv::format_double(v)) {
            h ^= static_cast<unsigned char>(ch);
            h *= 1099511628211ULL;
        }
        h ^= static_cast<unsigned char>(';');
        h *= 1099511628211ULL;
    }
    std::ostringstream out;
    out << std::hex << h;
    return out.str();
}

std::array<double, 5> load_coverage_table(const std::string& path) {
    const auto t = csv::read_table(path);
    const int col = t.require_column("coverage");
    if (t.rows.size() != 5)
        throw ConfigError("coverage table must have exactly 5 rows (bottom to top "
                          "income quintile)");
    std::array<double, 5> table{};
    for (std::size_t r = 0; r < 5; ++r) table[r] = csv::parse_double(t, r, col);
    return table;
}

std::vector<double> load_weights(const std::string& path) {
    const auto t = csv::read_table(path);
    const int feature_col = t.require_column("feature");
    const int weight_col = t.require_column("weight");
    std::vector<double> weights(kComprehensiveFeatureCount, 0.0);
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        const auto& name = t.rows[r][static_cast<std::size_t>(feature_col)];
        bool found = false;
        for (std::size_t f = 0; f < kComprehensiveFeatureCount; ++f) {
            if (name == kComprehensiveFeatureNames[f]) {
                weights[f] = csv::parse_double(t, r, weight_col);
                found = true;
                break;
            }
        }
        if (!found)
            throw ConfigError(path + ": unknown weight feature '" + name + "'");
    }
    return weights;
}

void save_weights(const std::vector<double>& weights, const std::string& path) {
    csv::Writer w(path);
    w.row({"feature", "weight"});
    for (std::size_t f = 0; f < kComprehensiveFeatureCount; ++f)
        w.row({kComprehensiveFeatureNames[f], csv::format_double(weights[f])});
    w.close();
}

}  // namespace

ExperimentConfig parse_experiment_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    ExperimentConfig config;
    config.synth = default_synth_config();
    std::map<std::string, std::string> kv;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            if (line.find_first_not_of(" \t\r") != std::string::npos)
                throw ConfigError(path + ":" + std::to_string(lineno) +
                                  ": expected key=value");
            continue;
        }
        auto trim = [](std::string s) {
            const auto first = s.find_first_not_of(" \t\r");
            const auto last = s.find_last_not_of(" \t\r");
            return first == std::string::npos ? std::string{}
                                              : s.substr(first, last - first + 1);
        };
        kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }

    for (const auto& [key, value] : kv) {
        if (key == "world") config.world_path = value == "synth" ? "" : value;
        else if (key == "synth_communities") config.synth.n_communities = static_cast<int>(to_long(key, value));
        else if (key == "synth_pois") config.synth.n_pois = static_cast<int>(to_long(key, value));
        else if (key == "synth_days") config.synth.horizon_days = static_cast<int>(to_long(key, value));
        else if (key == "synth_seed") config.synth.seed = static_cast<std::uint64_t>(to_long(key, value));
        else if (key == "synth_population_min") config.synth.population_min = to_double(key, value);
        else if (key == "synth_population_max") config.synth.population_max = to_double(key, value);
        else if (key == "model") config.model = parse_model_kind(value);
        else if (key == "strategies") config.strategy_names = parse_list(value);
        else if (key == "budgets") {
            for (const auto& item : parse_list(value))
                config.budgets.push_back(to_double(key, item));
        } else if (key == "timings") {
            config.timings.clear();
            for (const auto& item : parse_list(value))
                config.timings.push_back(static_cast<int>(to_long(key, item)));
        } else if (key == "scenario") config.scenario_text = value;
        else if (key == "mode") {
            if (value == "deterministic") config.mode = SimMode::Deterministic;
            else if (value == "stochastic") config.mode = SimMode::Stochastic;
            else throw ConfigError("experiment config: unknown mode '" + value + "'");
        } else if (key == "seed") config.seed = static_cast<std::uint64_t>(to_long(key, value));
        else if (key == "groups") config.n_groups = static_cast<int>(to_long(key, value));
        else if (key == "learn_candidates") config.learn_candidates = static_cast<int>(to_long(key, value));
        else if (key == "regress_instances") config.regress_instances = static_cast<int>(to_long(key, value));
        else if (key == "regress_coverage") config.regress_coverage = to_double(key, value);
        else if (key == "weights") config.weights_path = value;
        else if (key == "real_world_coverage") config.coverage_path = value;
        else throw ConfigError(path + ": unknown key '" + key + "'");
    }

    if (config.strategy_names.empty())
        throw ConfigError(path + ": 'strategies' must list at least one strategy");
    if (config.budgets.empty())
        throw ConfigError(path + ": 'budgets' must list at least one budget");
    for (const double b : config.budgets)
        if (b < 0.0 || b > 1.0)
            throw ConfigError(path + ": budgets must be in [0,1]");
    for (const int t : config.timings)
        if (t < 0) throw ConfigError(path + ": timings must be >= 0");
    return config;
}

void run_experiment(const ExperimentConfig& config, const std::string& out_dir,
                    int threads) {
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw IoError("cannot create directory " + out_dir + ": " + ec.message());
    auto out_path = [&](const char* file) { return (fs::path(out_dir) / file).string(); };

    const World world = config.world_path.empty() ? generate_world(config.synth)
                                                  : load_world(config.world_path);
    const int horizon_days = world.mobility.hours / 24;
    const auto scenario = AcceptanceScenario::parse(config.scenario_text);
    const bool stochastic_plan = config.mode == SimMode::Stochastic;

    // Resolve strategies. Comprehensive variants share one index table and
    // take weights from the config file or a fresh learning pass at the
    // first (budget, timing).
    std::vector<StrategyKind> kinds;
    std::shared_ptr<const IndexTable> table;
    auto need_table = [&]() {
        if (!table)
            table = std::make_shared<const IndexTable>(
                build_index_table(world, horizon_days));
        return table;
    };
    for (const auto& name : config.strategy_names) {
        if (name == "homogeneous") kinds.push_back(StrategyKind::homogeneous());
        else if (name == "prioritize_age") kinds.push_back(StrategyKind::prioritize(Dimension::Age));
        else if (name == "prioritize_income") kinds.push_back(StrategyKind::prioritize(Dimension::Income));
        else if (name == "prioritize_occupation") kinds.push_back(StrategyKind::prioritize(Dimension::Occupation));
        else if (name == "reverse_age") kinds.push_back(StrategyKind::reverse(Dimension::Age));
        else if (name == "reverse_income") kinds.push_back(StrategyKind::reverse(Dimension::Income));
        else if (name == "reverse_occupation") kinds.push_back(StrategyKind::reverse(Dimension::Occupation));
        else if (name == "svi") kinds.push_back(StrategyKind::svi_informed());
        else if (name == "real_world") {
            std::array<double, 5> coverage{1.0, 1.0, 1.0, 1.0, 1.0};
            if (!config.coverage_path.empty())
                coverage = load_coverage_table(config.coverage_path);
            kinds.push_back(StrategyKind::real_world(coverage));
        } else if (name == "comprehensive" || name == "comprehensive_ablation") {
            const bool ablation = name == "comprehensive_ablation";
            std::vector<double> weights;
            if (!config.weights_path.empty()) {
                weights = load_weights(config.weights_path);
            } else {
                const auto learned = learn_weights(
                    world, config.budgets.front(), scenario, config.learn_candidates,
                    config.seed, ablation, threads, config.timings.front(),
                    config.n_groups);
                weights = learned.weights;
                save_weights(weights, out_path(ablation ? "weights_ablation.csv"
                                                        : "weights.csv"));
            }
            kinds.push_back(ablation
                                ? StrategyKind::comprehensive_ablation(weights, need_table())
                                : StrategyKind::comprehensive(weights, need_table()));
        } else {
            throw ConfigError("unknown strategy '" + name + "'");
        }
    }

    // Figure-1 analogues: unvaccinated daily curves and group mortality
    // rates for the three model kinds.
    {
        csv::Writer curves(out_path("fig1_daily_curves.csv"));
        curves.row({"model", "day", "deaths"});
        csv::Writer rates(out_path("fig1_group_mortality.csv"));
        rates.row({"model", "dimension", "group", "rate"});
        for (const ModelKind kind :
             {ModelKind::BD, ModelKind::MetaPopulation, ModelKind::HomogeneousSEIR}) {
            RunOptions options;
            options.mode = config.mode;
            options.seed = mix_seed(config.seed, 0xF16'1000u);
            options.horizon_days = horizon_days;
            const auto result = run(world, kind, nullptr, options);
            for (int d = 0; d < horizon_days; ++d)
                curves.row({model_kind_name(kind), std::to_string(d),
                            csv::format_double(result.daily_deaths[static_cast<std::size_t>(d)])});
            for (const Dimension dim :
                 {Dimension::Age, Dimension::Income, Dimension::Occupation}) {
                const auto group_rates =
                    mortality_rate_by_group(result, world, dim, config.n_groups);
                for (std::size_t g = 0; g < group_rates.size(); ++g)
                    rates.row({model_kind_name(kind), dimension_name(dim),
                               std::to_string(g), csv::format_double(group_rates[g])});
            }
        }
        curves.close();
        rates.close();
    }

    // Shared unvaccinated baseline per timing.
    std::vector<SimulationResult> baselines(config.timings.size());
    std::vector<std::string> baseline_hashes(config.timings.size());
    for (std::size_t t = 0; t < config.timings.size(); ++t) {
        RunOptions options;
        options.mode = config.mode;
        options.seed = mix_seed(config.seed, 0xBA5E'0000u + t);
        options.horizon_days = horizon_days;
        baselines[t] = run(world, config.model, nullptr, options);
        baseline_hashes[t] = series_hash(baselines[t].daily_deaths);
    }

    struct Cell {
        std::size_t strategy, budget, timing;
        OutcomeReport report;
        bool done = false;
        std::string error;
    };
    std::vector<Cell> cells;
    for (std::size_t s = 0; s < kinds.size(); ++s)
        for (std::size_t b = 0; b < config.budgets.size(); ++b)
            for (std::size_t t = 0; t < config.timings.size(); ++t)
                cells.push_back({s, b, t, {}, false, {}});

    std::string first_error;
    try {
        parallel_for(cells.size(), threads, [&](std::size_t i) {
            auto& cell = cells[i];
            try {
                const auto plan = make_plan(world, kinds[cell.strategy],
                                            config.budgets[cell.budget], scenario,
                                            config.timings[cell.timing],
                                            mix_seed(config.seed, 0xCE11'0000u + i),
                                            stochastic_plan);
                RunOptions options;
                options.mode = config.mode;
                options.seed = mix_seed(config.seed, 0xCE11'0000u + i);
                options.horizon_days = horizon_days;
                const auto result = run(world, config.model, &plan, options);
                cell.report = evaluate_outcome(result, baselines[cell.timing], world,
                                               config.n_groups);
                cell.done = true;
            } catch (const std::exception& e) {
                cell.error = e.what();
                throw;  // stops scheduling further cells
            }
        });
    } catch (...) {
        // Partial results and the manifest still get written below; the
        // failure is re-raised afterwards with the offending cell named.
    }

    // Results, written in deterministic grid order.
    {
        csv::Writer w(out_path("sweep_results.csv"));
        w.row({"strategy", "budget", "timing", "metric", "value"});
        const char* metric_names[] = {"utility_change", "equity_change_age",
                                      "equity_change_income", "equity_change_occupation",
                                      "overall_performance"};
        for (const auto& cell : cells) {
            if (!cell.done) continue;
            const double values[] = {cell.report.utility_change,
                                     cell.report.equity_change_age,
                                     cell.report.equity_change_income,
                                     cell.report.equity_change_occupation,
                                     cell.report.overall_performance};
            for (int m = 0; m < 5; ++m)
                w.row({kinds[cell.strategy].name(),
                       csv::format_double(config.budgets[cell.budget]),
                       std::to_string(config.timings[cell.timing]), metric_names[m],
                       csv::format_double(values[m])});
        }
        w.close();
    }

    // Differences against the Homogeneous row of the same (budget, timing).
    {
        std::ptrdiff_t homogeneous = -1;
        for (std::size_t s = 0; s < kinds.size(); ++s)
            if (kinds[s].family == StrategyFamily::Homogeneous)
                homogeneous = static_cast<std::ptrdiff_t>(s);
        if (homogeneous >= 0) {
            auto cell_at = [&](std::size_t s, std::size_t b,
                               std::size_t t) -> const Cell& {
                return cells[(s * config.budgets.size() + b) * config.timings.size() + t];
            };
            csv::Writer w(out_path("vs_homogeneous.csv"));
            w.row({"strategy", "budget", "timing", "metric", "value"});
            const char* metric_names[] = {"utility_change", "equity_change_age",
                                          "equity_change_income",
                                          "equity_change_occupation",
                                          "overall_performance"};
            for (const auto& cell : cells) {
                if (!cell.done) continue;
                const auto& base =
                    cell_at(static_cast<std::size_t>(homogeneous), cell.budget, cell.timing);
                if (!base.done) continue;
                const double deltas[] = {
                    cell.report.utility_change - base.report.utility_change,
                    cell.report.equity_change_age - base.report.equity_change_age,
                    cell.report.equity_change_income - base.report.equity_change_income,
                    cell.report.equity_change_occupation -
                        base.report.equity_change_occupation,
                    cell.report.overall_performance - base.report.overall_performance};
                for (int m = 0; m < 5; ++m)
                    w.row({kinds[cell.strategy].name(),
                           csv::format_double(config.budgets[cell.budget]),
                           std::to_string(config.timings[cell.timing]), metric_names[m],
                           csv::format_double(deltas[m])});
            }
            w.close();
        }
    }

    bool any_failed = false;
    for (const auto& cell : cells) any_failed = any_failed || !cell.error.empty();

    if (config.regress_instances > 0 && !any_failed) {
        const auto study =
            index_ablation_study(world, config.regress_instances, config.regress_coverage,
                                 config.seed, threads, config.n_groups);
        csv::Writer w(out_path("fig3_regression.csv"));
        w.row({"target", "model", "adjusted_r2"});
        for (const auto& pair : study) {
            w.row({pair.target, "demographics",
                   csv::format_double(pair.demographics_only.adjusted_r2)});
            w.row({pair.target, "demographics_plus_index",
                   csv::format_double(pair.with_index.adjusted_r2)});
        }
        w.close();
    }

    // Manifest last: it records completion state of everything above.
    {
        csv::Writer w(out_path("manifest.csv"));
        w.row({"item", "status", "hash"});
        for (std::size_t t = 0; t < config.timings.size(); ++t)
            w.row({"baseline_timing_" + std::to_string(config.timings[t]), "ok",
                   baseline_hashes[t]});
        for (const auto& cell : cells) {
            const std::string item = "cell_" + kinds[cell.strategy].name() + "_" +
                                     csv::format_double(config.budgets[cell.budget]) +
                                     "_" + std::to_string(config.timings[cell.timing]);
            if (cell.done) {
                w.row({item, "ok", ""});
            } else if (!cell.error.empty()) {
                w.row({item, "failed", ""});
                if (first_error.empty())
                    first_error = "cell (" + kinds[cell.strategy].name() + ", " +
                                  csv::format_double(config.budgets[cell.budget]) + ", " +
                                  std::to_string(config.timings[cell.timing]) +
                                  ") failed: " + cell.error;
            } else {
                w.row({item, "skipped", ""});
            }
        }
        w.close();
    }
    if (!first_error.empty()) throw std::runtime_error(first_error);
}

}  // namespace bdsim
