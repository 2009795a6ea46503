#ifndef BDSIM_EXPERIMENT_HPP
#define BDSIM_EXPERIMENT_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bdsim/engine.hpp"
#include "bdsim/strategies.hpp"
#include "bdsim/synthworld.hpp"
#include "bdsim/types.hpp"

namespace bdsim {

// Parsed from a flat key=value file; lists are comma-separated.
struct ExperimentConfig {
    std::string world_path;  // empty means synthesize
    SynthConfig synth = default_synth_config();
    ModelKind model = ModelKind::BD;
    std::vector<std::string> strategy_names;
    std::vector<double> budgets;
    std::vector<int> timings{0};
    std::string scenario_text = "none";
    SimMode mode = SimMode::Deterministic;
    std::uint64_t seed = 1;
    int n_groups = 5;
    int learn_candidates = 128;
    int regress_instances = 0;  // 0 skips the regression table
    double regress_coverage = 0.02;
    std::string weights_path;   // optional fixed weights for comprehensive
    std::string coverage_path;  // optional real-world coverage table
};

ExperimentConfig parse_experiment_config(const std::string& path);

// Runs the full (strategy x budget x timing) grid and writes
// sweep_results.csv, vs_homogeneous.csv, fig1_daily_curves.csv,
// fig1_group_mortality.csv, optional fig3_regression.csv, weights files and
// manifest.csv into out_dir. Any cell failure aborts with the offending
// cell named after partial results and the manifest are flushed.
void run_experiment(const ExperimentConfig& config, const std::string& out_dir,
                    int threads);

std::vector<std::string> parse_list(const std::string& text);

}  // namespace bdsim

#endif
