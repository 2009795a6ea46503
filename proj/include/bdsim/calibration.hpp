#ifndef BDSIM_CALIBRATION_HPP
#define BDSIM_CALIBRATION_HPP

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "bdsim/engine.hpp"
#include "bdsim/types.hpp"

namespace bdsim {

// One searched parameter. steps >= 1 places that many evenly spaced values
// including both endpoints (steps == 1 uses min); steps == 0 switches the
// whole search to seeded uniform sampling with max_evaluations draws.
struct ParamRange {
    std::string name;
    double min = 0.0;
    double max = 0.0;
    int steps = 0;
};

struct CalibrationSpec {
    std::vector<ParamRange> search_space;
    double acceptance_band = 1.5;  // members satisfy nrmse <= band * best
    int max_evaluations = 1000;    // only for sampled search
    std::uint64_t seed = 0;
    int threads = 1;
};

struct CalibrationMember {
    EpidemicParams params;
    double nrmse = 0.0;
};

struct CalibrationReport {
    EpidemicParams best_params;
    double best_nrmse = 0.0;
    std::vector<double> best_predicted;
    std::vector<CalibrationMember> band_members;
    std::vector<std::pair<double, double>> band_envelope;  // per-day (min, max)
    std::size_t n_evaluated = 0;
};

// RMSE divided by the mean of the observed series.
double nrmse(const std::vector<double>& predicted, const std::vector<double>& observed);

// Get/set a calibratable EpidemicParams field by name; unknown name is a
// configuration error.
void set_param(EpidemicParams& params, const std::string& name, double value);
double get_param(const EpidemicParams& params, const std::string& name);

// Deterministic grid/random search against world.observed_daily_deaths.
CalibrationReport calibrate(const World& world, ModelKind kind, const CalibrationSpec& spec);

// Default 10x10x10 grid over beta_poi, beta_base, initial_infected_fraction
// bracketing the world's current values.
CalibrationSpec default_calibration_spec(const World& world);

}  // namespace bdsim

#endif
