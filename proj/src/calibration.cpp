#include "bdsim/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "bdsim/errors.hpp"
#include "bdsim/parallel.hpp"
#include "bdsim/rng.hpp"
#include "bdsim/stats.hpp"

namespace bdsim {

double nrmse(const std::vector<double>& predicted, const std::vector<double>& observed) {
    if (predicted.size() != observed.size())
        throw ValidationError("nrmse: series lengths differ");
    if (observed.empty()) throw ValidationError("nrmse: empty series");
    const double mean_observed = stats::mean(observed);
    if (mean_observed <= 0.0)
        throw ValidationError("nrmse: observed mean must be > 0");
    double sq = 0.0;
    for (std::size_t i = 0; i < observed.size(); ++i) {
        const double d = predicted[i] - observed[i];
        sq += d * d;
    }
    return std::sqrt(sq / static_cast<double>(observed.size())) / mean_observed;
}

void set_param(EpidemicParams& params, const std::string& name, double value) {
    if (name == "beta_poi") params.beta_poi = value;
    else if (name == "beta_base") params.beta_base = value;
    else if (name == "latency_period") params.latency_period = value;
    else if (name == "infectious_period") params.infectious_period = value;
    else if (name == "initial_infected_fraction") params.initial_infected_fraction = value;
    else if (name == "death_delay") params.death_delay = value;
    else if (name == "vaccine_efficacy") params.vaccine_efficacy = value;
    else throw ConfigError("unknown calibration parameter '" + name + "'");
}

double get_param(const EpidemicParams& params, const std::string& name) {
    if (name == "beta_poi") return params.beta_poi;
    if (name == "beta_base") return params.beta_base;
    if (name == "latency_period") return params.latency_period;
    if (name == "infectious_period") return params.infectious_period;
    if (name == "initial_infected_fraction") return params.initial_infected_fraction;
    if (name == "death_delay") return params.death_delay;
    if (name == "vaccine_efficacy") return params.vaccine_efficacy;
    throw ConfigError("unknown calibration parameter '" + name + "'");
}

CalibrationSpec default_calibration_spec(const World& world) {
    CalibrationSpec spec;
    const auto& p = world.params;
    auto bracket = [](double v) { return v > 0.0 ? v : 0.1; };
    spec.search_space.push_back({"beta_poi", 0.25 * bracket(p.beta_poi), 2.5 * bracket(p.beta_poi), 10});
    spec.search_space.push_back({"beta_base", 0.25 * bracket(p.beta_base), 2.5 * bracket(p.beta_base), 10});
    spec.search_space.push_back({"initial_infected_fraction",
                                 0.25 * bracket(p.initial_infected_fraction),
                                 2.5 * bracket(p.initial_infected_fraction), 10});
    return spec;
}

namespace {

std::vector<std::vector<double>> enumerate_points(const CalibrationSpec& spec) {
    if (spec.search_space.empty())
        throw ConfigError("calibrate: empty search space");
    for (const auto& range : spec.search_space) {
        if (!(range.min <= range.max))
            throw ConfigError("calibrate: parameter " + range.name + " has min > max");
        if (range.steps < 0)
            throw ConfigError("calibrate: parameter " + range.name + " has negative steps");
    }
    const bool full_grid = std::all_of(spec.search_space.begin(), spec.search_space.end(),
                                       [](const ParamRange& r) { return r.steps >= 1; });
    std::vector<std::vector<double>> points;
    if (full_grid) {
        std::vector<double> current(spec.search_space.size(), 0.0);
        // Odometer over the Cartesian grid, last parameter fastest.
        std::vector<int> counter(spec.search_space.size(), 0);
        for (;;) {
            for (std::size_t d = 0; d < spec.search_space.size(); ++d) {
                const auto& r = spec.search_space[d];
                current[d] = r.steps == 1
                                 ? r.min
                                 : r.min + (r.max - r.min) * counter[d] / (r.steps - 1);
            }
            points.push_back(current);
            std::size_t d = spec.search_space.size();
            while (d > 0) {
                --d;
                if (++counter[d] < spec.search_space[d].steps) break;
                counter[d] = 0;
                if (d == 0) return points;
            }
        }
    }
    if (spec.max_evaluations < 1)
        throw ConfigError("calibrate: sampled search needs max_evaluations >= 1");
    Rng rng(mix_seed(spec.seed, 0xCA71Bu));
    for (int i = 0; i < spec.max_evaluations; ++i) {
        std::vector<double> point;
        point.reserve(spec.search_space.size());
        for (const auto& r : spec.search_space) point.push_back(rng.uniform(r.min, r.max));
        points.push_back(std::move(point));
    }
    return points;
}

}  // namespace

CalibrationReport calibrate(const World& world, ModelKind kind, const CalibrationSpec& spec) {
    if (!world.observed_daily_deaths)
        throw ConfigError("calibrate: world has no observed daily deaths");
    if (spec.acceptance_band < 1.0)
        throw ConfigError("calibrate: acceptance band must be >= 1");
    const auto& observed = *world.observed_daily_deaths;
    const int horizon_days = static_cast<int>(observed.size());
    if (horizon_days < 1) throw ConfigError("calibrate: observed series is empty");
    if (kind != ModelKind::HomogeneousSEIR && horizon_days * 24 > world.mobility.hours)
        throw ConfigError("calibrate: observed series longer than mobility data");

    const auto points = enumerate_points(spec);
    std::vector<double> scores(points.size());
    std::vector<std::vector<double>> predictions(points.size());

    parallel_for(points.size(), spec.threads, [&](std::size_t i) {
        EpidemicParams candidate = world.params;
        for (std::size_t d = 0; d < spec.search_space.size(); ++d)
            set_param(candidate, spec.search_space[d].name, points[i][d]);
        RunOptions options;
        options.mode = SimMode::Deterministic;
        options.horizon_days = horizon_days;
        options.params_override = &candidate;
        const auto result = run(world, kind, nullptr, options);
        predictions[i] = result.daily_deaths;
        scores[i] = nrmse(result.daily_deaths, observed);
    });

    std::size_t best = 0;
    for (std::size_t i = 1; i < points.size(); ++i)
        if (scores[i] < scores[best]) best = i;

    CalibrationReport report;
    report.n_evaluated = points.size();
    report.best_nrmse = scores[best];
    report.best_predicted = predictions[best];
    report.best_params = world.params;
    for (std::size_t d = 0; d < spec.search_space.size(); ++d)
        set_param(report.best_params, spec.search_space[d].name, points[best][d]);

    report.band_envelope.assign(static_cast<std::size_t>(horizon_days),
                                {std::numeric_limits<double>::infinity(),
                                 -std::numeric_limits<double>::infinity()});
    const double cutoff = spec.acceptance_band * report.best_nrmse;
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (scores[i] > cutoff) continue;
        CalibrationMember member;
        member.params = world.params;
        for (std::size_t d = 0; d < spec.search_space.size(); ++d)
            set_param(member.params, spec.search_space[d].name, points[i][d]);
        member.nrmse = scores[i];
        report.band_members.push_back(std::move(member));
        for (int day = 0; day < horizon_days; ++day) {
            auto& [lo, hi] = report.band_envelope[static_cast<std::size_t>(day)];
            lo = std::min(lo, predictions[i][static_cast<std::size_t>(day)]);
            hi = std::max(hi, predictions[i][static_cast<std::size_t>(day)]);
        }
    }
    return report;
}

}  // namespace bdsim
