#ifndef BDSIM_ENGINE_HPP
#define BDSIM_ENGINE_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "bdsim/rng.hpp"
#include "bdsim/types.hpp"

namespace bdsim {

// BD couples per-community SEIR dynamics through the hourly community-POI
// visit network with demography-adjusted IFRs. MetaPopulation keeps the
// mobility coupling but applies one population-averaged IFR everywhere.
// HomogeneousSEIR ignores the mobility tensor and mixes the whole
// population uniformly at the base rate.
enum class ModelKind { BD, MetaPopulation, HomogeneousSEIR };

ModelKind parse_model_kind(const std::string& name);
const char* model_kind_name(ModelKind kind);

enum class SimMode { Deterministic, Stochastic };

struct RunOptions {
    SimMode mode = SimMode::Deterministic;
    std::uint64_t seed = 0;
    int horizon_days = 0;
    // When set, replaces world.params for this run (calibration candidates
    // reuse one immutable world instead of copying it). Must outlive the run.
    const EpidemicParams* params_override = nullptr;
};

struct SimulationResult {
    std::vector<double> daily_deaths;
    std::vector<double> per_community_cumulative_deaths;
    std::vector<double> per_community_cumulative_infections;
    CompartmentState final_state;
    // Time averages over the run, used by the outcome indices.
    std::vector<double> mean_infectious_share;
    std::vector<double> mean_susceptible_share;

    double total_deaths() const {
        double t = 0.0;
        for (double d : per_community_cumulative_deaths) t += d;
        return t;
    }
};

// Demography-adjusted infection fatality rate: dot(age_fractions, ifr_by_age).
double community_ifr(const Community& community, const EpidemicParams& params);

// Population-weighted mean of community_ifr over the world.
double average_ifr(const World& world);

// One simulation run. Owns the compartment state and the pending-death
// queue; the world stays immutable and shareable.
class Simulator {
public:
    Simulator(const World& world, ModelKind kind, SimMode mode, std::uint64_t seed,
              const EpidemicParams* params_override = nullptr);

    // Moves initial_infected_fraction of each community from S to E.
    void seed_initial_infections();

    // Moves vaccine_efficacy * fraction[c] of the current susceptibles of
    // each community to vaccinated_immune.
    void apply_vaccination(const std::vector<double>& fraction);

    // One hour of dynamics: POI exposures, within-community exposures,
    // E->I and I->R progressions, delayed death accounting.
    // Returns deaths accounted in this hour.
    double step_hour(int hour);

    const CompartmentState& state() const { return state_; }
    CompartmentState& mutable_state() { return state_; }

    const std::vector<double>& cumulative_infections() const { return cum_infections_; }
    const std::vector<double>& effective_ifr() const { return ifr_eff_; }

    // Count of numerically clamped flows; 0 in every healthy run.
    long clamp_events() const { return clamp_events_; }

private:
    double draw_flow(double source, double expected);

    const World& world_;
    const EpidemicParams& params_;
    ModelKind kind_;
    SimMode mode_;
    Rng rng_;
    CompartmentState state_;
    std::vector<double> population_;
    std::vector<double> ifr_eff_;
    std::vector<double> poi_factor_;  // dwell_time / area per POI
    std::vector<double> cum_infections_;
    // Scratch buffers reused every hour.
    std::vector<double> prevalence_;
    std::vector<double> poi_visits_;
    std::vector<double> poi_exposure_;
    // Deaths awaiting accounting, ring-buffered by hour.
    std::vector<double> pending_deaths_;
    int delay_hours_ = 0;
    int ring_size_ = 1;
    long clamp_events_ = 0;
};

// Full run: seeds infections, applies the plan at its administration day,
// iterates step_hour for horizon_days, aggregates daily deaths.
SimulationResult run(const World& world, ModelKind kind, const VaccinePlan* plan,
                     const RunOptions& options);

// Communities sorted by the dimension's feature and split into
// population-balanced quantile groups; returns per-group deaths/population,
// ordered from lowest to highest feature value.
std::vector<double> mortality_rate_by_group(const std::vector<double>& per_community_deaths,
                                            const World& world, Dimension dimension,
                                            int n_groups);
std::vector<double> mortality_rate_by_group(const SimulationResult& result,
                                            const World& world, Dimension dimension,
                                            int n_groups);

}  // namespace bdsim

#endif
