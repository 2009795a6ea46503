#include "bdsim/engine.hpp"

#include <algorithm>
#include <cmath>

#include "bdsim/errors.hpp"
#include "bdsim/stats.hpp"

namespace bdsim {

ModelKind parse_model_kind(const std::string& name) {
    if (name == "bd") return ModelKind::BD;
    if (name == "metapop") return ModelKind::MetaPopulation;
    if (name == "seir") return ModelKind::HomogeneousSEIR;
    throw ConfigError("unknown model '" + name + "' (expected bd, metapop or seir)");
}

const char* model_kind_name(ModelKind kind) {
    switch (kind) {
        case ModelKind::BD: return "bd";
        case ModelKind::MetaPopulation: return "metapop";
        case ModelKind::HomogeneousSEIR: return "seir";
    }
    return "?";
}

double community_ifr(const Community& community, const EpidemicParams& params) {
    if (community.age_fractions.size() != params.ifr_by_age.size())
        throw ValidationError("community " + community.id +
                              ": age band count does not match ifr_by_age");
    double ifr = 0.0;
    for (std::size_t b = 0; b < params.ifr_by_age.size(); ++b)
        ifr += community.age_fractions[b] * params.ifr_by_age[b];
    return ifr;
}

double average_ifr(const World& world) {
    double weighted = 0.0, total = 0.0;
    for (const auto& c : world.communities) {
        weighted += c.population * community_ifr(c, world.params);
        total += c.population;
    }
    return total > 0.0 ? weighted / total : 0.0;
}

Simulator::Simulator(const World& world, ModelKind kind, SimMode mode, std::uint64_t seed,
                     const EpidemicParams* params_override)
    : world_(world),
      params_(params_override ? *params_override : world.params),
      kind_(kind),
      mode_(mode),
      rng_(seed) {
    const std::size_t n = world.communities.size();
    state_.susceptible.resize(n);
    state_.exposed.assign(n, 0.0);
    state_.infectious.assign(n, 0.0);
    state_.recovered.assign(n, 0.0);
    state_.vaccinated_immune.assign(n, 0.0);
    state_.cumulative_deaths.assign(n, 0.0);
    population_.resize(n);
    for (std::size_t c = 0; c < n; ++c) {
        population_[c] = world.communities[c].population;
        state_.susceptible[c] = population_[c];
    }

    ifr_eff_.resize(n);
    if (kind == ModelKind::BD) {
        for (std::size_t c = 0; c < n; ++c)
            ifr_eff_[c] = community_ifr(world.communities[c], params_);
    } else {
        double weighted = 0.0, total = 0.0;
        for (const auto& c : world.communities) {
            weighted += c.population * community_ifr(c, params_);
            total += c.population;
        }
        std::fill(ifr_eff_.begin(), ifr_eff_.end(), total > 0.0 ? weighted / total : 0.0);
    }

    poi_factor_.resize(world.pois.size());
    for (std::size_t p = 0; p < world.pois.size(); ++p)
        poi_factor_[p] = world.pois[p].dwell_time / world.pois[p].area;

    cum_infections_.assign(n, 0.0);
    prevalence_.assign(n, 0.0);
    poi_visits_.assign(world.pois.size(), 0.0);
    poi_exposure_.assign(n, 0.0);

    delay_hours_ = static_cast<int>(std::lround(params_.death_delay * 24.0));
    ring_size_ = delay_hours_ + 1;
    pending_deaths_.assign(static_cast<std::size_t>(ring_size_) * n, 0.0);
}

double Simulator::draw_flow(double source, double expected) {
    if (expected < 0.0) {
        ++clamp_events_;
        expected = 0.0;
    }
    if (expected > source) {
        ++clamp_events_;
        expected = source;
    }
    if (mode_ == SimMode::Deterministic) return expected;
    const auto n = static_cast<std::int64_t>(source);
    if (n <= 0) return 0.0;
    const double p = std::min(1.0, expected / static_cast<double>(n));
    return static_cast<double>(rng_.binomial(n, p));
}

void Simulator::seed_initial_infections() {
    const double f = params_.initial_infected_fraction;
    for (std::size_t c = 0; c < state_.size(); ++c) {
        const double seeded = draw_flow(state_.susceptible[c], f * population_[c]);
        state_.susceptible[c] -= seeded;
        state_.exposed[c] += seeded;
        cum_infections_[c] += seeded;
    }
}

void Simulator::apply_vaccination(const std::vector<double>& fraction) {
    const double efficacy = params_.vaccine_efficacy;
    for (std::size_t c = 0; c < state_.size(); ++c) {
        if (fraction[c] <= 0.0) continue;
        const double moved =
            draw_flow(state_.susceptible[c], efficacy * fraction[c] * state_.susceptible[c]);
        state_.susceptible[c] -= moved;
        state_.vaccinated_immune[c] += moved;
    }
}

double Simulator::step_hour(int hour) {
    const std::size_t n = state_.size();
    const auto& params = params_;
    const double rate_ei = 1.0 / (params.latency_period * 24.0);
    const double rate_ir = 1.0 / (params.infectious_period * 24.0);

    for (std::size_t c = 0; c < n; ++c)
        prevalence_[c] = state_.infectious[c] / population_[c];

    const bool use_poi = kind_ != ModelKind::HomogeneousSEIR;
    if (use_poi) {
        if (hour < 0 || hour >= world_.mobility.hours)
            throw ConfigError("step_hour: hour " + std::to_string(hour) +
                              " outside mobility data range");
        const auto& slice = world_.mobility.by_hour[static_cast<std::size_t>(hour)];
        // lambda_p = poi_factor_p * sum_c w[t][c][p] * I_c / N_c
        for (std::size_t k = 0; k < slice.size(); ++k)
            poi_visits_[slice.poi[k]] += slice.weight[k] * prevalence_[slice.community[k]];
        for (std::size_t k = 0; k < slice.size(); ++k) {
            const auto p = slice.poi[k];
            poi_exposure_[slice.community[k]] +=
                slice.weight[k] * poi_visits_[p] * poi_factor_[p];
        }
        for (std::size_t k = 0; k < slice.size(); ++k) poi_visits_[slice.poi[k]] = 0.0;
    }

    double global_prevalence = 0.0;
    if (kind_ == ModelKind::HomogeneousSEIR) {
        double infectious = 0.0, total = 0.0;
        for (std::size_t c = 0; c < n; ++c) {
            infectious += state_.infectious[c];
            total += population_[c];
        }
        global_prevalence = infectious / total;
    }

    const int slot = hour % ring_size_;
    const int route_slot = (hour + delay_hours_) % ring_size_;
    double accounted = 0.0;
    for (std::size_t c = 0; c < n; ++c) {
        const double susceptible_share = state_.susceptible[c] / population_[c];
        double expected_exposures =
            (params.beta_base / 24.0) * state_.susceptible[c] *
            (kind_ == ModelKind::HomogeneousSEIR ? global_prevalence : prevalence_[c]);
        if (use_poi) {
            expected_exposures += params.beta_poi * susceptible_share * poi_exposure_[c];
            poi_exposure_[c] = 0.0;
        }
        const double new_exposed = draw_flow(state_.susceptible[c], expected_exposures);
        const double to_infectious = draw_flow(state_.exposed[c], rate_ei * state_.exposed[c]);
        const double to_recovered = draw_flow(state_.infectious[c], rate_ir * state_.infectious[c]);
        double routed;
        if (mode_ == SimMode::Deterministic) {
            routed = ifr_eff_[c] * to_recovered;
        } else {
            routed = static_cast<double>(
                rng_.binomial(static_cast<std::int64_t>(to_recovered), ifr_eff_[c]));
        }

        double due;
        auto& pending = pending_deaths_;
        const std::size_t base = static_cast<std::size_t>(slot) * n + c;
        if (delay_hours_ == 0) {
            due = pending[base] + routed;
            pending[base] = 0.0;
        } else {
            due = pending[base];
            pending[base] = 0.0;
            pending[static_cast<std::size_t>(route_slot) * n + c] += routed;
        }

        state_.susceptible[c] -= new_exposed;
        state_.exposed[c] += new_exposed - to_infectious;
        state_.infectious[c] += to_infectious - to_recovered;
        state_.recovered[c] += to_recovered - due;
        state_.cumulative_deaths[c] += due;
        cum_infections_[c] += new_exposed;
        accounted += due;
    }
    return accounted;
}

SimulationResult run(const World& world, ModelKind kind, const VaccinePlan* plan,
                     const RunOptions& options) {
    if (options.horizon_days < 0) throw ConfigError("run: horizon_days must be >= 0");
    const int horizon_hours = options.horizon_days * 24;
    if (kind != ModelKind::HomogeneousSEIR && horizon_hours > world.mobility.hours)
        throw ConfigError("run: horizon of " + std::to_string(options.horizon_days) +
                          " days exceeds mobility data (" +
                          std::to_string(world.mobility.hours) + " hours)");
    const std::size_t n = world.communities.size();
    if (plan && (plan->vaccinated_fraction.size() != n || plan->administration_day.size() != n))
        throw ConfigError("run: plan size does not match world");

    Simulator sim(world, kind, options.mode, options.seed, options.params_override);
    sim.seed_initial_infections();

    SimulationResult result;
    result.daily_deaths.assign(static_cast<std::size_t>(options.horizon_days), 0.0);
    result.mean_infectious_share.assign(n, 0.0);
    result.mean_susceptible_share.assign(n, 0.0);

    std::vector<double> dose(n, 0.0);
    for (int hour = 0; hour < horizon_hours; ++hour) {
        if (plan && hour % 24 == 0) {
            const int day = hour / 24;
            bool any = false;
            for (std::size_t c = 0; c < n; ++c) {
                const bool due = plan->administration_day[c] == day &&
                                 plan->vaccinated_fraction[c] > 0.0;
                dose[c] = due ? plan->vaccinated_fraction[c] : 0.0;
                any = any || due;
            }
            if (any) sim.apply_vaccination(dose);
        }
        const double deaths = sim.step_hour(hour);
        result.daily_deaths[static_cast<std::size_t>(hour / 24)] += deaths;
        const auto& st = sim.state();
        for (std::size_t c = 0; c < n; ++c) {
            result.mean_infectious_share[c] +=
                st.infectious[c] / world.communities[c].population;
            result.mean_susceptible_share[c] +=
                st.susceptible[c] / world.communities[c].population;
        }
    }
    if (horizon_hours > 0) {
        for (std::size_t c = 0; c < n; ++c) {
            result.mean_infectious_share[c] /= horizon_hours;
            result.mean_susceptible_share[c] /= horizon_hours;
        }
    } else {
        // Zero-length run: shares reflect the seeded state.
        for (std::size_t c = 0; c < n; ++c) {
            result.mean_infectious_share[c] = 0.0;
            result.mean_susceptible_share[c] = 1.0;
        }
    }

    result.final_state = sim.state();
    result.per_community_cumulative_deaths = sim.state().cumulative_deaths;
    result.per_community_cumulative_infections = sim.cumulative_infections();
    return result;
}

std::vector<double> mortality_rate_by_group(const std::vector<double>& per_community_deaths,
                                            const World& world, Dimension dimension,
                                            int n_groups) {
    const std::size_t n = world.communities.size();
    if (n_groups < 2) throw ConfigError("mortality_rate_by_group: n_groups must be >= 2");
    if (n < static_cast<std::size_t>(n_groups))
        throw ConfigError("mortality_rate_by_group: fewer communities than groups");
    const auto feature = feature_values(world, dimension);
    const auto population = population_values(world);
    const auto group = stats::quantile_groups(feature, population, n_groups);
    std::vector<double> deaths(static_cast<std::size_t>(n_groups), 0.0);
    std::vector<double> pop(static_cast<std::size_t>(n_groups), 0.0);
    for (std::size_t c = 0; c < n; ++c) {
        deaths[static_cast<std::size_t>(group[c])] += per_community_deaths[c];
        pop[static_cast<std::size_t>(group[c])] += population[c];
    }
    std::vector<double> rates(static_cast<std::size_t>(n_groups), 0.0);
    for (int g = 0; g < n_groups; ++g)
        rates[static_cast<std::size_t>(g)] =
            deaths[static_cast<std::size_t>(g)] / pop[static_cast<std::size_t>(g)];
    return rates;
}

std::vector<double> mortality_rate_by_group(const SimulationResult& result,
                                            const World& world, Dimension dimension,
                                            int n_groups) {
    return mortality_rate_by_group(result.per_community_cumulative_deaths, world, dimension,
                                   n_groups);
}

}  // namespace bdsim
