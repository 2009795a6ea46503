#ifndef BDSIM_SYNTHWORLD_HPP
#define BDSIM_SYNTHWORLD_HPP

#include <array>
#include <cstdint>

#include "bdsim/types.hpp"

namespace bdsim {

// Pearson correlation targets over (older-adult fraction, mean income,
// essential-worker fraction, per-capita daily mobility), plus world shape.
struct SynthConfig {
    int n_communities = 500;
    int n_pois = 120;
    int horizon_days = 60;
    std::uint64_t seed = 1;

    double rho_age_income = 0.0;
    double rho_age_essential = 0.0;
    double rho_income_essential = 0.0;
    double rho_age_mobility = 0.0;
    double rho_income_mobility = 0.0;
    double rho_essential_mobility = 0.0;

    double population_min = 400.0;
    double population_max = 2500.0;
    int pois_per_community = 10;  // sparsity of each community's visit set
};

// Targets from the empirical demographic/mobility correlation structure.
SynthConfig default_synth_config();

// 4x4 implied correlation matrix in (age, income, essential, mobility) order.
std::array<std::array<double, 4>, 4> correlation_matrix(const SynthConfig& config);

// Deterministic in (config, seed). Demographics and per-capita mobility are
// drawn from a Gaussian copula with the target correlations and realistic
// marginals; hourly POI visits follow a fixed diurnal template scaled so
// each community's total mobility matches its sampled per-capita value.
World generate_world(const SynthConfig& config);

// The default epidemic parameterization shipped with generated worlds:
// nine decadal age bands, age-increasing IFRs, COVID-like timescales.
EpidemicParams default_epidemic_params();

}  // namespace bdsim

#endif
