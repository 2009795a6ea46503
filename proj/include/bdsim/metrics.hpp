#ifndef BDSIM_METRICS_HPP
#define BDSIM_METRICS_HPP

#include <array>
#include <vector>

#include "bdsim/engine.hpp"
#include "bdsim/types.hpp"

namespace bdsim {

// Gini coefficients of group mortality rates along the three demographic
// dimensions, plus the group rates they were computed from.
struct EquityBreakdown {
    double gini_age = 0.0;
    double gini_income = 0.0;
    double gini_occupation = 0.0;
    std::array<std::vector<double>, 3> group_rates;  // indexed by Dimension
};

// Weighted Gini: sum_ij w_i w_j |v_i - v_j| / (2 * sum(w) * sum(w*v)).
// Returns 0 when sum(w*v) == 0. Negative values or weights are a domain error.
double gini(const std::vector<double>& values, const std::vector<double>& weights);

// (rate_unvacc - rate_vacc) / rate_unvacc over total fatality rates;
// positive means the plan improved social utility.
double social_utility_change(const SimulationResult& vaccinated,
                             const SimulationResult& unvaccinated, const World& world);

// (gini_unvacc - gini_vacc) / gini_unvacc over quantile-group mortality
// rates along one demographic dimension; positive means more equitable.
double equity_change(const SimulationResult& vaccinated,
                     const SimulationResult& unvaccinated, const World& world,
                     Dimension dimension, int n_groups = 5);

double overall_performance(const OutcomeReport& report);

EquityBreakdown equity_breakdown(const std::vector<double>& per_community_deaths,
                                 const World& world, int n_groups = 5);

// Secondary output: Gini over raw per-community fatality rates.
double per_community_gini(const std::vector<double>& per_community_deaths,
                          const World& world);

// Assembles the four changes and their sum for one evaluation.
OutcomeReport evaluate_outcome(const SimulationResult& vaccinated,
                               const SimulationResult& unvaccinated, const World& world,
                               int n_groups = 5);

}  // namespace bdsim

#endif
