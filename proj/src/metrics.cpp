#include "bdsim/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "bdsim/errors.hpp"
#include "bdsim/stats.hpp"

namespace bdsim {

double gini(const std::vector<double>& values, const std::vector<double>& weights) {
    if (values.size() != weights.size())
        throw ValidationError("gini: values and weights differ in length");
    double weight_total = 0.0, weighted_value = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (values[i] < 0.0) throw ValidationError("gini: negative value");
        if (weights[i] < 0.0) throw ValidationError("gini: negative weight");
        weight_total += weights[i];
        weighted_value += weights[i] * values[i];
    }
    if (weight_total <= 0.0) throw ValidationError("gini: weights sum to zero");
    if (weighted_value == 0.0) return 0.0;  // all-equal-at-zero convention

    // Sorted form: sum_{i<j} w_i w_j (v_j - v_i) = sum_j w_j (v_j W_<j - S_<j).
    const auto idx = stats::argsort(values);
    double cum_weight = 0.0, cum_weighted_value = 0.0, pair_sum = 0.0;
    for (std::size_t r = 0; r < idx.size(); ++r) {
        const double v = values[idx[r]];
        const double w = weights[idx[r]];
        pair_sum += w * (v * cum_weight - cum_weighted_value);
        cum_weight += w;
        cum_weighted_value += w * v;
    }
    return pair_sum / (weight_total * weighted_value);
}

double social_utility_change(const SimulationResult& vaccinated,
                             const SimulationResult& unvaccinated, const World& world) {
    const double population = world.total_population();
    const double rate_unvacc = unvaccinated.total_deaths() / population;
    const double rate_vacc = vaccinated.total_deaths() / population;
    if (rate_unvacc <= 0.0)
        throw ValidationError("social_utility_change: unvaccinated run has no deaths");
    return (rate_unvacc - rate_vacc) / rate_unvacc;
}

double equity_change(const SimulationResult& vaccinated,
                     const SimulationResult& unvaccinated, const World& world,
                     Dimension dimension, int n_groups) {
    const auto rates_unvacc = mortality_rate_by_group(unvaccinated, world, dimension, n_groups);
    const auto rates_vacc = mortality_rate_by_group(vaccinated, world, dimension, n_groups);
    std::vector<double> group_pop(static_cast<std::size_t>(n_groups), 0.0);
    {
        const auto feature = feature_values(world, dimension);
        const auto population = population_values(world);
        const auto group = stats::quantile_groups(feature, population, n_groups);
        for (std::size_t c = 0; c < group.size(); ++c)
            group_pop[static_cast<std::size_t>(group[c])] += population[c];
    }
    const double gini_unvacc = gini(rates_unvacc, group_pop);
    const double gini_vacc = gini(rates_vacc, group_pop);
    if (gini_unvacc <= 0.0)
        throw ValidationError("equity_change: unvaccinated Gini is zero along " +
                              std::string(dimension_name(dimension)));
    return (gini_unvacc - gini_vacc) / gini_unvacc;
}

double overall_performance(const OutcomeReport& report) {
    return report.utility_change + report.equity_change_age + report.equity_change_income +
           report.equity_change_occupation;
}

EquityBreakdown equity_breakdown(const std::vector<double>& per_community_deaths,
                                 const World& world, int n_groups) {
    EquityBreakdown out;
    const auto population = population_values(world);
    for (Dimension dim : {Dimension::Age, Dimension::Income, Dimension::Occupation}) {
        const auto rates =
            mortality_rate_by_group(per_community_deaths, world, dim, n_groups);
        std::vector<double> group_pop(static_cast<std::size_t>(n_groups), 0.0);
        const auto group =
            stats::quantile_groups(feature_values(world, dim), population, n_groups);
        for (std::size_t c = 0; c < group.size(); ++c)
            group_pop[static_cast<std::size_t>(group[c])] += population[c];
        const double g = gini(rates, group_pop);
        switch (dim) {
            case Dimension::Age: out.gini_age = g; break;
            case Dimension::Income: out.gini_income = g; break;
            case Dimension::Occupation: out.gini_occupation = g; break;
        }
        out.group_rates[static_cast<std::size_t>(dim)] = rates;
    }
    return out;
}

double per_community_gini(const std::vector<double>& per_community_deaths,
                          const World& world) {
    std::vector<double> rates(per_community_deaths.size());
    for (std::size_t c = 0; c < rates.size(); ++c)
        rates[c] = per_community_deaths[c] / world.communities[c].population;
    return gini(rates, population_values(world));
}

OutcomeReport evaluate_outcome(const SimulationResult& vaccinated,
                               const SimulationResult& unvaccinated, const World& world,
                               int n_groups) {
    OutcomeReport report;
    report.utility_change = social_utility_change(vaccinated, unvaccinated, world);
    report.equity_change_age =
        equity_change(vaccinated, unvaccinated, world, Dimension::Age, n_groups);
    report.equity_change_income =
        equity_change(vaccinated, unvaccinated, world, Dimension::Income, n_groups);
    report.equity_change_occupation =
        equity_change(vaccinated, unvaccinated, world, Dimension::Occupation, n_groups);
    report.overall_performance = overall_performance(report);
    return report;
}

}  // namespace bdsim
