#include "bdsim/indices.hpp"

#include <algorithm>
#include <cmath>

#include "bdsim/csv.hpp"
#include "bdsim/engine.hpp"
#include "bdsim/errors.hpp"

namespace bdsim {

std::vector<double> community_risk(const World& world) {
    const std::size_t n = world.communities.size();
    std::vector<double> contact(n, 0.0);
    for (int t = 0; t < world.mobility.hours; ++t) {
        const auto& slice = world.mobility.by_hour[static_cast<std::size_t>(t)];
        for (std::size_t k = 0; k < slice.size(); ++k) {
            const auto& poi = world.pois[slice.poi[k]];
            contact[slice.community[k]] += slice.weight[k] * poi.dwell_time / poi.area;
        }
    }
    std::vector<double> risk(n, 0.0);
    for (std::size_t c = 0; c < n; ++c) {
        const double hours = std::max(1, world.mobility.hours);
        const double exposure = contact[c] / hours / world.communities[c].population;
        risk[c] = exposure * community_ifr(world.communities[c], world.params);
    }
    return risk;
}

std::vector<double> societal_harm(const World& world, int horizon_days) {
    const std::size_t n = world.communities.size();
    RunOptions options;
    options.mode = SimMode::Deterministic;
    options.horizon_days = horizon_days;
    const auto baseline = run(world, ModelKind::BD, nullptr, options);

    std::vector<double> ifr(n, 0.0);
    for (std::size_t c = 0; c < n; ++c)
        ifr[c] = community_ifr(world.communities[c], world.params);

    // One-generation export term: infectious presence of c at POI p infects
    // co-visitors from c' via the engine's POI hazard, with every community
    // held at its unvaccinated baseline prevalence and susceptible share.
    const auto& prevalence = baseline.mean_infectious_share;
    const auto& susceptible = baseline.mean_susceptible_share;
    std::vector<double> harm = baseline.per_community_cumulative_deaths;

    const int hours = std::min(world.mobility.hours, horizon_days * 24);
    std::vector<double> poi_sink(world.pois.size(), 0.0);  // sum_c' w' * s_c'/N_c' * ifr_c'
    for (int t = 0; t < hours; ++t) {
        const auto& slice = world.mobility.by_hour[static_cast<std::size_t>(t)];
        for (std::size_t k = 0; k < slice.size(); ++k) {
            const auto c = slice.community[k];
            poi_sink[slice.poi[k]] += slice.weight[k] * susceptible[c] * ifr[c] /
                                      world.communities[c].population;
        }
        for (std::size_t k = 0; k < slice.size(); ++k) {
            const auto c = slice.community[k];
            const auto p = slice.poi[k];
            const double w = slice.weight[k];
            const double factor = world.pois[p].dwell_time / world.pois[p].area;
            // Exclude infections seeded back into c itself.
            const double sink_other =
                poi_sink[p] - w * susceptible[c] * ifr[c] / world.communities[c].population;
            harm[c] += world.params.beta_poi * factor * w * prevalence[c] *
                       std::max(0.0, sink_other);
        }
        for (std::size_t k = 0; k < slice.size(); ++k) poi_sink[slice.poi[k]] = 0.0;
    }
    return harm;
}

std::vector<double> societal_harm_counterfactual(const World& world, int horizon_days) {
    const std::size_t n = world.communities.size();
    RunOptions options;
    options.mode = SimMode::Deterministic;
    options.horizon_days = horizon_days;
    const auto baseline = run(world, ModelKind::BD, nullptr, options);
    const double baseline_deaths = baseline.total_deaths();

    std::vector<double> harm(n, 0.0);
    VaccinePlan plan;
    plan.vaccinated_fraction.assign(n, 0.0);
    plan.administration_day.assign(n, 0);
    for (std::size_t c = 0; c < n; ++c) {
        plan.vaccinated_fraction[c] = 1.0;
        const auto result = run(world, ModelKind::BD, &plan, options);
        harm[c] = baseline_deaths - result.total_deaths();
        plan.vaccinated_fraction[c] = 0.0;
    }
    return harm;
}

IndexTable build_index_table(const World& world, int horizon_days) {
    IndexTable table;
    table.community_risk = community_risk(world);
    table.societal_harm = societal_harm(world, horizon_days);
    for (const auto& c : world.communities) {
        table.community_id.push_back(c.id);
        table.older_adult_fraction.push_back(c.older_adult_fraction);
        table.mean_household_income.push_back(c.mean_household_income);
        table.essential_worker_fraction.push_back(c.essential_worker_fraction);
    }
    return table;
}

void save_index_table(const IndexTable& table, const std::string& path) {
    csv::Writer w(path);
    w.row({"community_id", "community_risk", "societal_harm", "older_adult_fraction",
           "mean_household_income", "essential_worker_fraction"});
    for (std::size_t c = 0; c < table.size(); ++c)
        w.row({table.community_id[c], csv::format_double(table.community_risk[c]),
               csv::format_double(table.societal_harm[c]),
               csv::format_double(table.older_adult_fraction[c]),
               csv::format_double(table.mean_household_income[c]),
               csv::format_double(table.essential_worker_fraction[c])});
    w.close();
}

IndexTable load_index_table(const std::string& path) {
    const auto t = csv::read_table(path);
    const int id_col = t.require_column("community_id");
    const int cr_col = t.require_column("community_risk");
    const int sh_col = t.require_column("societal_harm");
    const int age_col = t.require_column("older_adult_fraction");
    const int income_col = t.require_column("mean_household_income");
    const int ess_col = t.require_column("essential_worker_fraction");
    IndexTable table;
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        table.community_id.push_back(t.rows[r][static_cast<std::size_t>(id_col)]);
        table.community_risk.push_back(csv::parse_double(t, r, cr_col));
        table.societal_harm.push_back(csv::parse_double(t, r, sh_col));
        table.older_adult_fraction.push_back(csv::parse_double(t, r, age_col));
        table.mean_household_income.push_back(csv::parse_double(t, r, income_col));
        table.essential_worker_fraction.push_back(csv::parse_double(t, r, ess_col));
    }
    return table;
}

}  // namespace bdsim
