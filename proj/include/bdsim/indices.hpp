#ifndef BDSIM_INDICES_HPP
#define BDSIM_INDICES_HPP

#include <string>
#include <vector>

#include "bdsim/types.hpp"

namespace bdsim {

// Per-community outcome indices joined with the demographic features the
// Comprehensive allocator and the regressions consume.
struct IndexTable {
    std::vector<std::string> community_id;
    std::vector<double> community_risk;
    std::vector<double> societal_harm;
    std::vector<double> older_adult_fraction;
    std::vector<double> mean_household_income;
    std::vector<double> essential_worker_fraction;

    std::size_t size() const { return community_id.size(); }
};

// Expected mortality rate: mean hourly per-capita POI contact exposure
// times the community's demography-adjusted IFR.
std::vector<double> community_risk(const World& world);

// Expected deaths in the community itself plus the deaths from secondary
// infections it seeds in others, from a one-generation expansion around the
// unvaccinated baseline run.
std::vector<double> societal_harm(const World& world, int horizon_days);

// Reference estimator: total-death reduction when exactly one community is
// fully vaccinated at day 0, simulated per community. Slow; used as the
// ranking oracle for the analytic estimator.
std::vector<double> societal_harm_counterfactual(const World& world, int horizon_days);

IndexTable build_index_table(const World& world, int horizon_days);

void save_index_table(const IndexTable& table, const std::string& path);
IndexTable load_index_table(const std::string& path);

}  // namespace bdsim

#endif
