#ifndef BDSIM_ANALYSIS_HPP
#define BDSIM_ANALYSIS_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "bdsim/indices.hpp"
#include "bdsim/strategies.hpp"
#include "bdsim/types.hpp"

namespace bdsim {

// One random vaccination instance: the communities vaccinated.
struct Instance {
    std::vector<std::uint32_t> communities;
    double realized_coverage = 0.0;  // population share actually selected
};

// Selects communities uniformly at random without replacement until the
// population coverage first reaches the target. Deterministic per seed.
std::vector<Instance> generate_instances(const World& world, int n_instances,
                                         double coverage, std::uint64_t seed);

struct RegressionResult {
    std::string target;
    std::vector<std::string> feature_names;
    std::vector<double> coefficients;
    double intercept = 0.0;
    double r2 = 0.0;
    double adjusted_r2 = 0.0;
    int n_rows = 0;
};

// Plain OLS with intercept. columns[f] is feature f over all rows.
// Rank-deficient designs raise an error naming the collinear columns.
RegressionResult ols_fit(const std::vector<std::vector<double>>& columns,
                         const std::vector<std::string>& names,
                         const std::vector<double>& targets);

struct AblationPair {
    std::string target;  // utility | equity_age | equity_income | equity_occupation
    RegressionResult demographics_only;
    RegressionResult with_index;  // + societal harm (utility) or community risk (equity)
};

// Fig. 3-style study: simulates the instances once, then fits
// demographics-only and demographics+index models for each target.
std::vector<AblationPair> index_ablation_study(const World& world, int n_instances,
                                               double coverage, std::uint64_t seed,
                                               int threads = 1, int n_groups = 5);

struct LearnedWeights {
    std::vector<double> weights;  // unit L1 norm, comprehensive feature order
    double overall_performance = 0.0;
    int n_candidates = 0;
};

// Searches weight vectors on the unit L1 sphere (axis-aligned vectors plus
// seeded samples), scoring each candidate by the overall performance of the
// plan it induces. The ablation variant searches only the demographic
// subspace. Deterministic per seed and invariant to candidate order.
LearnedWeights learn_weights(const World& world, double budget_fraction,
                             const AcceptanceScenario& scenario, int n_candidates,
                             std::uint64_t seed, bool ablation = false, int threads = 1,
                             int day = 0, int n_groups = 5);

}  // namespace bdsim

#endif
