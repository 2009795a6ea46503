#ifndef BDSIM_STRATEGIES_HPP
#define BDSIM_STRATEGIES_HPP

#include <array>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "bdsim/indices.hpp"
#include "bdsim/types.hpp"

namespace bdsim {

// Vaccine acceptance caps keyed to the community's income quintile
// (bottom quintile first). A community never receives more than its cap.
struct AcceptanceScenario {
    std::string name = "none";
    std::array<double, 5> acceptance_by_income_quintile{1.0, 1.0, 1.0, 1.0, 1.0};

    static AcceptanceScenario none();
    static AcceptanceScenario real1();  // editable stand-in, see README
    static AcceptanceScenario real2();  // editable stand-in, see README
    static AcceptanceScenario hypo1();  // 0.6 0.7 0.8 0.9 1
    static AcceptanceScenario hypo2();  // 0.2 0.4 0.6 0.8 1
    static AcceptanceScenario hypo3();  // 0.1 0.3 0.5 0.7 1
    static AcceptanceScenario custom(const std::array<double, 5>& caps);
    // none|real1|real2|hypo1|hypo2|hypo3|custom:<csv with column acceptance>
    static AcceptanceScenario parse(const std::string& text);
};

enum class StrategyFamily {
    Homogeneous,
    PrioritizeByAge,
    PrioritizeByIncome,
    PrioritizeByOccupation,
    ReversePrioritize,
    SviInformed,
    RealWorldProportional,
    Comprehensive,
    ComprehensiveAblation,
};

struct StrategyKind {
    StrategyFamily family = StrategyFamily::Homogeneous;
    Dimension reverse_dimension = Dimension::Age;  // ReversePrioritize only
    std::vector<double> weights;                   // Comprehensive variants, length 5
    std::array<double, 5> coverage_table{1.0, 1.0, 1.0, 1.0, 1.0};  // RealWorldProportional
    // Optional precomputed table for the Comprehensive variants; built from
    // the world when absent.
    std::shared_ptr<const IndexTable> index_table;

    static StrategyKind homogeneous();
    static StrategyKind prioritize(Dimension dim);
    static StrategyKind reverse(Dimension dim);
    static StrategyKind svi_informed();
    static StrategyKind real_world(const std::array<double, 5>& coverage);
    static StrategyKind comprehensive(std::vector<double> weights,
                                      std::shared_ptr<const IndexTable> table = nullptr);
    static StrategyKind comprehensive_ablation(std::vector<double> weights,
                                               std::shared_ptr<const IndexTable> table = nullptr);

    std::string name() const;
};

// Population-balanced income quintile (0 = poorest) per community.
std::vector<int> income_quintiles(const World& world);

// Per-community acceptance cap under a scenario.
std::vector<double> acceptance_caps(const World& world, const AcceptanceScenario& scenario);

// Composite percentile-rank vulnerability score in [0,1]; 1 = worst off in
// all of (older share, low income, essential share).
std::vector<double> svi_score(const World& world);

// Standardized-feature dot product with the weight vector over
// (community risk, societal harm, older share, -income percentile,
// essential share). The ablation variant zeroes the two index weights.
std::vector<double> comprehensive_score(const IndexTable& table,
                                        const std::vector<double>& weights);

constexpr std::size_t kComprehensiveFeatureCount = 5;
extern const std::array<const char*, kComprehensiveFeatureCount> kComprehensiveFeatureNames;

// Builds a plan spending budget_fraction of the total population in doses,
// respecting acceptance caps. Priority strategies fill communities in rank
// order with the marginal community filled fractionally; Homogeneous
// water-fills a uniform fraction. The seed is used only by the stochastic
// Homogeneous variant (random fill order).
VaccinePlan make_plan(const World& world, const StrategyKind& kind, double budget_fraction,
                      const AcceptanceScenario& scenario, int day, std::uint64_t seed,
                      bool stochastic = false);

}  // namespace bdsim

#endif
