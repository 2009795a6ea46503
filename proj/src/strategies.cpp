#include "bdsim/strategies.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "bdsim/csv.hpp"
#include "bdsim/errors.hpp"
#include "bdsim/rng.hpp"
#include "bdsim/stats.hpp"

namespace bdsim {

const std::array<const char*, kComprehensiveFeatureCount> kComprehensiveFeatureNames = {
    "community_risk", "societal_harm", "older_adult_fraction", "neg_income_percentile",
    "essential_worker_fraction"};

AcceptanceScenario AcceptanceScenario::none() { return {}; }

AcceptanceScenario AcceptanceScenario::real1() {
    return {"real1", {0.55, 0.65, 0.72, 0.79, 0.85}};
}

AcceptanceScenario AcceptanceScenario::real2() {
    return {"real2", {0.45, 0.60, 0.70, 0.82, 0.90}};
}

AcceptanceScenario AcceptanceScenario::hypo1() {
    return {"hypo1", {0.6, 0.7, 0.8, 0.9, 1.0}};
}

AcceptanceScenario AcceptanceScenario::hypo2() {
    return {"hypo2", {0.2, 0.4, 0.6, 0.8, 1.0}};
}

AcceptanceScenario AcceptanceScenario::hypo3() {
    return {"hypo3", {0.1, 0.3, 0.5, 0.7, 1.0}};
}

AcceptanceScenario AcceptanceScenario::custom(const std::array<double, 5>& caps) {
    AcceptanceScenario s;
    s.name = "custom";
    s.acceptance_by_income_quintile = caps;
    for (double cap : caps)
        if (!(cap > 0.0 && cap <= 1.0))
            throw ConfigError("acceptance rates must be in (0,1]");
    return s;
}

AcceptanceScenario AcceptanceScenario::parse(const std::string& text) {
    if (text == "none") return none();
    if (text == "real1") return real1();
    if (text == "real2") return real2();
    if (text == "hypo1") return hypo1();
    if (text == "hypo2") return hypo2();
    if (text == "hypo3") return hypo3();
    if (text.rfind("custom:", 0) == 0) {
        const auto t = csv::read_table(text.substr(7));
        const int col = t.require_column("acceptance");
        if (t.rows.size() != 5)
            throw ConfigError("custom scenario file must have exactly 5 rows "
                              "(bottom to top income quintile)");
        std::array<double, 5> caps{};
        for (std::size_t r = 0; r < 5; ++r) caps[r] = csv::parse_double(t, r, col);
        return custom(caps);
    }
    throw ConfigError("unknown scenario '" + text + "'");
}

StrategyKind StrategyKind::homogeneous() { return {}; }

StrategyKind StrategyKind::prioritize(Dimension dim) {
    StrategyKind k;
    switch (dim) {
        case Dimension::Age: k.family = StrategyFamily::PrioritizeByAge; break;
        case Dimension::Income: k.family = StrategyFamily::PrioritizeByIncome; break;
        case Dimension::Occupation: k.family = StrategyFamily::PrioritizeByOccupation; break;
    }
    return k;
}

StrategyKind StrategyKind::reverse(Dimension dim) {
    StrategyKind k;
    k.family = StrategyFamily::ReversePrioritize;
    k.reverse_dimension = dim;
    return k;
}

StrategyKind StrategyKind::svi_informed() {
    StrategyKind k;
    k.family = StrategyFamily::SviInformed;
    return k;
}

StrategyKind StrategyKind::real_world(const std::array<double, 5>& coverage) {
    StrategyKind k;
    k.family = StrategyFamily::RealWorldProportional;
    k.coverage_table = coverage;
    return k;
}

StrategyKind StrategyKind::comprehensive(std::vector<double> weights,
                                         std::shared_ptr<const IndexTable> table) {
    StrategyKind k;
    k.family = StrategyFamily::Comprehensive;
    k.weights = std::move(weights);
    k.index_table = std::move(table);
    return k;
}

StrategyKind StrategyKind::comprehensive_ablation(std::vector<double> weights,
                                                  std::shared_ptr<const IndexTable> table) {
    StrategyKind k;
    k.family = StrategyFamily::ComprehensiveAblation;
    k.weights = std::move(weights);
    k.index_table = std::move(table);
    return k;
}

std::string StrategyKind::name() const {
    switch (family) {
        case StrategyFamily::Homogeneous: return "homogeneous";
        case StrategyFamily::PrioritizeByAge: return "prioritize_age";
        case StrategyFamily::PrioritizeByIncome: return "prioritize_income";
        case StrategyFamily::PrioritizeByOccupation: return "prioritize_occupation";
        case StrategyFamily::ReversePrioritize:
            return std::string("reverse_") + dimension_name(reverse_dimension);
        case StrategyFamily::SviInformed: return "svi";
        case StrategyFamily::RealWorldProportional: return "real_world";
        case StrategyFamily::Comprehensive: return "comprehensive";
        case StrategyFamily::ComprehensiveAblation: return "comprehensive_ablation";
    }
    return "?";
}

std::vector<int> income_quintiles(const World& world) {
    return stats::quantile_groups(feature_values(world, Dimension::Income),
                                  population_values(world), 5);
}

std::vector<double> acceptance_caps(const World& world, const AcceptanceScenario& scenario) {
    for (double cap : scenario.acceptance_by_income_quintile)
        if (!(cap > 0.0 && cap <= 1.0))
            throw ConfigError("acceptance rates must be in (0,1]");
    const auto quintile = income_quintiles(world);
    std::vector<double> caps(world.communities.size());
    for (std::size_t c = 0; c < caps.size(); ++c)
        caps[c] =
            scenario.acceptance_by_income_quintile[static_cast<std::size_t>(quintile[c])];
    return caps;
}

std::vector<double> svi_score(const World& world) {
    if (world.communities.size() < 2)
        throw ConfigError("svi_score: needs at least 2 communities");
    const auto age_rank = stats::percentile_ranks(feature_values(world, Dimension::Age));
    auto neg_income = feature_values(world, Dimension::Income);
    for (double& v : neg_income) v = -v;
    const auto poverty_rank = stats::percentile_ranks(neg_income);
    const auto essential_rank =
        stats::percentile_ranks(feature_values(world, Dimension::Occupation));
    std::vector<double> score(world.communities.size());
    for (std::size_t c = 0; c < score.size(); ++c)
        score[c] = (age_rank[c] + poverty_rank[c] + essential_rank[c]) / 3.0;
    return score;
}

std::vector<double> comprehensive_score(const IndexTable& table,
                                        const std::vector<double>& weights) {
    if (weights.size() != kComprehensiveFeatureCount)
        throw ConfigError("comprehensive_score: expected " +
                          std::to_string(kComprehensiveFeatureCount) + " weights, got " +
                          std::to_string(weights.size()));
    auto neg_income_percentile = stats::percentile_ranks(table.mean_household_income);
    for (double& v : neg_income_percentile) v = -v;
    std::array<std::vector<double>, kComprehensiveFeatureCount> features = {
        table.community_risk, table.societal_harm, table.older_adult_fraction,
        neg_income_percentile, table.essential_worker_fraction};
    for (auto& column : features) stats::standardize(column);
    std::vector<double> score(table.size(), 0.0);
    for (std::size_t f = 0; f < features.size(); ++f)
        for (std::size_t c = 0; c < score.size(); ++c)
            score[c] += weights[f] * features[f][c];
    return score;
}

namespace {

// Fills communities to their caps in the given order until the person
// budget is exhausted; the marginal community gets a fractional allocation.
void fill_in_order(const std::vector<std::size_t>& order, const World& world,
                   const std::vector<double>& caps, double& budget_persons,
                   std::vector<double>& fraction) {
    for (const std::size_t c : order) {
        if (budget_persons <= 0.0) break;
        const double population = world.communities[c].population;
        const double spare_frac = caps[c] - fraction[c];
        if (spare_frac <= 0.0) continue;
        const double take = std::min(spare_frac * population, budget_persons);
        fraction[c] += take / population;
        budget_persons -= take;
    }
}

// Ranking order: descending key, ties broken by community id.
std::vector<std::size_t> ranking(const World& world, const std::vector<double>& key,
                                 bool descending) {
    std::vector<std::size_t> order(key.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (key[a] != key[b]) return descending ? key[a] > key[b] : key[a] < key[b];
        return world.communities[a].id < world.communities[b].id;
    });
    return order;
}

// Uniform level f with per-community caps: finds f such that
// sum_c min(f, cap_c) * N_c == budget, then applies it.
void water_fill(const std::vector<std::size_t>& members, const World& world,
                const std::vector<double>& caps, double& budget_persons,
                std::vector<double>& fraction) {
    double remaining = budget_persons;
    // Capacity above the current fill level, community by community.
    std::vector<std::pair<double, double>> spare;  // (spare cap, population)
    double spare_capacity = 0.0;
    for (const std::size_t c : members) {
        const double s = caps[c] - fraction[c];
        if (s > 0.0) {
            spare.emplace_back(s, world.communities[c].population);
            spare_capacity += s * world.communities[c].population;
        }
    }
    if (spare.empty()) return;
    double level;
    if (remaining >= spare_capacity) {
        level = std::numeric_limits<double>::infinity();  // everyone to cap
    } else {
        std::sort(spare.begin(), spare.end());
        // Raise the level past each saturated cap until the budget fits.
        double pop_below = 0.0;
        for (const auto& [s, pop] : spare) pop_below += pop;
        double used = 0.0, prev = 0.0;
        level = 0.0;
        for (const auto& [s, pop] : spare) {
            const double step = (s - prev) * pop_below;
            if (used + step >= remaining) {
                level = prev + (remaining - used) / pop_below;
                break;
            }
            used += step;
            prev = s;
            pop_below -= pop;
            level = s;
        }
    }
    for (const std::size_t c : members) {
        const double add = std::min(level, caps[c] - fraction[c]);
        if (add <= 0.0) continue;
        fraction[c] += add;
        budget_persons -= add * world.communities[c].population;
    }
}

}  // namespace

VaccinePlan make_plan(const World& world, const StrategyKind& kind, double budget_fraction,
                      const AcceptanceScenario& scenario, int day, std::uint64_t seed,
                      bool stochastic) {
    if (budget_fraction < 0.0 || budget_fraction > 1.0)
        throw ConfigError("make_plan: budget fraction must be in [0,1]");
    if (day < 0) throw ConfigError("make_plan: administration day must be >= 0");
    const std::size_t n = world.communities.size();
    const auto caps = acceptance_caps(world, scenario);
    const double total_population = world.total_population();
    double budget_persons = budget_fraction * total_population;

    VaccinePlan plan;
    plan.vaccinated_fraction.assign(n, 0.0);
    plan.administration_day.assign(n, day);

    std::vector<std::size_t> everyone(n);
    std::iota(everyone.begin(), everyone.end(), 0);

    switch (kind.family) {
        case StrategyFamily::Homogeneous: {
            if (stochastic) {
                Rng rng(mix_seed(seed, 0x401u));
                auto order = everyone;
                rng.shuffle(order);
                fill_in_order(order, world, caps, budget_persons, plan.vaccinated_fraction);
            } else {
                water_fill(everyone, world, caps, budget_persons, plan.vaccinated_fraction);
            }
            break;
        }
        case StrategyFamily::PrioritizeByAge:
        case StrategyFamily::PrioritizeByIncome:
        case StrategyFamily::PrioritizeByOccupation:
        case StrategyFamily::ReversePrioritize: {
            Dimension dim;
            bool most_disadvantaged_first = true;
            switch (kind.family) {
                case StrategyFamily::PrioritizeByAge: dim = Dimension::Age; break;
                case StrategyFamily::PrioritizeByIncome: dim = Dimension::Income; break;
                case StrategyFamily::PrioritizeByOccupation: dim = Dimension::Occupation; break;
                default:
                    dim = kind.reverse_dimension;
                    most_disadvantaged_first = false;
            }
            // Disadvantage = high older share, low income, high essential share.
            const bool descending = (dim == Dimension::Income) ? !most_disadvantaged_first
                                                               : most_disadvantaged_first;
            const auto order = ranking(world, feature_values(world, dim), descending);
            fill_in_order(order, world, caps, budget_persons, plan.vaccinated_fraction);
            break;
        }
        case StrategyFamily::SviInformed: {
            const auto order = ranking(world, svi_score(world), true);
            fill_in_order(order, world, caps, budget_persons, plan.vaccinated_fraction);
            break;
        }
        case StrategyFamily::RealWorldProportional: {
            double weight_total = 0.0;
            for (double v : kind.coverage_table) {
                if (v < 0.0 || !std::isfinite(v))
                    throw ConfigError("real_world: coverage table entries must be finite "
                                      "and >= 0");
                weight_total += v;
            }
            if (weight_total <= 0.0)
                throw ConfigError("real_world: coverage table sums to zero");
            const auto quintile = income_quintiles(world);
            std::array<std::vector<std::size_t>, 5> groups;
            std::array<double, 5> group_pop{};
            for (std::size_t c = 0; c < n; ++c) {
                groups[static_cast<std::size_t>(quintile[c])].push_back(c);
                group_pop[static_cast<std::size_t>(quintile[c])] +=
                    world.communities[c].population;
            }
            // Proportional split with iterative redistribution of leftovers
            // from saturated groups.
            for (int round = 0; round < 5 && budget_persons > 1e-9; ++round) {
                double denom = 0.0;
                std::array<double, 5> spare{};
                for (std::size_t g = 0; g < 5; ++g) {
                    for (const std::size_t c : groups[g])
                        spare[g] += (caps[c] - plan.vaccinated_fraction[c]) *
                                    world.communities[c].population;
                    if (spare[g] > 1e-12) denom += kind.coverage_table[g] * group_pop[g];
                }
                if (denom <= 0.0) break;
                const double before = budget_persons;
                for (std::size_t g = 0; g < 5; ++g) {
                    if (spare[g] <= 1e-12) continue;
                    const double target = std::min(
                        before * kind.coverage_table[g] * group_pop[g] / denom, spare[g]);
                    double remaining = target;
                    water_fill(groups[g], world, caps, remaining, plan.vaccinated_fraction);
                    budget_persons -= (target - remaining);
                }
                if (std::abs(before - budget_persons) < 1e-12) break;
            }
            break;
        }
        case StrategyFamily::Comprehensive:
        case StrategyFamily::ComprehensiveAblation: {
            std::shared_ptr<const IndexTable> table = kind.index_table;
            if (!table)
                table = std::make_shared<IndexTable>(
                    build_index_table(world, world.mobility.hours / 24));
            auto weights = kind.weights;
            if (kind.family == StrategyFamily::ComprehensiveAblation && weights.size() >= 2) {
                weights[0] = 0.0;  // community risk
                weights[1] = 0.0;  // societal harm
            }
            const auto order = ranking(world, comprehensive_score(*table, weights), true);
            fill_in_order(order, world, caps, budget_persons, plan.vaccinated_fraction);
            break;
        }
    }

    plan.shortfall = budget_persons > 1e-9 * std::max(1.0, total_population);
    return plan;
}

}  // namespace bdsim
