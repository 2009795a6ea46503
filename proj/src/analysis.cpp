#include "bdsim/analysis.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>

#include "bdsim/engine.hpp"
#include "bdsim/errors.hpp"
#include "bdsim/metrics.hpp"
#include "bdsim/parallel.hpp"
#include "bdsim/rng.hpp"
#include "bdsim/stats.hpp"

namespace bdsim {

std::vector<Instance> generate_instances(const World& world, int n_instances,
                                         double coverage, std::uint64_t seed) {
    if (!(coverage > 0.0 && coverage <= 1.0))
        throw ConfigError("generate_instances: coverage must be in (0,1]");
    if (n_instances < 1) throw ConfigError("generate_instances: n_instances must be >= 1");
    const std::size_t n = world.communities.size();
    const double total = world.total_population();
    std::vector<Instance> instances(static_cast<std::size_t>(n_instances));
    for (int i = 0; i < n_instances; ++i) {
        Rng rng(mix_seed(seed, 0x1257a000u + static_cast<std::uint64_t>(i)));
        std::vector<std::uint32_t> order(n);
        std::iota(order.begin(), order.end(), 0u);
        rng.shuffle(order);
        auto& inst = instances[static_cast<std::size_t>(i)];
        double covered = 0.0;
        for (const std::uint32_t c : order) {
            inst.communities.push_back(c);
            covered += world.communities[c].population;
            if (covered >= coverage * total) break;
        }
        std::sort(inst.communities.begin(), inst.communities.end());
        inst.realized_coverage = covered / total;
    }
    return instances;
}

RegressionResult ols_fit(const std::vector<std::vector<double>>& columns,
                         const std::vector<std::string>& names,
                         const std::vector<double>& targets) {
    const std::size_t k = columns.size();
    if (names.size() != k) throw ConfigError("ols_fit: names/columns mismatch");
    const std::size_t n = targets.size();
    if (n <= k + 1)
        throw ConfigError("ols_fit: need more rows than features plus intercept");
    for (const auto& col : columns)
        if (col.size() != n) throw ConfigError("ols_fit: ragged feature column");

    Eigen::MatrixXd design(n, k + 1);
    for (std::size_t r = 0; r < n; ++r) design(static_cast<Eigen::Index>(r), 0) = 1.0;
    for (std::size_t f = 0; f < k; ++f)
        for (std::size_t r = 0; r < n; ++r)
            design(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(f + 1)) =
                columns[f][r];
    Eigen::VectorXd y(n);
    for (std::size_t r = 0; r < n; ++r) y(static_cast<Eigen::Index>(r)) = targets[r];

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
    qr.setThreshold(1e-10);
    if (qr.rank() < static_cast<Eigen::Index>(k + 1)) {
        // The permutation moves dependent columns to the tail; name them.
        const auto perm = qr.colsPermutation().indices();
        std::string collinear;
        for (Eigen::Index i = qr.rank(); i < perm.size(); ++i) {
            const Eigen::Index col = perm(i);
            if (!collinear.empty()) collinear += ", ";
            collinear += col == 0 ? "intercept" : names[static_cast<std::size_t>(col - 1)];
        }
        throw ConfigError("ols_fit: rank-deficient design, collinear columns: " + collinear);
    }
    const Eigen::VectorXd beta = qr.solve(y);

    const Eigen::VectorXd residual = y - design * beta;
    const double ss_res = residual.squaredNorm();
    const double y_mean = y.mean();
    const double ss_tot = (y.array() - y_mean).square().sum();
    const double r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;

    RegressionResult result;
    result.feature_names = names;
    result.intercept = beta(0);
    for (std::size_t f = 0; f < k; ++f)
        result.coefficients.push_back(beta(static_cast<Eigen::Index>(f + 1)));
    result.r2 = r2;
    result.adjusted_r2 = 1.0 - (1.0 - r2) * static_cast<double>(n - 1) /
                                   static_cast<double>(n - k - 1);
    result.n_rows = static_cast<int>(n);
    return result;
}

namespace {

struct InstanceOutcomes {
    std::vector<std::vector<double>> features;  // aggregated, per feature column
    std::vector<double> utility;
    std::vector<double> equity_age;
    std::vector<double> equity_income;
    std::vector<double> equity_occupation;
};

// Population-weighted mean of a per-community value over the instance set.
double aggregate(const std::vector<double>& value, const Instance& inst,
                 const World& world) {
    double weighted = 0.0, pop = 0.0;
    for (const auto c : inst.communities) {
        weighted += value[c] * world.communities[c].population;
        pop += world.communities[c].population;
    }
    return pop > 0.0 ? weighted / pop : 0.0;
}

InstanceOutcomes simulate_instances(const World& world, const IndexTable& table,
                                    const std::vector<Instance>& instances, int threads,
                                    int n_groups) {
    const int horizon_days = world.mobility.hours / 24;
    RunOptions options;
    options.mode = SimMode::Deterministic;
    options.horizon_days = horizon_days;
    const auto baseline = run(world, ModelKind::BD, nullptr, options);

    const std::size_t m = instances.size();
    std::vector<OutcomeReport> reports(m);
    parallel_for(m, threads, [&](std::size_t i) {
        VaccinePlan plan;
        plan.vaccinated_fraction.assign(world.communities.size(), 0.0);
        plan.administration_day.assign(world.communities.size(), 0);
        for (const auto c : instances[i].communities) plan.vaccinated_fraction[c] = 1.0;
        const auto result = run(world, ModelKind::BD, &plan, options);
        reports[i] = evaluate_outcome(result, baseline, world, n_groups);
    });

    InstanceOutcomes out;
    out.features.resize(5);
    for (std::size_t i = 0; i < m; ++i) {
        const auto& inst = instances[i];
        out.features[0].push_back(aggregate(table.older_adult_fraction, inst, world));
        out.features[1].push_back(aggregate(table.mean_household_income, inst, world));
        out.features[2].push_back(aggregate(table.essential_worker_fraction, inst, world));
        out.features[3].push_back(aggregate(table.community_risk, inst, world));
        out.features[4].push_back(aggregate(table.societal_harm, inst, world));
        out.utility.push_back(reports[i].utility_change);
        out.equity_age.push_back(reports[i].equity_change_age);
        out.equity_income.push_back(reports[i].equity_change_income);
        out.equity_occupation.push_back(reports[i].equity_change_occupation);
    }
    for (auto& col : out.features) stats::standardize(col);
    return out;
}

}  // namespace

std::vector<AblationPair> index_ablation_study(const World& world, int n_instances,
                                               double coverage, std::uint64_t seed,
                                               int threads, int n_groups) {
    const auto table = build_index_table(world, world.mobility.hours / 24);
    const auto instances = generate_instances(world, n_instances, coverage, seed);
    const auto outcomes = simulate_instances(world, table, instances, threads, n_groups);

    const std::vector<std::string> demo_names = {"older_adult_fraction",
                                                 "mean_household_income",
                                                 "essential_worker_fraction"};
    const std::vector<std::vector<double>> demo_cols = {
        outcomes.features[0], outcomes.features[1], outcomes.features[2]};

    auto fit_pair = [&](const std::string& target, const std::vector<double>& y,
                        std::size_t index_feature, const std::string& index_name) {
        AblationPair pair;
        pair.target = target;
        pair.demographics_only = ols_fit(demo_cols, demo_names, y);
        pair.demographics_only.target = target;
        auto cols = demo_cols;
        auto names = demo_names;
        cols.push_back(outcomes.features[index_feature]);
        names.push_back(index_name);
        pair.with_index = ols_fit(cols, names, y);
        pair.with_index.target = target;
        return pair;
    };

    std::vector<AblationPair> study;
    study.push_back(fit_pair("utility", outcomes.utility, 4, "societal_harm"));
    study.push_back(fit_pair("equity_age", outcomes.equity_age, 3, "community_risk"));
    study.push_back(fit_pair("equity_income", outcomes.equity_income, 3, "community_risk"));
    study.push_back(
        fit_pair("equity_occupation", outcomes.equity_occupation, 3, "community_risk"));
    return study;
}

LearnedWeights learn_weights(const World& world, double budget_fraction,
                             const AcceptanceScenario& scenario, int n_candidates,
                             std::uint64_t seed, bool ablation, int threads, int day,
                             int n_groups) {
    if (n_candidates < 1) throw ConfigError("learn_weights: need at least one candidate");
    const std::size_t n_features = kComprehensiveFeatureCount;
    auto table = std::make_shared<const IndexTable>(
        build_index_table(world, world.mobility.hours / 24));

    std::vector<std::vector<double>> candidates;
    // Axis-aligned vectors first, then seeded draws on the unit L1 sphere.
    for (std::size_t f = 0; f < n_features; ++f) {
        if (ablation && f < 2) continue;
        std::vector<double> up(n_features, 0.0), down(n_features, 0.0);
        up[f] = 1.0;
        down[f] = -1.0;
        candidates.push_back(up);
        candidates.push_back(down);
    }
    Rng rng(mix_seed(seed, 0x3e1647u));
    while (candidates.size() < static_cast<std::size_t>(n_candidates)) {
        std::vector<double> w(n_features, 0.0);
        double norm = 0.0;
        for (std::size_t f = 0; f < n_features; ++f) {
            if (ablation && f < 2) continue;
            const double magnitude = rng.gamma(1.0);
            w[f] = rng.uniform() < 0.5 ? -magnitude : magnitude;
            norm += magnitude;
        }
        if (norm <= 0.0) continue;
        for (double& v : w) v /= norm;
        candidates.push_back(std::move(w));
    }

    const int horizon_days = world.mobility.hours / 24;
    RunOptions options;
    options.mode = SimMode::Deterministic;
    options.horizon_days = horizon_days;
    const auto baseline = run(world, ModelKind::BD, nullptr, options);

    std::vector<double> scores(candidates.size());
    parallel_for(candidates.size(), threads, [&](std::size_t i) {
        const auto kind = ablation
                              ? StrategyKind::comprehensive_ablation(candidates[i], table)
                              : StrategyKind::comprehensive(candidates[i], table);
        const auto plan = make_plan(world, kind, budget_fraction, scenario, day, seed);
        const auto result = run(world, ModelKind::BD, &plan, options);
        scores[i] = overall_performance(evaluate_outcome(result, baseline, world, n_groups));
    });

    std::size_t best = 0;
    for (std::size_t i = 1; i < candidates.size(); ++i) {
        if (scores[i] > scores[best] ||
            (scores[i] == scores[best] && candidates[i] < candidates[best]))
            best = i;
    }
    LearnedWeights out;
    out.weights = candidates[best];
    out.overall_performance = scores[best];
    out.n_candidates = static_cast<int>(candidates.size());
    return out;
}

}  // namespace bdsim
