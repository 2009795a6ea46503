#include "bdsim/synthworld.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>

#include "bdsim/errors.hpp"
#include "bdsim/rng.hpp"
#include "bdsim/stats.hpp"

namespace bdsim {

namespace {

// Hour-of-day visit shares: quiet overnight, commute peaks at 8:00 and 18:00.
constexpr std::array<double, 24> kDiurnalRaw = {
    0.0, 0.0, 0.0, 0.0, 0.0, 0.0,          // 00:00-05:00
    0.4, 0.8, 1.5, 1.1, 0.9, 0.9,          // 06:00-11:00
    1.0, 0.9, 0.8, 0.8, 0.9, 1.2,          // 12:00-17:00
    1.6, 1.2, 0.8, 0.6, 0.4, 0.2};         // 18:00-23:00

std::array<double, 24> diurnal_template() {
    std::array<double, 24> t = kDiurnalRaw;
    const double total = std::accumulate(t.begin(), t.end(), 0.0);
    for (double& v : t) v /= total;
    return t;
}

// Reorders independently sampled marginal values so their ranks follow the
// latent Gaussian column: the marginal distribution is preserved exactly
// while the rank correlation comes from the copula.
std::vector<double> rank_reorder(const std::vector<double>& marginal,
                                 const std::vector<double>& latent) {
    std::vector<double> sorted = marginal;
    std::sort(sorted.begin(), sorted.end());
    const auto order = stats::argsort(latent);
    std::vector<double> out(marginal.size());
    for (std::size_t r = 0; r < order.size(); ++r) out[order[r]] = sorted[r];
    return out;
}

}  // namespace

SynthConfig default_synth_config() {
    SynthConfig c;
    c.rho_age_income = 0.14;
    c.rho_age_essential = -0.2;
    c.rho_income_essential = 0.28;
    c.rho_age_mobility = -0.29;
    c.rho_income_mobility = -0.45;
    c.rho_essential_mobility = 0.39;
    return c;
}

std::array<std::array<double, 4>, 4> correlation_matrix(const SynthConfig& c) {
    return {{{1.0, c.rho_age_income, c.rho_age_essential, c.rho_age_mobility},
             {c.rho_age_income, 1.0, c.rho_income_essential, c.rho_income_mobility},
             {c.rho_age_essential, c.rho_income_essential, 1.0, c.rho_essential_mobility},
             {c.rho_age_mobility, c.rho_income_mobility, c.rho_essential_mobility, 1.0}}};
}

EpidemicParams default_epidemic_params() {
    EpidemicParams p;
    p.beta_poi = 0.02;
    p.beta_base = 0.12;
    p.latency_period = 3.0;
    p.infectious_period = 5.0;
    p.older_cutoff_age = 60.0;
    for (int b = 0; b < 9; ++b)
        p.age_bands.push_back({b * 10.0, b == 8 ? 200.0 : (b + 1) * 10.0});
    p.ifr_by_age = {1e-5, 2e-5, 1e-4, 3e-4, 1.2e-3, 4e-3, 1.6e-2, 6e-2, 1.4e-1};
    p.initial_infected_fraction = 0.002;
    p.death_delay = 14.0;
    p.vaccine_efficacy = 1.0;
    return p;
}

World generate_world(const SynthConfig& config) {
    if (config.n_communities < 1 || config.n_pois < 1 || config.horizon_days < 1)
        throw ConfigError("generate_world: counts must be >= 1");
    if (config.population_min < 1.0 || config.population_max < config.population_min)
        throw ConfigError("generate_world: bad population range");
    const auto rho = correlation_matrix(config);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            if (i != j && std::abs(rho[i][j]) >= 1.0)
                throw ConfigError("generate_world: |correlation| must be < 1");

    Eigen::Matrix4d sigma;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) sigma(i, j) = rho[i][j];
    const Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> eig(sigma);
    if (eig.eigenvalues().minCoeff() < -1e-12)
        throw ConfigError("generate_world: correlation targets are not positive semi-definite");
    const Eigen::Matrix4d factor =
        eig.eigenvectors() *
        eig.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();

    const std::size_t n = static_cast<std::size_t>(config.n_communities);
    Rng rng(mix_seed(config.seed, 0x5EEDu));

    // Latent copula draws.
    std::array<std::vector<double>, 4> latent;
    for (auto& col : latent) col.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        Eigen::Vector4d eps;
        for (int k = 0; k < 4; ++k) eps(k) = rng.normal();
        const Eigen::Vector4d z = factor * eps;
        for (int k = 0; k < 4; ++k) latent[static_cast<std::size_t>(k)][i] = z(k);
    }

    // Marginals, sampled independently then rank-matched to the copula.
    std::vector<double> age(n), income(n), essential(n), mobility(n);
    for (std::size_t i = 0; i < n; ++i) age[i] = rng.beta(2.2, 8.8);
    for (std::size_t i = 0; i < n; ++i) income[i] = rng.lognormal(11.0, 0.45);
    for (std::size_t i = 0; i < n; ++i) essential[i] = rng.beta(3.0, 9.0);
    for (std::size_t i = 0; i < n; ++i) mobility[i] = rng.gamma(3.0, 1.0);
    age = rank_reorder(age, latent[0]);
    income = rank_reorder(income, latent[1]);
    essential = rank_reorder(essential, latent[2]);
    mobility = rank_reorder(mobility, latent[3]);

    World world;
    world.params = default_epidemic_params();
    const auto& params = world.params;
    std::size_t n_older = 0;
    for (const auto& band : params.age_bands)
        if (band.lower >= params.older_cutoff_age) ++n_older;
    const std::size_t n_young = params.age_bands.size() - n_older;

    const auto diurnal = diurnal_template();
    const double diurnal_max = *std::max_element(diurnal.begin(), diurnal.end());
    // Keep per-capita hourly visits under the tensor's sanity cap.
    const double mobility_cap =
        0.9 * world.mobility.max_trips_per_hour / diurnal_max;

    world.communities.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        Community c;
        c.id = "c" + std::to_string(i);
        c.population = static_cast<double>(rng.uniform_int(
            static_cast<std::int64_t>(config.population_min),
            static_cast<std::int64_t>(config.population_max)));
        c.older_adult_fraction = age[i];
        c.mean_household_income = income[i];
        c.essential_worker_fraction = essential[i];
        // Old/young mass split uniformly across the respective bands.
        c.age_fractions.resize(params.age_bands.size());
        for (std::size_t b = 0; b < params.age_bands.size(); ++b) {
            const bool older = params.age_bands[b].lower >= params.older_cutoff_age;
            c.age_fractions[b] = older ? age[i] / static_cast<double>(n_older)
                                       : (1.0 - age[i]) / static_cast<double>(n_young);
        }
        world.communities.push_back(std::move(c));
    }

    world.pois.reserve(static_cast<std::size_t>(config.n_pois));
    for (int p = 0; p < config.n_pois; ++p) {
        Poi poi;
        poi.id = "p" + std::to_string(p);
        poi.area = rng.lognormal(std::log(150.0), 0.3);
        poi.dwell_time = rng.uniform(1.0, 2.0);
        world.pois.push_back(std::move(poi));
    }

    // Each community frequents a fixed small set of POIs, visits split
    // evenly among them; its hourly visits are total daily mobility times
    // the diurnal share times the affinity, identical across days.
    const int k_pois = std::min(config.pois_per_community, config.n_pois);
    std::vector<std::vector<std::uint32_t>> visited(n);
    std::vector<std::vector<double>> affinity(n);
    std::vector<std::uint32_t> all_pois(static_cast<std::size_t>(config.n_pois));
    std::iota(all_pois.begin(), all_pois.end(), 0u);
    for (std::size_t i = 0; i < n; ++i) {
        auto pool = all_pois;
        rng.shuffle(pool);
        visited[i].assign(pool.begin(), pool.begin() + k_pois);
        std::sort(visited[i].begin(), visited[i].end());
        affinity[i].assign(static_cast<std::size_t>(k_pois), 1.0 / k_pois);
    }

    world.mobility.hours = config.horizon_days * 24;
    world.mobility.by_hour.resize(static_cast<std::size_t>(world.mobility.hours));
    for (int t = 0; t < world.mobility.hours; ++t) {
        const double share = diurnal[static_cast<std::size_t>(t % 24)];
        if (share <= 0.0) continue;
        auto& slice = world.mobility.by_hour[static_cast<std::size_t>(t)];
        slice.community.reserve(n * static_cast<std::size_t>(k_pois));
        slice.poi.reserve(n * static_cast<std::size_t>(k_pois));
        slice.weight.reserve(n * static_cast<std::size_t>(k_pois));
        for (std::size_t i = 0; i < n; ++i) {
            const double daily_visits =
                std::min(mobility[i], mobility_cap) * world.communities[i].population;
            for (std::size_t k = 0; k < visited[i].size(); ++k) {
                slice.community.push_back(static_cast<std::uint32_t>(i));
                slice.poi.push_back(visited[i][k]);
                slice.weight.push_back(daily_visits * share * affinity[i][k]);
            }
        }
    }

    validate_world(world);
    return world;
}

}  // namespace bdsim
