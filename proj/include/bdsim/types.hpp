#ifndef BDSIM_TYPES_HPP
#define BDSIM_TYPES_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace bdsim {

// One census-block-group-like community: the model's atomic population unit.
struct Community {
    std::string id;
    double population = 0.0;                // persons, >= 1
    std::vector<double> age_fractions;      // one entry per age band, sums to 1
    double older_adult_fraction = 0.0;      // sum of age_fractions over "older" bands
    double mean_household_income = 0.0;     // currency units, > 0
    double essential_worker_fraction = 0.0; // in [0,1]
};

// A venue where cross-community transmission happens.
struct Poi {
    std::string id;
    double area = 0.0;        // square meters, > 0
    double dwell_time = 0.0;  // hours, > 0
};

// Sparse hourly community -> POI visit weights. One slice per hour; entries
// are parallel arrays (community index, poi index, expected visits).
struct HourSlice {
    std::vector<std::uint32_t> community;
    std::vector<std::uint32_t> poi;
    std::vector<double> weight;

    std::size_t size() const { return weight.size(); }
};

struct MobilityTensor {
    int hours = 0;  // multiple of 24
    double max_trips_per_hour = 10.0;  // sanity cap on per-capita hourly visits
    std::vector<HourSlice> by_hour;
};

// [lower, upper) age band in years; the last band is open-ended.
struct AgeBand {
    double lower = 0.0;
    double upper = 0.0;
};

struct EpidemicParams {
    double beta_poi = 0.0;       // POI transmission scale, per contact-hour
    double beta_base = 0.0;      // within-community transmission, per day
    double latency_period = 1.0;    // days, E -> I
    double infectious_period = 1.0; // days, I -> R
    std::vector<AgeBand> age_bands;
    std::vector<double> ifr_by_age;  // one fraction per band
    double older_cutoff_age = 60.0;  // bands with lower >= cutoff count as "older"
    double initial_infected_fraction = 0.0;
    double death_delay = 14.0;       // days from I->R to death accounting
    double vaccine_efficacy = 1.0;   // fraction of vaccinated that become immune
};

// Immutable scenario universe shared by all runs.
struct World {
    std::vector<Community> communities;
    std::vector<Poi> pois;
    MobilityTensor mobility;
    EpidemicParams params;
    std::optional<std::vector<double>> observed_daily_deaths;

    double total_population() const {
        double total = 0.0;
        for (const auto& c : communities) total += c.population;
        return total;
    }
};

// Per-community S/E/I/R/V occupancy plus cumulative accounted deaths.
// Real-valued in deterministic mode, integer-valued in stochastic mode.
struct CompartmentState {
    std::vector<double> susceptible;
    std::vector<double> exposed;
    std::vector<double> infectious;
    std::vector<double> recovered;
    std::vector<double> vaccinated_immune;
    std::vector<double> cumulative_deaths;

    std::size_t size() const { return susceptible.size(); }
};

// Per-community vaccinated population fraction plus administration day.
struct VaccinePlan {
    std::vector<double> vaccinated_fraction;  // of community population, in [0,1]
    std::vector<int> administration_day;
    bool shortfall = false;  // set when acceptance caps made the budget unsatisfiable
};

// The four outcome metrics for one (world, plan) evaluation, all relative
// changes against the unvaccinated run of the same world; positive = better.
struct OutcomeReport {
    double utility_change = 0.0;
    double equity_change_age = 0.0;
    double equity_change_income = 0.0;
    double equity_change_occupation = 0.0;
    double overall_performance = 0.0;  // sum of the four changes
};

enum class Dimension { Age, Income, Occupation };

inline const char* dimension_name(Dimension d) {
    switch (d) {
        case Dimension::Age: return "age";
        case Dimension::Income: return "income";
        case Dimension::Occupation: return "occupation";
    }
    return "?";
}

// Feature vectors used for grouping and ranking. Age and occupation are
// "higher = more disadvantaged"; income is the raw mean household income.
inline std::vector<double> feature_values(const World& world, Dimension dim) {
    std::vector<double> v;
    v.reserve(world.communities.size());
    for (const auto& c : world.communities) {
        switch (dim) {
            case Dimension::Age: v.push_back(c.older_adult_fraction); break;
            case Dimension::Income: v.push_back(c.mean_household_income); break;
            case Dimension::Occupation: v.push_back(c.essential_worker_fraction); break;
        }
    }
    return v;
}

inline std::vector<double> population_values(const World& world) {
    std::vector<double> v;
    v.reserve(world.communities.size());
    for (const auto& c : world.communities) v.push_back(c.population);
    return v;
}

// Throws ValidationError naming the offending community/POI/entry.
void validate_world(const World& world);

}  // namespace bdsim

#endif
