#include "bdsim/types.hpp"

#include <cmath>
#include <sstream>

#include "bdsim/errors.hpp"

namespace bdsim {

namespace {

void fail(const std::string& msg) { throw ValidationError(msg); }

bool is_fraction(double x) { return x >= 0.0 && x <= 1.0; }

}  // namespace

void validate_world(const World& world) {
    const auto& params = world.params;
    const std::size_t n_bands = params.age_bands.size();
    if (n_bands == 0) fail("params: at least one age band required");
    if (params.ifr_by_age.size() != n_bands)
        fail("params: ifr_by_age length does not match age band count");
    for (std::size_t b = 0; b < n_bands; ++b) {
        if (!is_fraction(params.ifr_by_age[b])) {
            std::ostringstream msg;
            msg << "params: ifr for age band " << b << " not in [0,1]";
            fail(msg.str());
        }
    }
    if (params.beta_poi < 0.0 || params.beta_base < 0.0)
        fail("params: transmission rates must be >= 0");
    if (params.latency_period <= 0.0 || params.infectious_period <= 0.0)
        fail("params: latency and infectious periods must be > 0");
    if (!is_fraction(params.initial_infected_fraction))
        fail("params: initial_infected_fraction not in [0,1]");
    if (params.death_delay < 0.0) fail("params: death_delay must be >= 0");
    if (!is_fraction(params.vaccine_efficacy))
        fail("params: vaccine_efficacy not in [0,1]");

    for (const auto& c : world.communities) {
        if (c.population < 1.0) fail("community " + c.id + ": population must be >= 1");
        if (c.mean_household_income <= 0.0)
            fail("community " + c.id + ": mean household income must be > 0");
        if (!is_fraction(c.essential_worker_fraction))
            fail("community " + c.id + ": essential worker fraction not in [0,1]");
        if (c.age_fractions.size() != n_bands)
            fail("community " + c.id + ": age fraction count does not match band count");
        double sum = 0.0;
        double older = 0.0;
        for (std::size_t b = 0; b < n_bands; ++b) {
            const double f = c.age_fractions[b];
            if (!is_fraction(f))
                fail("community " + c.id + ": age fraction not in [0,1]");
            sum += f;
            if (params.age_bands[b].lower >= params.older_cutoff_age) older += f;
        }
        if (std::abs(sum - 1.0) > 1e-9)
            fail("community " + c.id + ": age fractions sum to " +
                 std::to_string(sum) + ", expected 1");
        if (std::abs(older - c.older_adult_fraction) > 1e-9)
            fail("community " + c.id +
                 ": older_adult_fraction inconsistent with age fractions");
    }

    for (const auto& p : world.pois) {
        if (p.area <= 0.0) fail("poi " + p.id + ": area must be > 0");
        if (p.dwell_time <= 0.0) fail("poi " + p.id + ": dwell time must be > 0");
    }

    const auto& mob = world.mobility;
    if (mob.hours < 0 || mob.hours % 24 != 0)
        fail("mobility: hours must be a nonnegative multiple of 24");
    if (mob.by_hour.size() != static_cast<std::size_t>(mob.hours))
        fail("mobility: slice count does not match hours");
    if (mob.max_trips_per_hour <= 0.0)
        fail("mobility: max_trips_per_hour must be > 0");
    std::vector<double> hourly_total(world.communities.size());
    for (int t = 0; t < mob.hours; ++t) {
        const auto& slice = mob.by_hour[static_cast<std::size_t>(t)];
        if (slice.community.size() != slice.size() || slice.poi.size() != slice.size())
            fail("mobility: ragged slice at hour " + std::to_string(t));
        std::fill(hourly_total.begin(), hourly_total.end(), 0.0);
        for (std::size_t k = 0; k < slice.size(); ++k) {
            if (slice.community[k] >= world.communities.size())
                fail("mobility: hour " + std::to_string(t) +
                     " references unknown community index " +
                     std::to_string(slice.community[k]));
            if (slice.poi[k] >= world.pois.size())
                fail("mobility: hour " + std::to_string(t) +
                     " references unknown poi index " + std::to_string(slice.poi[k]));
            if (!(slice.weight[k] >= 0.0))
                fail("mobility: negative weight at hour " + std::to_string(t));
            hourly_total[slice.community[k]] += slice.weight[k];
        }
        for (std::size_t c = 0; c < hourly_total.size(); ++c) {
            const double cap =
                world.communities[c].population * mob.max_trips_per_hour;
            if (hourly_total[c] > cap * (1.0 + 1e-9))
                fail("mobility: community " + world.communities[c].id + " makes " +
                     std::to_string(hourly_total[c]) + " visits in hour " +
                     std::to_string(t) + ", above cap " + std::to_string(cap));
        }
    }

    if (world.observed_daily_deaths) {
        for (double d : *world.observed_daily_deaths)
            if (!(d >= 0.0)) fail("observed_deaths: negative daily deaths");
    }
}

}  // namespace bdsim
