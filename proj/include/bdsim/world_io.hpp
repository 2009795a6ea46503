#ifndef BDSIM_WORLD_IO_HPP
#define BDSIM_WORLD_IO_HPP

#include <string>
#include <vector>

#include "bdsim/types.hpp"

namespace bdsim {

// A world bundle is a directory holding communities.csv, pois.csv,
// mobility.csv, params.csv and optionally observed_deaths.csv. Numeric
// fields survive a save/load round trip bit-exactly.
World load_world(const std::string& dir);
void save_world(const World& world, const std::string& dir);

// Plan CSV: community_id,fraction,day. Loading resolves ids against the
// world and leaves unlisted communities at fraction 0, day 0.
VaccinePlan load_plan(const std::string& path, const World& world);
void save_plan(const VaccinePlan& plan, const World& world, const std::string& path);

// Per-community result CSV: community_id,cumulative_deaths,cumulative_infections.
void save_per_community(const std::vector<double>& deaths,
                        const std::vector<double>& infections, const World& world,
                        const std::string& path);
void load_per_community(const std::string& path, const World& world,
                        std::vector<double>& deaths, std::vector<double>& infections);

void save_daily_deaths(const std::vector<double>& daily, const std::string& path);
std::vector<double> load_daily_deaths(const std::string& path);

}  // namespace bdsim

#endif
