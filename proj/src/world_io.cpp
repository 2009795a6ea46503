#include "bdsim/world_io.hpp"

#include <algorithm>
#include <filesystem>
#include <map>
#include <unordered_map>

#include "bdsim/csv.hpp"
#include "bdsim/errors.hpp"

namespace bdsim {

namespace fs = std::filesystem;

namespace {

std::string join(const std::string& dir, const char* file) {
    return (fs::path(dir) / file).string();
}

std::unordered_map<std::string, std::uint32_t> index_of_ids(const World& world) {
    std::unordered_map<std::string, std::uint32_t> map;
    map.reserve(world.communities.size());
    for (std::size_t i = 0; i < world.communities.size(); ++i) {
        if (!map.emplace(world.communities[i].id, static_cast<std::uint32_t>(i)).second)
            throw ValidationError("duplicate community id " + world.communities[i].id);
    }
    return map;
}

std::string fmt(double v) { return csv::format_double(v); }

}  // namespace

World load_world(const std::string& dir) {
    World world;

    // params.csv first: the age band layout decides the communities schema.
    std::map<std::string, double> kv;
    {
        const auto t = csv::read_table(join(dir, "params.csv"));
        const int key_col = t.require_column("key");
        const int val_col = t.require_column("value");
        for (std::size_t r = 0; r < t.rows.size(); ++r)
            kv[t.rows[r][static_cast<std::size_t>(key_col)]] = csv::parse_double(t, r, val_col);
    }
    auto take = [&](const char* key, double fallback, bool required = false) {
        const auto it = kv.find(key);
        if (it == kv.end()) {
            if (required)
                throw ValidationError(join(dir, "params.csv") + ": missing key '" +
                                      key + "'");
            return fallback;
        }
        return it->second;
    };
    auto& p = world.params;
    p.beta_poi = take("beta_poi", 0.0, true);
    p.beta_base = take("beta_base", 0.0, true);
    p.latency_period = take("latency_period", 0.0, true);
    p.infectious_period = take("infectious_period", 0.0, true);
    p.initial_infected_fraction = take("initial_infected_fraction", 0.0, true);
    p.death_delay = take("death_delay", 14.0);
    p.vaccine_efficacy = take("vaccine_efficacy", 1.0);
    p.older_cutoff_age = take("older_cutoff_age", 60.0);
    const int n_bands = static_cast<int>(take("n_age_bands", 0.0, true));
    if (n_bands < 1)
        throw ValidationError(join(dir, "params.csv") + ": n_age_bands must be >= 1");
    for (int b = 0; b < n_bands; ++b) {
        const std::string suffix = std::to_string(b);
        AgeBand band;
        band.lower = take(("age_band_lower_" + suffix).c_str(), 0.0, true);
        band.upper = take(("age_band_upper_" + suffix).c_str(), 0.0, true);
        p.age_bands.push_back(band);
        p.ifr_by_age.push_back(take(("ifr_age_" + suffix).c_str(), 0.0, true));
    }
    world.mobility.hours = static_cast<int>(take("hours", 0.0, true));
    world.mobility.max_trips_per_hour = take("max_trips_per_hour", 10.0);

    {
        const auto t = csv::read_table(join(dir, "communities.csv"));
        const int id_col = t.require_column("id");
        const int pop_col = t.require_column("population");
        const int income_col = t.require_column("income");
        const int ess_col = t.require_column("essential_frac");
        std::vector<int> age_cols;
        for (int b = 0; b < n_bands; ++b)
            age_cols.push_back(t.require_column("age_frac_" + std::to_string(b)));
        for (std::size_t r = 0; r < t.rows.size(); ++r) {
            Community c;
            c.id = t.rows[r][static_cast<std::size_t>(id_col)];
            c.population = csv::parse_double(t, r, pop_col);
            c.mean_household_income = csv::parse_double(t, r, income_col);
            c.essential_worker_fraction = csv::parse_double(t, r, ess_col);
            for (int b = 0; b < n_bands; ++b) {
                c.age_fractions.push_back(csv::parse_double(t, r, age_cols[static_cast<std::size_t>(b)]));
                if (p.age_bands[static_cast<std::size_t>(b)].lower >= p.older_cutoff_age)
                    c.older_adult_fraction += c.age_fractions.back();
            }
            world.communities.push_back(std::move(c));
        }
    }

    {
        const auto t = csv::read_table(join(dir, "pois.csv"));
        const int id_col = t.require_column("id");
        const int area_col = t.require_column("area");
        const int dwell_col = t.require_column("dwell_time");
        for (std::size_t r = 0; r < t.rows.size(); ++r) {
            Poi poi;
            poi.id = t.rows[r][static_cast<std::size_t>(id_col)];
            poi.area = csv::parse_double(t, r, area_col);
            poi.dwell_time = csv::parse_double(t, r, dwell_col);
            world.pois.push_back(std::move(poi));
        }
    }

    {
        const auto community_index = index_of_ids(world);
        std::unordered_map<std::string, std::uint32_t> poi_index;
        for (std::size_t i = 0; i < world.pois.size(); ++i)
            poi_index.emplace(world.pois[i].id, static_cast<std::uint32_t>(i));

        world.mobility.by_hour.resize(static_cast<std::size_t>(world.mobility.hours));
        // mobility.csv dominates bundle size, so it is parsed streaming.
        const std::string path = join(dir, "mobility.csv");
        std::ifstream in(path);
        if (!in) throw IoError("cannot open " + path);
        std::string line;
        std::size_t lineno = 0;
        int hour_col = -1, comm_col = -1, poi_col = -1, weight_col = -1;
        while (std::getline(in, line)) {
            ++lineno;
            if (line.empty() || line == "\r") continue;
            const auto fields = csv::split_line(line);
            auto context = [&] { return path + ":" + std::to_string(lineno); };
            if (hour_col < 0) {
                for (std::size_t i = 0; i < fields.size(); ++i) {
                    if (fields[i] == "hour") hour_col = static_cast<int>(i);
                    else if (fields[i] == "community_id") comm_col = static_cast<int>(i);
                    else if (fields[i] == "poi_id") poi_col = static_cast<int>(i);
                    else if (fields[i] == "weight") weight_col = static_cast<int>(i);
                }
                if (hour_col < 0 || comm_col < 0 || poi_col < 0 || weight_col < 0)
                    throw ValidationError(path + ": header must name hour, community_id, "
                                          "poi_id and weight");
                continue;
            }
            if (fields.size() <= static_cast<std::size_t>(
                                     std::max({hour_col, comm_col, poi_col, weight_col})))
                throw ValidationError(context() + ": too few fields");
            long hour = 0;
            double weight = 0.0;
            {
                const auto& s = fields[static_cast<std::size_t>(hour_col)];
                const auto res = std::from_chars(s.data(), s.data() + s.size(), hour);
                if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
                    throw ValidationError(context() + ": '" + s + "' is not an integer");
            }
            {
                const auto& s = fields[static_cast<std::size_t>(weight_col)];
                const auto res = std::from_chars(s.data(), s.data() + s.size(), weight);
                if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
                    throw ValidationError(context() + ": '" + s + "' is not a number");
            }
            if (hour < 0 || hour >= world.mobility.hours)
                throw ValidationError(context() + ": hour " + std::to_string(hour) +
                                      " outside [0," +
                                      std::to_string(world.mobility.hours) + ")");
            const auto ci = community_index.find(fields[static_cast<std::size_t>(comm_col)]);
            if (ci == community_index.end())
                throw ValidationError(context() + ": unknown community id " +
                                      fields[static_cast<std::size_t>(comm_col)]);
            const auto pi = poi_index.find(fields[static_cast<std::size_t>(poi_col)]);
            if (pi == poi_index.end())
                throw ValidationError(context() + ": unknown poi id " +
                                      fields[static_cast<std::size_t>(poi_col)]);
            auto& slice = world.mobility.by_hour[static_cast<std::size_t>(hour)];
            slice.community.push_back(ci->second);
            slice.poi.push_back(pi->second);
            slice.weight.push_back(weight);
        }
        if (hour_col < 0)
            throw ValidationError(path + ": empty file, header row required");
    }

    if (fs::exists(join(dir, "observed_deaths.csv"))) {
        const auto t = csv::read_table(join(dir, "observed_deaths.csv"));
        const int day_col = t.require_column("day");
        const int deaths_col = t.require_column("deaths");
        std::vector<std::pair<long, double>> rows;
        for (std::size_t r = 0; r < t.rows.size(); ++r)
            rows.emplace_back(csv::parse_long(t, r, day_col), csv::parse_double(t, r, deaths_col));
        std::sort(rows.begin(), rows.end());
        std::vector<double> daily;
        for (const auto& [day, deaths] : rows) {
            if (day != static_cast<long>(daily.size()))
                throw ValidationError(t.path + ": days must be contiguous from 0");
            daily.push_back(deaths);
        }
        world.observed_daily_deaths = std::move(daily);
    }

    validate_world(world);
    return world;
}

void save_world(const World& world, const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create directory " + dir + ": " + ec.message());

    const auto& p = world.params;
    const std::size_t n_bands = p.age_bands.size();
    {
        csv::Writer w(join(dir, "params.csv"));
        w.row({"key", "value"});
        w.row({"beta_poi", fmt(p.beta_poi)});
        w.row({"beta_base", fmt(p.beta_base)});
        w.row({"latency_period", fmt(p.latency_period)});
        w.row({"infectious_period", fmt(p.infectious_period)});
        w.row({"initial_infected_fraction", fmt(p.initial_infected_fraction)});
        w.row({"death_delay", fmt(p.death_delay)});
        w.row({"vaccine_efficacy", fmt(p.vaccine_efficacy)});
        w.row({"older_cutoff_age", fmt(p.older_cutoff_age)});
        w.row({"n_age_bands", std::to_string(n_bands)});
        for (std::size_t b = 0; b < n_bands; ++b) {
            const std::string suffix = std::to_string(b);
            w.row({"age_band_lower_" + suffix, fmt(p.age_bands[b].lower)});
            w.row({"age_band_upper_" + suffix, fmt(p.age_bands[b].upper)});
            w.row({"ifr_age_" + suffix, fmt(p.ifr_by_age[b])});
        }
        w.row({"hours", std::to_string(world.mobility.hours)});
        w.row({"max_trips_per_hour", fmt(world.mobility.max_trips_per_hour)});
        w.close();
    }
    {
        csv::Writer w(join(dir, "communities.csv"));
        std::vector<std::string> header{"id", "population", "income", "essential_frac"};
        for (std::size_t b = 0; b < n_bands; ++b)
            header.push_back("age_frac_" + std::to_string(b));
        w.row(header);
        for (const auto& c : world.communities) {
            std::vector<std::string> row{c.id, fmt(c.population),
                                         fmt(c.mean_household_income),
                                         fmt(c.essential_worker_fraction)};
            for (double f : c.age_fractions) row.push_back(fmt(f));
            w.row(row);
        }
        w.close();
    }
    {
        csv::Writer w(join(dir, "pois.csv"));
        w.row({"id", "area", "dwell_time"});
        for (const auto& poi : world.pois)
            w.row({poi.id, fmt(poi.area), fmt(poi.dwell_time)});
        w.close();
    }
    {
        csv::Writer w(join(dir, "mobility.csv"));
        w.row({"hour", "community_id", "poi_id", "weight"});
        for (int t = 0; t < world.mobility.hours; ++t) {
            const auto& slice = world.mobility.by_hour[static_cast<std::size_t>(t)];
            for (std::size_t k = 0; k < slice.size(); ++k)
                w.row({std::to_string(t), world.communities[slice.community[k]].id,
                       world.pois[slice.poi[k]].id, fmt(slice.weight[k])});
        }
        w.close();
    }
    if (world.observed_daily_deaths) {
        csv::Writer w(join(dir, "observed_deaths.csv"));
        w.row({"day", "deaths"});
        for (std::size_t d = 0; d < world.observed_daily_deaths->size(); ++d)
            w.row({std::to_string(d), fmt((*world.observed_daily_deaths)[d])});
        w.close();
    }
}

VaccinePlan load_plan(const std::string& path, const World& world) {
    const auto community_index = index_of_ids(world);
    VaccinePlan plan;
    plan.vaccinated_fraction.assign(world.communities.size(), 0.0);
    plan.administration_day.assign(world.communities.size(), 0);
    const auto t = csv::read_table(path);
    const int id_col = t.require_column("community_id");
    const int frac_col = t.require_column("fraction");
    const int day_col = t.require_column("day");
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        const auto& id = t.rows[r][static_cast<std::size_t>(id_col)];
        const auto it = community_index.find(id);
        if (it == community_index.end())
            throw ValidationError(path + ":" + std::to_string(t.line_numbers[r]) +
                                  ": unknown community id " + id);
        const double frac = csv::parse_double(t, r, frac_col);
        const long day = csv::parse_long(t, r, day_col);
        if (frac < 0.0 || frac > 1.0)
            throw ValidationError(path + ":" + std::to_string(t.line_numbers[r]) +
                                  ": fraction not in [0,1]");
        if (day < 0)
            throw ValidationError(path + ":" + std::to_string(t.line_numbers[r]) +
                                  ": day must be >= 0");
        plan.vaccinated_fraction[it->second] = frac;
        plan.administration_day[it->second] = static_cast<int>(day);
    }
    return plan;
}

void save_plan(const VaccinePlan& plan, const World& world, const std::string& path) {
    csv::Writer w(path);
    w.row({"community_id", "fraction", "day"});
    for (std::size_t c = 0; c < world.communities.size(); ++c)
        w.row({world.communities[c].id, fmt(plan.vaccinated_fraction[c]),
               std::to_string(plan.administration_day[c])});
    w.close();
}

void save_per_community(const std::vector<double>& deaths,
                        const std::vector<double>& infections, const World& world,
                        const std::string& path) {
    csv::Writer w(path);
    w.row({"community_id", "cumulative_deaths", "cumulative_infections"});
    for (std::size_t c = 0; c < world.communities.size(); ++c)
        w.row({world.communities[c].id, fmt(deaths[c]), fmt(infections[c])});
    w.close();
}

void load_per_community(const std::string& path, const World& world,
                        std::vector<double>& deaths, std::vector<double>& infections) {
    const auto community_index = index_of_ids(world);
    deaths.assign(world.communities.size(), 0.0);
    infections.assign(world.communities.size(), 0.0);
    const auto t = csv::read_table(path);
    const int id_col = t.require_column("community_id");
    const int deaths_col = t.require_column("cumulative_deaths");
    const int inf_col = t.require_column("cumulative_infections");
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        const auto& id = t.rows[r][static_cast<std::size_t>(id_col)];
        const auto it = community_index.find(id);
        if (it == community_index.end())
            throw ValidationError(path + ":" + std::to_string(t.line_numbers[r]) +
                                  ": unknown community id " + id);
        deaths[it->second] = csv::parse_double(t, r, deaths_col);
        infections[it->second] = csv::parse_double(t, r, inf_col);
    }
}

void save_daily_deaths(const std::vector<double>& daily, const std::string& path) {
    csv::Writer w(path);
    w.row({"day", "deaths"});
    for (std::size_t d = 0; d < daily.size(); ++d)
        w.row({std::to_string(d), fmt(daily[d])});
    w.close();
}

std::vector<double> load_daily_deaths(const std::string& path) {
    const auto t = csv::read_table(path);
    const int day_col = t.require_column("day");
    const int deaths_col = t.require_column("deaths");
    std::vector<std::pair<long, double>> rows;
    for (std::size_t r = 0; r < t.rows.size(); ++r)
        rows.emplace_back(csv::parse_long(t, r, day_col), csv::parse_double(t, r, deaths_col));
    std::sort(rows.begin(), rows.end());
    std::vector<double> daily;
    for (const auto& [day, deaths] : rows) {
        if (day != static_cast<long>(daily.size()))
            throw ValidationError(path + ": days must be contiguous from 0");
        daily.push_back(deaths);
    }
    return daily;
}

}  // namespace bdsim
