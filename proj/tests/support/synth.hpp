#pragma once

// Synthetic warehouse builder for query tests: small attribute pools, random
// but integrity-consistent facts.

#include <map>
#include <random>
#include <string>
#include <vector>

#include "trajdw/geo.hpp"
#include "trajdw/warehouse.hpp"

namespace oracles {

// attribute tuple for a dimension with named overrides, "UNKNOWN" elsewhere
inline std::vector<std::string> dim_tuple(const std::string& dim,
                                          const std::map<std::string, std::string>& overrides) {
    const auto& schema = trajdw::wh::Warehouse::dimension_schema(dim);
    std::vector<std::string> attrs;
    for (const auto& col : schema.attr_columns) {
        auto it = overrides.find(col);
        attrs.push_back(it != overrides.end() ? it->second : "UNKNOWN");
    }
    return attrs;
}

inline std::string square_wkt(double lat, double lon, double half) {
    auto f = trajdw::geo::format_double;
    return "POLYGON((" + f(lon - half) + " " + f(lat - half) + ", " + f(lon + half) + " " +
           f(lat - half) + ", " + f(lon + half) + " " + f(lat + half) + ", " + f(lon - half) +
           " " + f(lat + half) + ", " + f(lon - half) + " " + f(lat - half) + "))";
}

inline std::string point_wkt(double lat, double lon) {
    auto f = trajdw::geo::format_double;
    return "POINT(" + f(lon) + " " + f(lat) + ")";
}

inline trajdw::wh::Warehouse random_warehouse(std::mt19937& rng, std::size_t n_facts) {
    using trajdw::wh::FactRow;
    using trajdw::wh::Warehouse;
    Warehouse w;

    std::vector<std::int64_t> geo_keys = {0}, temp_keys = {0}, event_keys = {0}, traj_keys = {0},
                              social_keys = {0};
    // a few members inside the Recife study rectangle, a few elsewhere
    const double lats[] = {-8.12, -8.10, -8.09, 40.0, -8.11};
    const double lons[] = {-34.95, -34.93, -34.91, 2.0, -34.92};
    const char* cities[] = {"Recife", "Recife", "Olinda", "Paris", "Recife"};
    const char* countries[] = {"Brazil", "Brazil", "Brazil", "France", "Brazil"};
    for (int k = 0; k < 5; ++k) {
        geo_keys.push_back(w.resolve_dimension_member(
            "geographical",
            dim_tuple("geographical", {{"Continent", k == 3 ? "Europe" : "South America"},
                                       {"Country", countries[k]},
                                       {"City", cities[k]},
                                       {"District", "D" + std::to_string(k)},
                                       {"GeoObjectType", square_wkt(lats[k], lons[k], 0.002)},
                                       {"LandmarkObjectName", "L" + std::to_string(k)}})));
    }
    const char* seasons[] = {"Summer", "Winter", "Summer", "Fall"};
    const char* years[] = {"2009", "2012", "2014", "2016"};
    const char* months[] = {"01", "06", "02", "10"};
    const char* days[] = {"03", "17", "21", "08"};
    for (int k = 0; k < 4; ++k) {
        for (int d = 0; d < 2; ++d) {
            temp_keys.push_back(w.resolve_dimension_member(
                "temporal", dim_tuple("temporal", {{"CalendarYear", years[k]},
                                                   {"Quarter", "Q" + std::to_string(k % 4 + 1)},
                                                   {"CalendarSeason", seasons[k]},
                                                   {"Month", months[k]},
                                                   {"Week", d ? "07" : "25"},
                                                   {"DayType", d ? "WeekEndDay" : "WeekDay"},
                                                   {"Day", days[d ? k : 3 - k]},
                                                   {"Hour", "09"}})));
        }
    }
    const char* items[] = {"Festival", "Carnival", "Exhibition"};
    for (int k = 0; k < 3; ++k) {
        event_keys.push_back(w.resolve_dimension_member(
            "events", dim_tuple("events", {{"EventItemName", items[k]},
                                           {"EventGoalName", std::string(items[k]) + " goal"},
                                           {"EventActivityName", "act" + std::to_string(k)},
                                           {"EventEnvironmentType", "Temperature"}})));
    }
    const char* types[] = {"Walking", "Biking", "Driving", "Flight"};
    for (int k = 0; k < 4; ++k) {
        traj_keys.push_back(w.resolve_dimension_member(
            "trajectory",
            dim_tuple("trajectory",
                      {{"TrajectoryObjectType", k == 3 ? "Animal" : "Human Being"},
                       {"TrajectoryModelName", k == 3 ? "Bird" : "Tourist"},
                       {"TrajectoryTransportationModeName", k == 3 ? "Air" : "Land"},
                       {"TrajectoryTransportationTypeName", types[k]},
                       {"TrajSegmentSemanticStartPoint",
                        point_wkt(lats[k], lons[k])},
                       {"TrajSegmentSemanticEndPoint",
                        point_wkt(lats[(k + 1) % 5], lons[(k + 1) % 5])}})));
    }
    social_keys.push_back(w.resolve_dimension_member(
        "social", dim_tuple("social", {{"SocialMediumType", "tweet-based"},
                                       {"ExpressiveThought", "positive"}})));

    std::uniform_int_distribution<std::size_t> pick_geo(0, geo_keys.size() - 1);
    std::uniform_int_distribution<std::size_t> pick_temp(0, temp_keys.size() - 1);
    std::uniform_int_distribution<std::size_t> pick_event(0, event_keys.size() - 1);
    std::uniform_int_distribution<std::size_t> pick_traj(0, traj_keys.size() - 1);
    std::uniform_int_distribution<std::size_t> pick_social(0, social_keys.size() - 1);
    std::uniform_int_distribution<int> dur(0, 900);
    std::uniform_real_distribution<double> dist(0.0, 5000.0);
    std::uniform_int_distribution<int> pts(1, 40);

    for (std::size_t k = 0; k < n_facts; ++k) {
        FactRow f;
        f.traj_id = "s" + std::to_string(k % 7);
        f.segment_ordinal = static_cast<std::int64_t>(k / 7);
        f.geo_space_id = geo_keys[pick_geo(rng)];
        f.temp_inst_id = temp_keys[pick_temp(rng)];
        f.events_rep_id = event_keys[pick_event(rng)];
        f.traj_rep_id = traj_keys[pick_traj(rng)];
        f.social_inter_id = social_keys[pick_social(rng)];
        f.duration_s = dur(rng);
        f.travel_distance_m = f.duration_s > 0 ? dist(rng) : 0.0;
        f.average_trajectory_speed =
            f.duration_s > 0 ? f.travel_distance_m / f.duration_s : 0.0;
        f.num_points = pts(rng);
        f.num_semantic_stops = k % 3 == 0 ? 1 : 0;
        f.num_mobility_modes = 1 - f.num_semantic_stops;
        f.square_area_m2 = dist(rng);
        f.event_time_duration_s = f.events_rep_id ? dur(rng) : 0;
        f.activity_duration_s = f.event_time_duration_s;
        w.insert_fact(std::move(f));
    }
    return w;
}

}  // namespace oracles
