#include "trajdw/etl.hpp"

#include <unistd.h>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "trajdw/csv.hpp"

namespace fs = std::filesystem;

namespace trajdw::etl {

namespace {

std::string read_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw FileNotFound("cannot open " + path);
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t");
    return s.substr(a, b - a + 1);
}

std::string pad2(unsigned v) {
    char buf[8];
    std::snprintf(buf, sizeof buf, "%02u", v);
    return buf;
}

}  // namespace

EtlConfig parse_config(const std::string& path) {
    const std::string text = read_file(path);
    const fs::path base = fs::path(path).parent_path();
    EtlConfig cfg;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    auto resolve = [&](const std::string& p) { return (base / p).lexically_normal().string(); };
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#' || t[0] == ';' || t[0] == '[') continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos)
            throw ParseError(path + ":" + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(t.substr(0, eq));
        const std::string value = trim(t.substr(eq + 1));
        if (key == "points") cfg.points_path = resolve(value);
        else if (key == "pois") cfg.pois_path = resolve(value);
        else if (key == "events") cfg.events_path = resolve(value);
        else if (key == "posts") cfg.posts_path = resolve(value);
        else if (key == "goal_rules") cfg.goal_rules_path = resolve(value);
        else if (key == "eps_meters") cfg.params.eps_meters = std::stod(value);
        else if (key == "min_stop_duration_s") cfg.params.min_stop_duration_s = std::stod(value);
        else if (key == "hemisphere") {
            if (value == "North") cfg.hemisphere = timeutil::Hemisphere::North;
            else if (value == "South") cfg.hemisphere = timeutil::Hemisphere::South;
            else throw ParseError(path + ":" + std::to_string(lineno) + ": hemisphere must be North or South");
        } else if (key == "domain_profile") cfg.domain_profile = value;
        else if (key == "object_type") cfg.object_type = value;
        else if (key == "model_name") cfg.model_name = value;
        else if (key == "model_feature") cfg.model_feature = value;
        else if (key == "mode_name") cfg.mode_name = value;
        else if (key == "transport_type") cfg.forced_transport_type = value;
        else if (key == "transportation_object") cfg.transportation_object = value;
        else throw ParseError(path + ":" + std::to_string(lineno) + ": unknown key '" + key + "'");
    }
    if (cfg.params.eps_meters <= 0)
        throw ParseError(path + ": eps_meters must be positive");
    if (cfg.domain_profile != "tourism" && cfg.domain_profile != "birds" &&
        cfg.domain_profile != "traffic" && cfg.domain_profile != "custom")
        throw ParseError(path + ": domain_profile must be tourism, birds, traffic, or custom");
    return cfg;
}

namespace {

struct ErrorSink {
    std::vector<std::string> errors;
    void add(const std::string& file, int line, const std::string& reason) {
        errors.push_back(file + ":" + std::to_string(line) + ": " + reason);
    }
    void throw_if_any() const {
        if (errors.empty()) return;
        std::string msg;
        for (const auto& e : errors) {
            if (!msg.empty()) msg += '\n';
            msg += e;
        }
        throw ParseError(msg);
    }
};

std::vector<traj::RawTrajectory> parse_points_csv(const std::string& path, ErrorSink& sink) {
    const auto rows = csv::parse(read_file(path));
    struct Group {
        std::string object_id;
        std::vector<traj::TimedPoint> points;
        int first_line;
    };
    std::map<std::string, Group> groups;
    std::size_t start = 0;
    if (!rows.empty() && !rows[0].empty() && rows[0][0] == "traj_id") start = 1;
    for (std::size_t r = start; r < rows.size(); ++r) {
        const int line = static_cast<int>(r) + 1;
        const auto& c = rows[r];
        if (c.size() != 5) {
            sink.add(path, line, "expected traj_id,object_id,timestamp,lat,lon");
            continue;
        }
        try {
            traj::TimedPoint tp;
            tp.t = timeutil::parse_iso8601_utc(c[2]);
            tp.point = geo::GeoPoint(std::stod(c[3]), std::stod(c[4]));
            auto [it, inserted] = groups.try_emplace(c[0], Group{c[1], {}, line});
            if (!inserted && it->second.object_id != c[1]) {
                sink.add(path, line, "trajectory '" + c[0] + "' has conflicting object ids");
                continue;
            }
            it->second.points.push_back(tp);
        } catch (const std::exception& e) {
            sink.add(path, line, e.what());
        }
    }
    std::vector<traj::RawTrajectory> out;
    for (auto& [traj_id, g] : groups) {
        std::stable_sort(g.points.begin(), g.points.end(),
                         [](const auto& a, const auto& b) { return a.t < b.t; });
        try {
            out.push_back(traj::validate_raw_trajectory(traj_id, g.object_id, std::move(g.points)));
        } catch (const std::exception& e) {
            sink.add(path, g.first_line, e.what());
        }
    }
    return out;  // map iteration keeps traj_id order
}

std::vector<enrich::PointOfInterest> parse_pois_geojson(const std::string& path, ErrorSink& sink) {
    std::vector<enrich::PointOfInterest> out;
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(read_file(path));
    } catch (const nlohmann::json::exception& e) {
        sink.add(path, 1, e.what());
        return out;
    }
    if (!doc.is_object() || doc.value("type", "") != "FeatureCollection" ||
        !doc.contains("features")) {
        sink.add(path, 1, "expected a GeoJSON FeatureCollection");
        return out;
    }
    int n = 0;
    for (const auto& feature : doc["features"]) {
        ++n;
        try {
            const auto& geom = feature.at("geometry");
            if (geom.at("type").get<std::string>() != "Polygon")
                throw std::runtime_error("POI geometry must be a Polygon");
            std::vector<geo::GeoPoint> ring;
            for (const auto& coord : geom.at("coordinates").at(0))
                ring.emplace_back(coord.at(1).get<double>(), coord.at(0).get<double>());
            const auto& props = feature.at("properties");
            enrich::PointOfInterest poi;
            poi.footprint = geo::Polygon(std::move(ring));
            poi.poi_id = props.at("poi_id").get<std::string>();
            poi.object_name = props.at("object_name").get<std::string>();
            poi.object_category = props.at("object_category").get<std::string>();
            poi.allows_stop = props.value("allows_stop", true);
            poi.allows_move = props.value("allows_move", true);
            poi.semantic_purpose = props.value("semantic_purpose", "");
            if (!poi.allows_stop && !poi.allows_move)
                throw std::runtime_error("POI must allow stops or moves");
            if (props.contains("landmark_attrs"))
                for (const auto& [k, val] : props["landmark_attrs"].items())
                    poi.landmark_attrs[k] = val.get<std::string>();
            out.push_back(std::move(poi));
        } catch (const std::exception& e) {
            sink.add(path, n, std::string("feature ") + std::to_string(n) + ": " + e.what());
        }
    }
    return out;
}

std::vector<enrich::EventOfInterest> parse_events_json(const std::string& path, ErrorSink& sink) {
    std::vector<enrich::EventOfInterest> out;
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(read_file(path));
    } catch (const nlohmann::json::exception& e) {
        sink.add(path, 1, e.what());
        return out;
    }
    int n = 0;
    for (const auto& item : doc) {
        ++n;
        try {
            enrich::EventOfInterest ev;
            ev.event_id = item.at("event_id").get<std::string>();
            ev.footprint = geo::parse_wkt_polygon(item.at("footprint").get<std::string>());
            ev.event_item_name = item.at("event_item_name").get<std::string>();
            ev.goal_name = item.value("goal_name", "");
            ev.activity_names = item.value("activity_names", std::vector<std::string>{});
            if (item.contains("environment")) {
                ev.env_type = item["environment"].value("env_type", "");
                ev.env_characteristics = item["environment"].value("env_characteristics", "");
            }
            ev.t_start = timeutil::parse_iso8601_utc(item.at("t_start").get<std::string>());
            ev.t_end = timeutil::parse_iso8601_utc(item.at("t_end").get<std::string>());
            if (ev.t_start > ev.t_end) throw std::runtime_error("event interval is reversed");
            out.push_back(std::move(ev));
        } catch (const std::exception& e) {
            sink.add(path, n, std::string("event ") + std::to_string(n) + ": " + e.what());
        }
    }
    return out;
}

std::vector<enrich::SocialPost> parse_posts_json(const std::string& path, ErrorSink& sink) {
    std::vector<enrich::SocialPost> out;
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(read_file(path));
    } catch (const nlohmann::json::exception& e) {
        sink.add(path, 1, e.what());
        return out;
    }
    int n = 0;
    for (const auto& item : doc) {
        ++n;
        try {
            enrich::SocialPost post;
            post.post_id = item.at("post_id").get<std::string>();
            post.object_id = item.at("object_id").get<std::string>();
            post.t = timeutil::parse_iso8601_utc(item.at("t").get<std::string>());
            post.medium_type = item.value("medium_type", "generic");
            post.account_platform = item.value("account_platform", "");
            post.content_kind = item.at("content_kind").get<std::string>();
            post.content_text = item.value("content_text", "");
            post.expressive_thought = item.at("expressive_thought").get<std::string>();
            post.qualitative_mood = item.at("qualitative_mood").get<std::string>();
            if (post.content_kind != "textual" && post.content_kind != "image")
                throw std::runtime_error("content_kind must be textual or image");
            if (post.expressive_thought != "positive" && post.expressive_thought != "negative" &&
                post.expressive_thought != "indifferent")
                throw std::runtime_error(
                    "expressive_thought must be positive, negative, or indifferent");
            if (item.contains("lat") && item.contains("lon"))
                post.location = geo::GeoPoint(item["lat"].get<double>(), item["lon"].get<double>());
            out.push_back(std::move(post));
        } catch (const std::exception& e) {
            sink.add(path, n, std::string("post ") + std::to_string(n) + ": " + e.what());
        }
    }
    return out;
}

}  // namespace

Staged extract(const EtlConfig& config) {
    Staged staged;
    ErrorSink sink;
    staged.trajectories = parse_points_csv(config.points_path, sink);
    staged.pois = parse_pois_geojson(config.pois_path, sink);
    staged.events = parse_events_json(config.events_path, sink);
    staged.posts = parse_posts_json(config.posts_path, sink);
    try {
        staged.goal_rules = enrich::parse_goal_rules(read_file(config.goal_rules_path));
    } catch (const FileNotFound&) {
        throw;
    } catch (const std::exception& e) {
        sink.add(config.goal_rules_path, 1, e.what());
    }
    sink.throw_if_any();
    return staged;
}

namespace {

struct DomainProfile {
    std::string object_type;
    std::string model_name;
    std::string model_feature;
    std::string behaviour_name = "Individual Movement";
    std::string mode_name;              // Air / Water / Land
    std::string transportation_object;
    enrich::TransportRules transport;
};

DomainProfile profile_for(const EtlConfig& cfg) {
    DomainProfile p;
    if (cfg.domain_profile == "tourism") {
        p.object_type = "Human Being";
        p.model_name = "Tourist";
        p.model_feature = "Sightseeing";
        p.mode_name = "Land";
        p.transportation_object = "Bike";
    } else if (cfg.domain_profile == "birds") {
        p.object_type = "Animal";
        p.model_name = "Bird";
        p.model_feature = "Migration";
        p.mode_name = "Air";
        p.transportation_object = "Soaring Flight";
        p.transport.forced_type = "Flight";
    } else if (cfg.domain_profile == "traffic") {
        p.object_type = "Vehicle";
        p.model_name = "Car";
        p.model_feature = "Highway Transit";
        p.mode_name = "Land";
        p.transportation_object = "Car";
        p.transport.forced_type = "Driving";
    } else {
        p.object_type = "UNKNOWN";
        p.model_name = "UNKNOWN";
        p.model_feature = "UNKNOWN";
        p.mode_name = "UNKNOWN";
        p.transportation_object = "UNKNOWN";
    }
    if (!cfg.object_type.empty()) p.object_type = cfg.object_type;
    if (!cfg.model_name.empty()) p.model_name = cfg.model_name;
    if (!cfg.model_feature.empty()) p.model_feature = cfg.model_feature;
    if (!cfg.mode_name.empty()) p.mode_name = cfg.mode_name;
    if (!cfg.transportation_object.empty()) p.transportation_object = cfg.transportation_object;
    if (!cfg.forced_transport_type.empty()) p.transport.forced_type = cfg.forced_transport_type;
    return p;
}

std::string velocity_class(double mps) {
    if (mps < 0.1) return "stationary";
    if (mps < 1.8) return "slow";
    if (mps < 8.0) return "moderate";
    return "fast";
}

std::string attr_or_unknown(const std::map<std::string, std::string>& attrs,
                            const std::string& key) {
    auto it = attrs.find(key);
    return it != attrs.end() ? it->second : "UNKNOWN";
}

double interval_overlap_s(std::int64_t a0, std::int64_t a1, std::int64_t b0, std::int64_t b1) {
    const std::int64_t lo = std::max(a0, b0);
    const std::int64_t hi = std::min(a1, b1);
    return hi > lo ? static_cast<double>(hi - lo) : 0.0;
}

const enrich::EventOfInterest* event_by_id(const std::vector<enrich::EventOfInterest>& events,
                                           const std::string& id) {
    for (const auto& ev : events)
        if (ev.event_id == id) return &ev;
    return nullptr;
}

const enrich::PointOfInterest* poi_by_id(const std::vector<enrich::PointOfInterest>& pois,
                                         const std::string& id) {
    for (const auto& poi : pois)
        if (poi.poi_id == id) return &poi;
    return nullptr;
}

}  // namespace

Transformed transform(const Staged& staged, const EtlConfig& config) {
    Transformed out;
    const DomainProfile profile = profile_for(config);

    for (const auto& raw : staged.trajectories) {
        if (raw.points.size() < 2) {
            out.warnings.push_back("trajectory '" + raw.traj_id +
                                   "' has a single point; no episodes built");
            continue;
        }
        auto st = enrich::build_semantic_trajectory(raw, staged.pois, staged.events, config.params,
                                                    staged.goal_rules, profile.transport);
        const auto attach = enrich::attach_social_posts(st, staged.posts);
        out.orphan_posts += static_cast<std::int64_t>(attach.orphans);
        out.foreign_posts += static_cast<std::int64_t>(attach.foreign_object);

        std::int64_t ordinal = 0;
        for (const auto& seg : st.segments) {
            FactDraft d;
            d.traj_id = st.traj_id;
            d.segment_ordinal = ordinal++;

            const bool is_stop = seg.episode.kind == traj::EpisodeKind::Stop;
            if (is_stop && !seg.matched_poi) d.unmatched_stop = true;

            if (seg.matched_poi) {
                const auto* poi = poi_by_id(staged.pois, *seg.matched_poi);
                const auto& a = poi->landmark_attrs;
                d.geo_attrs = {attr_or_unknown(a, "continent"),
                               attr_or_unknown(a, "country"),
                               attr_or_unknown(a, "state_province"),
                               attr_or_unknown(a, "region"),
                               attr_or_unknown(a, "city"),
                               attr_or_unknown(a, "district"),
                               attr_or_unknown(a, "geo_object_name"),
                               geo::to_wkt(poi->footprint),
                               poi->object_name,
                               attr_or_unknown(a, "activity_object_name"),
                               poi->semantic_purpose};
            }

            const auto civil = timeutil::civil_time(seg.begin.t);
            d.temporal_attrs = {std::to_string(civil.year),
                                "Q" + std::to_string(civil.quarter),
                                timeutil::season_name(civil.month, config.hemisphere),
                                pad2(civil.month),
                                pad2(civil.iso_week),
                                timeutil::day_type(civil.weekday),
                                pad2(civil.day),
                                pad2(civil.hour),
                                pad2(civil.minute),
                                pad2(civil.second)};

            const enrich::EventOfInterest* ev = nullptr;
            if (seg.annotation.event_ref)
                ev = event_by_id(staged.events, *seg.annotation.event_ref);
            std::string activity = "UNKNOWN";
            if (ev) {
                activity = ev->activity_names.empty() ? "UNKNOWN" : ev->activity_names.front();
                d.event_attrs = {ev->event_item_name, ev->goal_name, activity, ev->env_type,
                                 ev->env_characteristics};
            }

            d.traj_attrs = {profile.object_type,
                            profile.model_name,
                            profile.model_feature,
                            seg.goal,
                            activity,
                            profile.behaviour_name,
                            velocity_class(seg.stats.avg_speed_mps),
                            is_stop ? "none" : profile.mode_name,
                            seg.transport_mode,
                            is_stop ? "none" : profile.transportation_object,
                            geo::to_wkt(seg.begin.point),
                            geo::to_wkt(seg.end.point)};

            if (!seg.posts.empty()) {
                const auto first = std::min_element(
                    seg.posts.begin(), seg.posts.end(), [](const auto& a, const auto& b) {
                        return a.t != b.t ? a.t < b.t : a.post_id < b.post_id;
                    });
                d.social_attrs = {first->medium_type, first->account_platform,
                                  first->content_kind, first->expressive_thought,
                                  first->qualitative_mood};
            }

            wh::FactRow& f = d.measures;
            f.traj_id = d.traj_id;
            f.segment_ordinal = d.segment_ordinal;
            f.duration_s = seg.stats.duration_s;
            f.travel_distance_m = seg.stats.travel_distance_m;
            f.average_trajectory_speed = seg.stats.avg_speed_mps;
            f.num_points = static_cast<std::int64_t>(seg.stats.num_points);
            f.num_semantic_stops = is_stop ? 1 : 0;
            f.num_mobility_modes = (!is_stop && seg.transport_mode != "none") ? 1 : 0;
            f.square_area_m2 = geo::bbox_area(seg.episode.bbox);
            f.event_time_duration_s =
                ev ? interval_overlap_s(seg.episode.t_begin, seg.episode.t_end, ev->t_start,
                                        ev->t_end)
                   : 0.0;
            f.activity_duration_s = f.event_time_duration_s;

            out.drafts.push_back(std::move(d));
        }
        out.trajectories.push_back(std::move(st));
    }
    return out;
}

LoadReport load(wh::Warehouse& warehouse, const Transformed& transformed) {
    LoadReport rep;
    rep.trajectories_in = static_cast<std::int64_t>(transformed.trajectories.size());
    rep.episodes_built = static_cast<std::int64_t>(transformed.drafts.size());
    rep.orphan_posts = transformed.orphan_posts;
    rep.warnings = transformed.warnings;
    if (transformed.foreign_posts > 0)
        rep.warnings.push_back(std::to_string(transformed.foreign_posts) +
                               " posts ignored: object id not in this load");

    auto resolve = [&](const char* dim, const std::vector<std::string>& attrs) -> std::int64_t {
        if (attrs.empty()) return 0;
        return warehouse.resolve_dimension_member(dim, attrs);
    };

    for (const auto& d : transformed.drafts) {
        if (d.unmatched_stop) ++rep.unmatched_stops;
        if (warehouse.has_natural_key(d.traj_id, d.segment_ordinal)) {
            ++rep.facts_skipped_duplicate;
            continue;
        }
        wh::FactRow row = d.measures;
        row.geo_space_id = resolve("geographical", d.geo_attrs);
        row.temp_inst_id = resolve("temporal", d.temporal_attrs);
        row.events_rep_id = resolve("events", d.event_attrs);
        row.traj_rep_id = resolve("trajectory", d.traj_attrs);
        row.social_inter_id = resolve("social", d.social_attrs);
        warehouse.insert_fact(std::move(row));
        ++rep.facts_inserted;
    }
    for (const auto& schema : wh::Warehouse::dimension_schemas())
        rep.dimension_cardinalities[schema.name] =
            static_cast<std::int64_t>(warehouse.dimension(schema.name).members.size());
    return rep;
}

std::string LoadReport::to_json() const {
    nlohmann::ordered_json doc;
    doc["trajectories_in"] = trajectories_in;
    doc["episodes_built"] = episodes_built;
    doc["facts_inserted"] = facts_inserted;
    doc["facts_skipped_duplicate"] = facts_skipped_duplicate;
    doc["dimension_cardinalities"] = dimension_cardinalities;
    doc["orphan_posts"] = orphan_posts;
    doc["unmatched_stops"] = unmatched_stops;
    doc["warnings"] = warnings;
    return doc.dump(2) + "\n";
}

LoadReport run_pipeline(const EtlConfig& config, const std::string& out_dir) {
    const Staged staged = extract(config);
    const Transformed transformed = transform(staged, config);

    wh::Warehouse warehouse;
    if (fs::exists(fs::path(out_dir) / wh::kFactTableFile)) warehouse = wh::Warehouse::load(out_dir);
    const LoadReport report = load(warehouse, transformed);

    fs::create_directories(out_dir);
    const fs::path tmp = fs::path(out_dir) / (".tmp-" + std::to_string(::getpid()));
    fs::create_directories(tmp);
    warehouse.save(tmp.string());
    {
        std::ofstream os(tmp / "load_report.json", std::ios::binary);
        os << report.to_json();
    }
    // test hook for the crash-before-publish path
    if (std::getenv("TRAJDW_FAIL_BEFORE_RENAME")) {
        fs::remove_all(tmp);
        throw std::runtime_error("simulated failure before publishing warehouse files");
    }
    for (const auto& entry : fs::directory_iterator(tmp))
        fs::rename(entry.path(), fs::path(out_dir) / entry.path().filename());
    fs::remove_all(tmp);
    return report;
}

}  // namespace trajdw::etl
