#include "trajdw/warehouse.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "trajdw/csv.hpp"
#include "trajdw/geo.hpp"

namespace trajdw::wh {

namespace {

std::vector<DimensionSchema> build_schemas() {
    std::vector<DimensionSchema> out;

    DimensionSchema geo;
    geo.name = "geographical";
    geo.table_file = "dim_geographical_space_tbl.csv";
    geo.key_column = "geoSpaceId";
    geo.levels = {
        {"continent", {"Continent"}},
        {"country", {"Country"}},
        {"state_province", {"StateProvince"}},
        {"region", {"Region"}},
        {"city", {"City"}},
        {"district", {"District"}},
        {"geo_object", {"GeoObjectName", "GeoObjectType"}},
        {"landmark_object", {"LandmarkObjectName"}},
        {"activity_object", {"ActivityObjectName"}},
        {"semantic_purpose", {"SemanticPurpose"}},
    };
    out.push_back(std::move(geo));

    DimensionSchema temporal;
    temporal.name = "temporal";
    temporal.table_file = "dim_temporal_instance_tbl.csv";
    temporal.key_column = "tempInstId";
    temporal.levels = {
        {"calendar_year", {"CalendarYear"}}, {"quarter", {"Quarter"}},
        {"calendar_season", {"CalendarSeason"}}, {"month", {"Month"}},
        {"week", {"Week"}},                  {"day_type", {"DayType"}},
        {"day", {"Day"}},                    {"hour", {"Hour"}},
        {"minute", {"Minute"}},              {"second", {"Second"}},
    };
    out.push_back(std::move(temporal));

    DimensionSchema events;
    events.name = "events";
    events.table_file = "dim_events_representation_tbl.csv";
    events.key_column = "eventsRepId";
    events.levels = {
        {"event_item", {"EventItemName"}},
        {"event_goal", {"EventGoalName"}},
        {"event_activity", {"EventActivityName"}},
        {"event_environment", {"EventEnvironmentType", "EventEnvironmentCharac"}},
    };
    out.push_back(std::move(events));

    DimensionSchema traj;
    traj.name = "trajectory";
    traj.table_file = "dim_trajectory_representation.csv";
    traj.key_column = "trajRepId";
    traj.levels = {
        {"trajectory_object_type", {"TrajectoryObjectType"}},
        {"trajectory_model", {"TrajectoryModelName", "TrajectoryModelFeature"}},
        {"model_goal", {"TrajectoryModelGoal"}},
        {"model_activity", {"TrajectoryModelActivity"}},
        {"model_behaviour", {"TrajectoryModelBehaviourName", "TrajModelBehaviourMovementVelocity"}},
        {"transportation_mode", {"TrajectoryTransportationModeName"}},
        {"transportation_type", {"TrajectoryTransportationTypeName"}},
        {"transportation_object",
         {"TrajectoryTransportationObjectName", "TrajSegmentSemanticStartPoint",
          "TrajSegmentSemanticEndPoint"}},
    };
    out.push_back(std::move(traj));

    DimensionSchema social;
    social.name = "social";
    social.table_file = "dim_social_interaction.csv";
    social.key_column = "socialInterId";
    social.levels = {
        {"social_medium_type", {"SocialMediumType"}},
        {"social_medium_account", {"SocialMediumAccount"}},
        {"content_post", {"ContentPostKind"}},
        {"expressive_thought", {"ExpressiveThought"}},
        {"qualitative_mood", {"QualitativeMood"}},
    };
    out.push_back(std::move(social));

    for (auto& schema : out) {
        for (const auto& level : schema.levels)
            for (const auto& attr : level.attributes) schema.attr_columns.push_back(attr);
    }
    return out;
}

std::string i64(std::int64_t v) { return std::to_string(v); }

}  // namespace

const std::vector<DimensionSchema>& Warehouse::dimension_schemas() {
    static const std::vector<DimensionSchema> schemas = build_schemas();
    return schemas;
}

const DimensionSchema& Warehouse::dimension_schema(const std::string& dim) {
    for (const auto& schema : dimension_schemas())
        if (schema.name == dim) return schema;
    throw UnknownDimension("unknown dimension '" + dim + "'");
}

std::vector<std::string> Warehouse::hierarchy_levels(const std::string& dim) {
    const auto& schema = dimension_schema(dim);
    std::vector<std::string> out;
    for (const auto& level : schema.levels) out.push_back(level.name);
    return out;
}

Warehouse::Warehouse() {
    for (const auto& schema : dimension_schemas()) {
        Dimension d;
        d.schema = &schema;
        std::vector<std::string> unknown(schema.attr_columns.size(), "UNKNOWN");
        d.index[unknown] = 0;
        d.members.push_back(std::move(unknown));
        dims_.emplace(schema.name, std::move(d));
    }
}

std::int64_t Warehouse::resolve_dimension_member(const std::string& dim,
                                                 const std::vector<std::string>& attrs) {
    auto it = dims_.find(dim);
    if (it == dims_.end()) throw UnknownDimension("unknown dimension '" + dim + "'");
    Dimension& d = it->second;
    if (attrs.size() != d.schema->attr_columns.size())
        throw SchemaMismatch("dimension '" + dim + "' expects " +
                             std::to_string(d.schema->attr_columns.size()) + " attributes, got " +
                             std::to_string(attrs.size()));
    auto found = d.index.find(attrs);
    if (found != d.index.end()) return found->second;
    const std::int64_t key = static_cast<std::int64_t>(d.members.size());
    d.members.push_back(attrs);
    d.index[attrs] = key;
    return key;
}

const Dimension& Warehouse::dimension(const std::string& dim) const {
    auto it = dims_.find(dim);
    if (it == dims_.end()) throw UnknownDimension("unknown dimension '" + dim + "'");
    return it->second;
}

const std::vector<std::string>& Warehouse::member(const std::string& dim,
                                                  std::int64_t key) const {
    const Dimension& d = dimension(dim);
    if (key < 0 || key >= static_cast<std::int64_t>(d.members.size()))
        throw DanglingForeignKey("dimension '" + dim + "' has no member " + std::to_string(key));
    return d.members[static_cast<std::size_t>(key)];
}

std::int64_t Warehouse::insert_fact(FactRow row) {
    const std::pair<const char*, std::int64_t> keys[] = {
        {"geographical", row.geo_space_id}, {"temporal", row.temp_inst_id},
        {"events", row.events_rep_id},      {"trajectory", row.traj_rep_id},
        {"social", row.social_inter_id}};
    for (const auto& [dim, key] : keys) {
        const Dimension& d = dimension(dim);
        if (key < 0 || key >= static_cast<std::int64_t>(d.members.size()))
            throw DanglingForeignKey("fact references missing member " + std::to_string(key) +
                                     " in dimension '" + std::string(dim) + "'");
    }
    row.fact_id = static_cast<std::int64_t>(facts_.size()) + 1;
    natural_index_[{row.traj_id, row.segment_ordinal}] = row.fact_id;
    facts_.push_back(std::move(row));
    return facts_.back().fact_id;
}

bool Warehouse::has_natural_key(const std::string& traj_id, std::int64_t segment_ordinal) const {
    return natural_index_.count({traj_id, segment_ordinal}) > 0;
}

IntegrityReport Warehouse::integrity_check() const {
    IntegrityReport rep;
    for (const auto& [name, d] : dims_) {
        std::map<std::vector<std::string>, int> seen;
        for (const auto& member : d.members) {
            if (++seen[member] == 2)
                rep.duplicate_members.push_back("dimension '" + name +
                                                "' has a duplicate attribute tuple");
        }
    }
    for (const auto& f : facts_) {
        const std::pair<const char*, std::int64_t> keys[] = {
            {"geographical", f.geo_space_id}, {"temporal", f.temp_inst_id},
            {"events", f.events_rep_id},      {"trajectory", f.traj_rep_id},
            {"social", f.social_inter_id}};
        for (const auto& [dim, key] : keys) {
            const Dimension& d = dimension(dim);
            if (key < 0 || key >= static_cast<std::int64_t>(d.members.size()))
                rep.dangling_keys.push_back("fact " + i64(f.fact_id) + " -> " + dim + "." +
                                            i64(key));
        }
        const double expected = f.duration_s > 0.0 ? f.travel_distance_m / f.duration_s : 0.0;
        const double scale = std::max(std::fabs(expected), 1.0);
        if (std::fabs(f.average_trajectory_speed - expected) > 1e-9 * scale)
            rep.measure_violations.push_back("fact " + i64(f.fact_id) +
                                             ": speed != distance/duration");
    }
    return rep;
}

void Warehouse::save(const std::string& dir) const {
    for (const auto& schema : dimension_schemas()) {
        const Dimension& d = dimension(schema.name);
        std::ofstream os(dir + "/" + schema.table_file, std::ios::binary);
        std::vector<std::string> header = {schema.key_column};
        header.insert(header.end(), schema.attr_columns.begin(), schema.attr_columns.end());
        csv::write_row(os, header);
        for (std::size_t key = 0; key < d.members.size(); ++key) {
            std::vector<std::string> row = {i64(static_cast<std::int64_t>(key))};
            row.insert(row.end(), d.members[key].begin(), d.members[key].end());
            csv::write_row(os, row);
        }
    }
    std::ofstream os(dir + "/" + kFactTableFile, std::ios::binary);
    std::vector<std::string> header = {"factId",      "TrajId",     "SegmentOrdinal",
                                       "geoSpaceId",  "tempInstId", "eventsRepId",
                                       "trajRepId",   "socialInterId"};
    header.insert(header.end(), kMeasureColumns.begin(), kMeasureColumns.end());
    csv::write_row(os, header);
    for (const auto& f : facts_) {
        csv::write_row(os, {i64(f.fact_id), f.traj_id, i64(f.segment_ordinal),
                            i64(f.geo_space_id), i64(f.temp_inst_id), i64(f.events_rep_id),
                            i64(f.traj_rep_id), i64(f.social_inter_id),
                            geo::format_double(f.duration_s),
                            geo::format_double(f.travel_distance_m),
                            geo::format_double(f.average_trajectory_speed), i64(f.num_points),
                            i64(f.num_semantic_stops), i64(f.num_mobility_modes),
                            geo::format_double(f.square_area_m2),
                            geo::format_double(f.event_time_duration_s),
                            geo::format_double(f.activity_duration_s)});
    }
}

namespace {

std::string read_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open " + path);
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

}  // namespace

Warehouse Warehouse::load(const std::string& dir) {
    Warehouse w;
    for (const auto& schema : dimension_schemas()) {
        const auto rows = csv::parse(read_file(dir + "/" + schema.table_file));
        if (rows.empty()) throw std::runtime_error(schema.table_file + ": missing header");
        Dimension& d = w.dims_.at(schema.name);
        d.members.clear();
        d.index.clear();
        for (std::size_t r = 1; r < rows.size(); ++r) {
            if (rows[r].size() != schema.attr_columns.size() + 1)
                throw std::runtime_error(schema.table_file + ": wrong column count at row " +
                                         std::to_string(r));
            std::vector<std::string> attrs(rows[r].begin() + 1, rows[r].end());
            const std::int64_t key = std::stoll(rows[r][0]);
            if (key != static_cast<std::int64_t>(d.members.size()))
                throw std::runtime_error(schema.table_file + ": non-sequential key at row " +
                                         std::to_string(r));
            d.index[attrs] = key;
            d.members.push_back(std::move(attrs));
        }
    }
    const auto rows = csv::parse(read_file(dir + "/" + kFactTableFile));
    for (std::size_t r = 1; r < rows.size(); ++r) {
        const auto& c = rows[r];
        if (c.size() != 8 + kMeasureColumns.size())
            throw std::runtime_error(std::string(kFactTableFile) + ": wrong column count at row " +
                                     std::to_string(r));
        FactRow f;
        f.traj_id = c[1];
        f.segment_ordinal = std::stoll(c[2]);
        f.geo_space_id = std::stoll(c[3]);
        f.temp_inst_id = std::stoll(c[4]);
        f.events_rep_id = std::stoll(c[5]);
        f.traj_rep_id = std::stoll(c[6]);
        f.social_inter_id = std::stoll(c[7]);
        f.duration_s = std::stod(c[8]);
        f.travel_distance_m = std::stod(c[9]);
        f.average_trajectory_speed = std::stod(c[10]);
        f.num_points = std::stoll(c[11]);
        f.num_semantic_stops = std::stoll(c[12]);
        f.num_mobility_modes = std::stoll(c[13]);
        f.square_area_m2 = std::stod(c[14]);
        f.event_time_duration_s = std::stod(c[15]);
        f.activity_duration_s = std::stod(c[16]);
        w.insert_fact(std::move(f));
    }
    return w;
}

std::string Warehouse::schema_descriptor_json() {
    nlohmann::ordered_json doc;
    doc["fact_table"] = kFactTableFile;
    doc["dimensions"] = nlohmann::ordered_json::array();
    for (const auto& schema : dimension_schemas()) {
        nlohmann::ordered_json dim;
        dim["name"] = schema.name;
        dim["table"] = schema.table_file;
        dim["key"] = schema.key_column;
        dim["levels"] = nlohmann::ordered_json::array();
        for (const auto& level : schema.levels) {
            dim["levels"].push_back({{"name", level.name}, {"attributes", level.attributes}});
        }
        doc["dimensions"].push_back(std::move(dim));
    }
    doc["measures"] = kMeasureColumns;
    doc["derived_measures"] = {
        {{"name", "OverallTemporalDuration"}, {"definition", "SUM(DurationS) per trajectory"}},
        {{"name", "NumberOfSemanticStops"}, {"definition", "SUM(NumSemanticStops)"}},
        {{"name", "NumberOfMobilityModes"},
         {"definition", "COUNT_DISTINCT(TrajectoryTransportationTypeName) over Move rows"}},
        {{"name", "SquareArea"}, {"definition", "SUM(SquareAreaM2)"}},
        {{"name", "AverageEventTimeDuration"}, {"definition", "AVG(EventTimeDurationS)"}},
        {{"name", "MinActivityDurationPerEvent"},
         {"definition", "MIN(ActivityDurationS) grouped by EventItemName"}},
        {{"name", "MaxTrajectoryTravelDistance"}, {"definition", "MAX(TravelDistanceM)"}},
    };
    return doc.dump(2) + "\n";
}

}  // namespace trajdw::wh
