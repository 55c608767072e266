#include "trajdw/olap.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "json.hpp"
#include "trajdw/csv.hpp"

namespace trajdw::olap {

std::string value_to_string(const Value& v) {
    if (std::holds_alternative<std::int64_t>(v)) return std::to_string(std::get<std::int64_t>(v));
    if (std::holds_alternative<double>(v)) return geo::format_double(std::get<double>(v));
    return std::get<std::string>(v);
}

namespace {

std::optional<double> numeric(const Value& v) {
    if (std::holds_alternative<std::int64_t>(v))
        return static_cast<double>(std::get<std::int64_t>(v));
    if (std::holds_alternative<double>(v)) return std::get<double>(v);
    return std::nullopt;
}

std::optional<double> parse_num(const std::string& s) {
    if (s.empty()) return std::nullopt;
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end != s.c_str() + s.size()) return std::nullopt;
    return v;
}

}  // namespace

bool value_less(const Value& a, const Value& b) {
    const auto na = numeric(a);
    const auto nb = numeric(b);
    if (na && nb) return *na < *nb;
    return value_to_string(a) < value_to_string(b);
}

namespace {

bool row_less(const std::vector<Value>& a, const std::vector<Value>& b,
              const std::vector<std::size_t>& order) {
    for (std::size_t idx : order) {
        if (value_less(a[idx], b[idx])) return true;
        if (value_less(b[idx], a[idx])) return false;
    }
    return false;
}

}  // namespace

FlatView FlatView::build(const wh::Warehouse& w) {
    FlatView v;
    v.columns = {"factId",     "TrajId",      "SegmentOrdinal", "geoSpaceId",
                 "tempInstId", "eventsRepId", "trajRepId",      "socialInterId"};
    v.columns.insert(v.columns.end(), wh::kMeasureColumns.begin(), wh::kMeasureColumns.end());
    for (const auto& schema : wh::Warehouse::dimension_schemas())
        v.columns.insert(v.columns.end(), schema.attr_columns.begin(), schema.attr_columns.end());
    for (std::size_t i = 0; i < v.columns.size(); ++i) v.column_index[v.columns[i]] = i;

    for (const auto& f : w.facts()) {
        std::vector<Value> row;
        row.reserve(v.columns.size());
        row.emplace_back(f.fact_id);
        row.emplace_back(f.traj_id);
        row.emplace_back(f.segment_ordinal);
        row.emplace_back(f.geo_space_id);
        row.emplace_back(f.temp_inst_id);
        row.emplace_back(f.events_rep_id);
        row.emplace_back(f.traj_rep_id);
        row.emplace_back(f.social_inter_id);
        row.emplace_back(f.duration_s);
        row.emplace_back(f.travel_distance_m);
        row.emplace_back(f.average_trajectory_speed);
        row.emplace_back(f.num_points);
        row.emplace_back(f.num_semantic_stops);
        row.emplace_back(f.num_mobility_modes);
        row.emplace_back(f.square_area_m2);
        row.emplace_back(f.event_time_duration_s);
        row.emplace_back(f.activity_duration_s);
        const std::pair<const char*, std::int64_t> keys[] = {
            {"geographical", f.geo_space_id}, {"temporal", f.temp_inst_id},
            {"events", f.events_rep_id},      {"trajectory", f.traj_rep_id},
            {"social", f.social_inter_id}};
        for (const auto& [dim, key] : keys) {
            for (const auto& attr : w.member(dim, key)) row.emplace_back(attr);
        }
        v.rows.push_back(std::move(row));
    }
    return v;
}

bool is_geometry_attribute(const std::string& attr) {
    return attr == "GeoObjectType" || attr == "TrajSegmentSemanticStartPoint" ||
           attr == "TrajSegmentSemanticEndPoint";
}

bool spatial_cell_within(const std::string& wkt_cell, const geo::Polygon& poly) {
    try {
        if (wkt_cell.rfind("POINT", 0) == 0)
            return geo::point_in_polygon(geo::parse_wkt_point(wkt_cell), poly);
        if (wkt_cell.rfind("POLYGON", 0) == 0) {
            const geo::Polygon inner = geo::parse_wkt_polygon(wkt_cell);
            const geo::BoundingBox outer_box = poly.bbox();
            for (const auto& v : inner.exterior) {
                if (!outer_box.contains(v)) return false;  // prefilter
                if (!geo::point_in_polygon(v, poly)) return false;
            }
            return true;
        }
    } catch (const geo::MalformedWkt&) {
        return false;
    }
    return false;
}

namespace {

std::size_t column_of(const FlatView& v, const std::string& name) {
    auto it = v.column_index.find(name);
    if (it == v.column_index.end()) throw UnknownAttribute("unknown attribute '" + name + "'");
    return it->second;
}

bool is_measure(const std::string& name) {
    return std::find(wh::kMeasureColumns.begin(), wh::kMeasureColumns.end(), name) !=
           wh::kMeasureColumns.end();
}

bool predicate_passes(const Predicate& p, const Value& cell) {
    switch (p.kind) {
        case PredicateKind::Eq:
        case PredicateKind::Neq: {
            bool eq;
            if (const auto n = numeric(cell)) {
                const auto rhs = parse_num(p.value);
                eq = rhs && *n == *rhs;
            } else {
                eq = std::get<std::string>(cell) == p.value;
            }
            return p.kind == PredicateKind::Eq ? eq : !eq;
        }
        case PredicateKind::Between: {
            const auto lo = parse_num(p.low);
            const auto hi = parse_num(p.high);
            if (!lo || !hi)
                throw TypeMismatch("BETWEEN bounds must be numeric for '" + p.attr + "'");
            std::optional<double> n = numeric(cell);
            if (!n) n = parse_num(std::get<std::string>(cell));
            return n && *n >= *lo && *n <= *hi;
        }
        case PredicateKind::MeasureLess: {
            const auto n = numeric(cell);
            if (!n) throw TypeMismatch("'" + p.attr + "' is not numeric");
            return *n < p.threshold;
        }
        case PredicateKind::SpatialWithin: {
            if (!std::holds_alternative<std::string>(cell))
                throw TypeMismatch("'" + p.attr + "' is not geometry-valued");
            return spatial_cell_within(std::get<std::string>(cell), p.polygon);
        }
    }
    return false;
}

std::string agg_column_name(const Aggregate& a) {
    switch (a.fn) {
        case AggFn::Count: return "COUNT(" + a.target + ")";
        case AggFn::Sum: return "SUM(" + a.target + ")";
        case AggFn::Avg: return "AVG(" + a.target + ")";
        case AggFn::Min: return "MIN(" + a.target + ")";
        case AggFn::Max: return "MAX(" + a.target + ")";
        case AggFn::CountDistinct: return "COUNT_DISTINCT(" + a.target + ")";
    }
    return "?";
}

struct ValueVectorLess {
    bool operator()(const std::vector<Value>& a, const std::vector<Value>& b) const {
        for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i) {
            if (value_less(a[i], b[i])) return true;
            if (value_less(b[i], a[i])) return false;
        }
        return a.size() < b.size();
    }
};

Value aggregate_values(AggFn fn, const std::vector<Value>& cells) {
    switch (fn) {
        case AggFn::Count:
            return static_cast<std::int64_t>(cells.size());
        case AggFn::CountDistinct: {
            std::set<std::string> uniq;
            for (const auto& c : cells) uniq.insert(value_to_string(c));
            return static_cast<std::int64_t>(uniq.size());
        }
        case AggFn::Sum: {
            bool all_int = true;
            std::int64_t si = 0;
            double sd = 0.0;
            for (const auto& c : cells) {
                const auto n = numeric(c);
                if (!n) throw TypeMismatch("SUM over non-numeric values");
                sd += *n;
                if (std::holds_alternative<std::int64_t>(c))
                    si += std::get<std::int64_t>(c);
                else
                    all_int = false;
            }
            if (all_int) return si;
            return sd;
        }
        case AggFn::Avg: {
            if (cells.empty()) return 0.0;
            double sd = 0.0;
            for (const auto& c : cells) {
                const auto n = numeric(c);
                if (!n) throw TypeMismatch("AVG over non-numeric values");
                sd += *n;
            }
            return sd / static_cast<double>(cells.size());
        }
        case AggFn::Min:
        case AggFn::Max: {
            if (cells.empty()) throw TypeMismatch("MIN/MAX over empty group");
            const Value* best = &cells.front();
            for (const auto& c : cells) {
                const bool less = value_less(c, *best);
                if ((fn == AggFn::Min && less) || (fn == AggFn::Max && value_less(*best, c)))
                    best = &c;
            }
            return *best;
        }
    }
    return std::int64_t{0};
}

void sort_result(ResultTable& table, const std::vector<std::string>& order_by) {
    std::vector<std::size_t> order;
    for (const auto& name : order_by) {
        bool found = false;
        for (std::size_t i = 0; i < table.columns.size(); ++i) {
            if (table.columns[i].name == name) {
                order.push_back(i);
                found = true;
                break;
            }
        }
        if (!found) throw UnknownAttribute("order_by column '" + name + "' not in result");
    }
    for (std::size_t i = 0; i < table.columns.size(); ++i) order.push_back(i);
    std::stable_sort(table.rows.begin(), table.rows.end(),
                     [&](const auto& a, const auto& b) { return row_less(a, b, order); });
}

}  // namespace

ResultTable execute(const wh::Warehouse& w, const QuerySpec& q) {
    const FlatView view = FlatView::build(w);

    std::vector<std::size_t> live;
    for (std::size_t r = 0; r < view.rows.size(); ++r) live.push_back(r);
    for (const auto& p : q.filters) {
        const std::size_t col = column_of(view, p.attr);
        if (p.kind == PredicateKind::SpatialWithin && !is_geometry_attribute(p.attr))
            throw TypeMismatch("'" + p.attr + "' is not a geometry attribute");
        if (p.kind == PredicateKind::MeasureLess && !is_measure(p.attr))
            throw TypeMismatch("'" + p.attr + "' is not a measure");
        std::vector<std::size_t> next;
        for (std::size_t r : live)
            if (predicate_passes(p, view.rows[r][col])) next.push_back(r);
        live = std::move(next);
    }

    std::vector<std::size_t> key_cols;
    for (const auto& name : q.group_by) key_cols.push_back(column_of(view, name));
    std::vector<std::pair<AggFn, std::optional<std::size_t>>> agg_cols;
    for (const auto& a : q.aggregates) {
        if (a.target == "*") {
            if (a.fn != AggFn::Count) throw TypeMismatch("'*' target is only valid for COUNT");
            agg_cols.emplace_back(a.fn, std::nullopt);
        } else {
            agg_cols.emplace_back(a.fn, column_of(view, a.target));
        }
    }

    ResultTable table;
    for (const auto& name : q.group_by) table.columns.push_back({name, true, AggFn::Count, ""});
    for (const auto& a : q.aggregates)
        table.columns.push_back({agg_column_name(a), false, a.fn, a.target});

    if (q.aggregates.empty()) {
        // distinct projection over the group_by columns
        std::set<std::vector<Value>, ValueVectorLess> seen;
        for (std::size_t r : live) {
            std::vector<Value> row;
            for (std::size_t c : key_cols) row.push_back(view.rows[r][c]);
            if (seen.insert(row).second) table.rows.push_back(std::move(row));
        }
    } else {
        std::map<std::vector<Value>, std::vector<std::size_t>, ValueVectorLess> groups;
        for (std::size_t r : live) {
            std::vector<Value> key;
            for (std::size_t c : key_cols) key.push_back(view.rows[r][c]);
            groups[std::move(key)].push_back(r);
        }
        for (const auto& [key, members] : groups) {
            std::vector<Value> row = key;
            for (const auto& [fn, col] : agg_cols) {
                std::vector<Value> cells;
                cells.reserve(members.size());
                for (std::size_t r : members)
                    cells.push_back(col ? view.rows[r][*col] : Value{std::int64_t{1}});
                row.push_back(aggregate_values(fn, cells));
            }
            table.rows.push_back(std::move(row));
        }
        if (q.argmax_count) {
            std::size_t count_col = table.columns.size();
            for (std::size_t i = 0; i < table.columns.size(); ++i) {
                if (!table.columns[i].is_group_key && table.columns[i].fn == AggFn::Count) {
                    count_col = i;
                    break;
                }
            }
            if (count_col == table.columns.size())
                throw UnknownQuery("argmax_count requires a COUNT aggregate");
            std::int64_t max_count = 0;
            for (const auto& row : table.rows)
                max_count = std::max(max_count, std::get<std::int64_t>(row[count_col]));
            std::erase_if(table.rows, [&](const auto& row) {
                return std::get<std::int64_t>(row[count_col]) != max_count;
            });
        }
    }
    sort_result(table, q.order_by);
    return table;
}

ResultTable rollup(const ResultTable& result, const std::string& dim,
                   const std::string& from_level, const std::string& to_level) {
    const auto& schema = wh::Warehouse::dimension_schema(dim);
    std::size_t from_idx = schema.levels.size(), to_idx = schema.levels.size();
    for (std::size_t i = 0; i < schema.levels.size(); ++i) {
        if (schema.levels[i].name == from_level) from_idx = i;
        if (schema.levels[i].name == to_level) to_idx = i;
    }
    if (from_idx == schema.levels.size())
        throw NotAncestorLevel("unknown level '" + from_level + "' in dimension '" + dim + "'");
    if (to_idx == schema.levels.size())
        throw NotAncestorLevel("unknown level '" + to_level + "' in dimension '" + dim + "'");
    if (to_idx >= from_idx)
        throw NotAncestorLevel("'" + to_level + "' is not an ancestor of '" + from_level + "'");

    // attributes at levels deeper than to_level are dropped from the group key
    std::set<std::string> dropped;
    for (std::size_t i = to_idx + 1; i < schema.levels.size(); ++i)
        for (const auto& attr : schema.levels[i].attributes) dropped.insert(attr);

    ResultTable out;
    std::vector<std::size_t> kept_key_cols;
    std::vector<std::size_t> agg_src_cols;
    for (std::size_t i = 0; i < result.columns.size(); ++i) {
        const auto& col = result.columns[i];
        if (col.is_group_key) {
            if (!dropped.count(col.name)) {
                out.columns.push_back(col);
                kept_key_cols.push_back(i);
            }
        }
    }
    for (std::size_t i = 0; i < result.columns.size(); ++i) {
        const auto& col = result.columns[i];
        if (col.is_group_key) continue;
        if (col.fn == AggFn::Avg || col.fn == AggFn::CountDistinct)
            throw NonRollableAggregate(col.name + " cannot be re-aggregated; carry SUM and COUNT");
        out.columns.push_back(col);
        agg_src_cols.push_back(i);
    }

    std::map<std::vector<Value>, std::vector<std::size_t>, ValueVectorLess> groups;
    for (std::size_t r = 0; r < result.rows.size(); ++r) {
        std::vector<Value> key;
        for (std::size_t c : kept_key_cols) key.push_back(result.rows[r][c]);
        groups[std::move(key)].push_back(r);
    }
    for (const auto& [key, members] : groups) {
        std::vector<Value> row = key;
        for (std::size_t j = 0; j < agg_src_cols.size(); ++j) {
            const auto& col = result.columns[agg_src_cols[j]];
            std::vector<Value> cells;
            for (std::size_t r : members) cells.push_back(result.rows[r][agg_src_cols[j]]);
            // COUNT of counts re-aggregates by summing
            const AggFn fn = col.fn == AggFn::Count ? AggFn::Sum : col.fn;
            row.push_back(aggregate_values(fn, cells));
        }
        out.rows.push_back(std::move(row));
    }
    sort_result(out, {});
    return out;
}

QuerySpec canned_query_spec(const std::string& id, const CannedParams& p) {
    QuerySpec q;
    auto require_region = [&]() {
        if (!p.region) throw UnknownQuery(id + " requires a region polygon");
        Predicate sp;
        sp.kind = PredicateKind::SpatialWithin;
        sp.attr = "GeoObjectType";
        sp.polygon = *p.region;
        q.filters.push_back(std::move(sp));
        Predicate season;
        season.kind = PredicateKind::Eq;
        season.attr = "CalendarSeason";
        season.value = p.season;
        q.filters.push_back(std::move(season));
    };
    if (id == "Q1") {
        require_region();
        Predicate has_event;
        has_event.kind = PredicateKind::Neq;
        has_event.attr = "eventsRepId";
        has_event.value = "0";
        q.filters.push_back(std::move(has_event));
        q.group_by = {"EventItemName", "EventGoalName"};
        q.aggregates = {{AggFn::Count, "*"}};
        q.argmax_count = true;
    } else if (id == "Q2") {
        require_region();
        q.group_by = {"TrajectoryModelName", "TrajectoryModelBehaviourName",
                      "TrajModelBehaviourMovementVelocity", "TrajectoryTransportationModeName",
                      "TrajectoryTransportationTypeName"};
    } else if (id == "Q3") {
        if (!p.start_footprint || !p.end_footprint)
            throw UnknownQuery("Q3 requires start and end footprint polygons");
        Predicate start;
        start.kind = PredicateKind::SpatialWithin;
        start.attr = "TrajSegmentSemanticStartPoint";
        start.polygon = *p.start_footprint;
        q.filters.push_back(std::move(start));
        Predicate end;
        end.kind = PredicateKind::SpatialWithin;
        end.attr = "TrajSegmentSemanticEndPoint";
        end.polygon = *p.end_footprint;
        q.filters.push_back(std::move(end));
        q.group_by = {"AverageTrajectorySpeed",          "TrajectoryModelName",
                      "TrajectoryModelFeature",          "TrajModelBehaviourMovementVelocity",
                      "EventEnvironmentType",            "EventEnvironmentCharac"};
    } else if (id == "Q4") {
        Predicate speed;
        speed.kind = PredicateKind::MeasureLess;
        speed.attr = "AverageTrajectorySpeed";
        speed.threshold = p.speed_threshold_kmh / 3.6;  // stored in m/s
        q.filters.push_back(std::move(speed));
        Predicate years;
        years.kind = PredicateKind::Between;
        years.attr = "CalendarYear";
        years.low = p.year_from;
        years.high = p.year_to;
        q.filters.push_back(std::move(years));
        q.group_by = {"TrajSegmentSemanticStartPoint", "TrajSegmentSemanticEndPoint",
                      "AverageTrajectorySpeed",        "TrajectoryModelName",
                      "EventItemName",                 "EventActivityName"};
    } else {
        throw UnknownQuery("unknown canned query '" + id + "'");
    }
    return q;
}

ResultTable canned_query(const wh::Warehouse& w, const std::string& id, const CannedParams& p) {
    return execute(w, canned_query_spec(id, p));
}

std::string ResultTable::to_csv() const {
    std::ostringstream os;
    std::vector<std::string> header;
    for (const auto& col : columns) header.push_back(col.name);
    csv::write_row(os, header);
    for (const auto& row : rows) {
        std::vector<std::string> out;
        for (const auto& cell : row) out.push_back(value_to_string(cell));
        csv::write_row(os, out);
    }
    return os.str();
}

QuerySpec parse_query_spec_json(const std::string& text) {
    const auto doc = nlohmann::json::parse(text);
    QuerySpec q;
    for (const auto& f : doc.value("filters", nlohmann::json::array())) {
        Predicate p;
        const std::string type = f.at("type").get<std::string>();
        p.attr = f.at("attr").get<std::string>();
        if (type == "eq" || type == "neq") {
            p.kind = type == "eq" ? PredicateKind::Eq : PredicateKind::Neq;
            p.value = f.at("value").get<std::string>();
        } else if (type == "between") {
            p.kind = PredicateKind::Between;
            p.low = f.at("low").get<std::string>();
            p.high = f.at("high").get<std::string>();
        } else if (type == "measure_lt") {
            p.kind = PredicateKind::MeasureLess;
            p.threshold = f.at("threshold").get<double>();
        } else if (type == "spatial_within") {
            p.kind = PredicateKind::SpatialWithin;
            p.polygon = geo::parse_wkt_polygon(f.at("polygon_wkt").get<std::string>());
        } else {
            throw UnknownQuery("unknown filter type '" + type + "'");
        }
        q.filters.push_back(std::move(p));
    }
    q.group_by = doc.value("group_by", std::vector<std::string>{});
    for (const auto& a : doc.value("aggregates", nlohmann::json::array())) {
        Aggregate agg;
        const std::string fn = a.at("fn").get<std::string>();
        if (fn == "COUNT") agg.fn = AggFn::Count;
        else if (fn == "SUM") agg.fn = AggFn::Sum;
        else if (fn == "AVG") agg.fn = AggFn::Avg;
        else if (fn == "MIN") agg.fn = AggFn::Min;
        else if (fn == "MAX") agg.fn = AggFn::Max;
        else if (fn == "COUNT_DISTINCT") agg.fn = AggFn::CountDistinct;
        else throw UnknownQuery("unknown aggregate fn '" + fn + "'");
        agg.target = a.at("target").get<std::string>();
        q.aggregates.push_back(std::move(agg));
    }
    q.argmax_count = doc.value("argmax_count", false);
    q.order_by = doc.value("order_by", std::vector<std::string>{});
    return q;
}

}  // namespace trajdw::olap
