#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "trajdw/geo.hpp"
#include "trajdw/warehouse.hpp"

namespace trajdw::olap {

struct UnknownAttribute : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct TypeMismatch : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NotAncestorLevel : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NonRollableAggregate : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct UnknownQuery : std::runtime_error {
    using std::runtime_error::runtime_error;
};

using Value = std::variant<std::int64_t, double, std::string>;

std::string value_to_string(const Value& v);
bool value_less(const Value& a, const Value& b);

enum class PredicateKind { Eq, Neq, Between, MeasureLess, SpatialWithin };

struct Predicate {
    PredicateKind kind = PredicateKind::Eq;
    std::string attr;
    std::string value;       // Eq / Neq
    std::string low, high;   // Between (numeric compare)
    double threshold = 0.0;  // MeasureLess
    geo::Polygon polygon;    // SpatialWithin
};

enum class AggFn { Count, Sum, Avg, Min, Max, CountDistinct };

struct Aggregate {
    AggFn fn = AggFn::Count;
    std::string target = "*";  // "*" only valid for COUNT
};

struct QuerySpec {
    std::vector<Predicate> filters;
    std::vector<std::string> group_by;  // doubles as the projection for aggregate-free queries
    std::vector<Aggregate> aggregates;
    bool argmax_count = false;
    std::vector<std::string> order_by;
};

struct ResultColumn {
    std::string name;
    bool is_group_key = true;
    AggFn fn = AggFn::Count;
    std::string target;
};

struct ResultTable {
    std::vector<ResultColumn> columns;
    std::vector<std::vector<Value>> rows;

    std::string to_csv() const;
};

/// Fact table joined to all five dimensions, one row per fact.
struct FlatView {
    std::vector<std::string> columns;
    std::map<std::string, std::size_t> column_index;
    std::vector<std::vector<Value>> rows;

    static FlatView build(const wh::Warehouse& w);
};

ResultTable execute(const wh::Warehouse& w, const QuerySpec& q);

/// True iff the WKT cell (POINT or POLYGON) lies within poly; POLYGON passes when
/// all of its vertices do. Unparseable cells (e.g. "UNKNOWN") never pass.
bool spatial_cell_within(const std::string& wkt_cell, const geo::Polygon& poly);

bool is_geometry_attribute(const std::string& attr);

ResultTable rollup(const ResultTable& result, const std::string& dim,
                   const std::string& from_level, const std::string& to_level);

struct CannedParams {
    std::string season = "Summer";
    std::optional<geo::Polygon> region;
    double speed_threshold_kmh = 30.0;
    std::string year_from = "2010";
    std::string year_to = "2015";
    std::optional<geo::Polygon> start_footprint;  // Q3
    std::optional<geo::Polygon> end_footprint;    // Q3
};

ResultTable canned_query(const wh::Warehouse& w, const std::string& id, const CannedParams& p);

/// The four canned queries expressed as specs over the flat view; exposed so an
/// oracle can re-run them through an independent evaluator.
QuerySpec canned_query_spec(const std::string& id, const CannedParams& p);

QuerySpec parse_query_spec_json(const std::string& text);

}  // namespace trajdw::olap
