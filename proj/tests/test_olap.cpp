#include <random>

#include "doctest.h"
#include "support/query_oracle.hpp"
#include "support/synth.hpp"
#include "trajdw/olap.hpp"

using namespace trajdw;
using oracles::dim_tuple;

namespace {

const char* kStudyRegion =
    "POLYGON((-34.954449 -8.124354, -34.904449 -8.124354, -34.904449 -8.084354, "
    "-34.954449 -8.084354, -34.954449 -8.124354))";

olap::Predicate eq(const std::string& attr, const std::string& value) {
    olap::Predicate p;
    p.kind = olap::PredicateKind::Eq;
    p.attr = attr;
    p.value = value;
    return p;
}

olap::Predicate spatial(const std::string& attr, const std::string& wkt) {
    olap::Predicate p;
    p.kind = olap::PredicateKind::SpatialWithin;
    p.attr = attr;
    p.polygon = geo::parse_wkt_polygon(wkt);
    return p;
}

void check_matches_oracle(const wh::Warehouse& w, const olap::QuerySpec& q) {
    const auto got = oracles::canonical(olap::execute(w, q));
    const auto want = oracles::run(w, q);
    REQUIRE(got.columns == want.columns);
    REQUIRE(got.rows == want.rows);
}

// small warehouse with event popularity skewed toward "Festival" in-region
wh::Warehouse popularity_warehouse() {
    wh::Warehouse w;
    const auto in_geo = w.resolve_dimension_member(
        "geographical",
        dim_tuple("geographical",
                  {{"City", "Recife"}, {"GeoObjectType", oracles::square_wkt(-8.10, -34.93, 0.002)}}));
    const auto out_geo = w.resolve_dimension_member(
        "geographical",
        dim_tuple("geographical",
                  {{"City", "Paris"}, {"GeoObjectType", oracles::square_wkt(48.85, 2.35, 0.002)}}));
    const auto summer = w.resolve_dimension_member(
        "temporal", dim_tuple("temporal", {{"CalendarSeason", "Summer"}, {"CalendarYear", "2013"}}));
    const auto winter = w.resolve_dimension_member(
        "temporal", dim_tuple("temporal", {{"CalendarSeason", "Winter"}, {"CalendarYear", "2013"}}));
    const auto festival = w.resolve_dimension_member(
        "events", dim_tuple("events", {{"EventItemName", "Festival"},
                                       {"EventGoalName", "Entertainment"}}));
    const auto carnival = w.resolve_dimension_member(
        "events", dim_tuple("events", {{"EventItemName", "Carnival"},
                                       {"EventGoalName", "Parade"}}));

    auto add = [&](int ordinal, std::int64_t geo_k, std::int64_t temp_k, std::int64_t ev_k) {
        wh::FactRow f;
        f.traj_id = "t1";
        f.segment_ordinal = ordinal;
        f.geo_space_id = geo_k;
        f.temp_inst_id = temp_k;
        f.events_rep_id = ev_k;
        f.duration_s = 60.0 * (ordinal + 1);
        f.num_points = ordinal + 2;
        w.insert_fact(f);
    };
    int ord = 0;
    for (int k = 0; k < 5; ++k) add(ord++, in_geo, summer, festival);
    for (int k = 0; k < 2; ++k) add(ord++, in_geo, summer, carnival);
    add(ord++, in_geo, winter, festival);   // wrong season
    add(ord++, out_geo, summer, festival);  // outside the region
    add(ord++, in_geo, summer, 0);          // no event attached
    return w;
}

}  // namespace

TEST_CASE("COUNT over all facts") {
    std::mt19937 rng(7001);
    const auto w = oracles::random_warehouse(rng, 3);
    olap::QuerySpec q;
    q.aggregates = {{olap::AggFn::Count, "*"}};
    const auto res = olap::execute(w, q);
    REQUIRE(res.columns.size() == 1);
    CHECK(res.columns[0].name == "COUNT(*)");
    REQUIRE(res.rows.size() == 1);
    CHECK(std::get<std::int64_t>(res.rows[0][0]) == 3);
}

TEST_CASE("filters compose and match the flat-scan oracle") {
    std::mt19937 rng(7002);
    const auto w = oracles::random_warehouse(rng, 120);

    olap::QuerySpec q;
    q.filters = {eq("CalendarSeason", "Summer")};
    q.group_by = {"CalendarYear"};
    q.aggregates = {{olap::AggFn::Count, "*"}, {olap::AggFn::Sum, "NumPoints"}};
    check_matches_oracle(w, q);

    q.filters.push_back(spatial("GeoObjectType", kStudyRegion));
    check_matches_oracle(w, q);

    olap::Predicate lt;
    lt.kind = olap::PredicateKind::MeasureLess;
    lt.attr = "AverageTrajectorySpeed";
    lt.threshold = 3.0;
    q.filters.push_back(lt);
    check_matches_oracle(w, q);

    olap::Predicate between;
    between.kind = olap::PredicateKind::Between;
    between.attr = "CalendarYear";
    between.low = "2010";
    between.high = "2015";
    q.filters = {between};
    q.group_by = {"CalendarYear", "CalendarSeason"};
    q.aggregates = {{olap::AggFn::Avg, "TravelDistanceM"}};
    check_matches_oracle(w, q);
}

TEST_CASE("predicate type errors") {
    std::mt19937 rng(7003);
    const auto w = oracles::random_warehouse(rng, 10);
    olap::QuerySpec q;

    q.filters = {spatial("City", kStudyRegion)};
    CHECK_THROWS_AS(olap::execute(w, q), olap::TypeMismatch);

    olap::Predicate lt;
    lt.kind = olap::PredicateKind::MeasureLess;
    lt.attr = "CalendarYear";  // attribute, not a measure
    lt.threshold = 2000.0;
    q.filters = {lt};
    CHECK_THROWS_AS(olap::execute(w, q), olap::TypeMismatch);

    olap::Predicate between;
    between.kind = olap::PredicateKind::Between;
    between.attr = "CalendarYear";
    between.low = "twenty";
    between.high = "2015";
    q.filters = {between};
    CHECK_THROWS_AS(olap::execute(w, q), olap::TypeMismatch);

    q.filters = {eq("NoSuchColumn", "x")};
    CHECK_THROWS_AS(olap::execute(w, q), olap::UnknownAttribute);

    q.filters.clear();
    q.aggregates = {{olap::AggFn::Sum, "*"}};
    CHECK_THROWS_AS(olap::execute(w, q), olap::TypeMismatch);

    q.aggregates = {{olap::AggFn::Sum, "City"}};
    CHECK_THROWS_AS(olap::execute(w, q), olap::TypeMismatch);
}

TEST_CASE("aggregate-free query is a distinct sorted projection") {
    const auto w = popularity_warehouse();
    olap::QuerySpec q;
    q.group_by = {"EventItemName"};
    const auto res = olap::execute(w, q);
    REQUIRE(res.rows.size() == 3);  // Carnival, Festival, UNKNOWN
    CHECK(std::get<std::string>(res.rows[0][0]) == "Carnival");
    CHECK(std::get<std::string>(res.rows[1][0]) == "Festival");
    CHECK(std::get<std::string>(res.rows[2][0]) == "UNKNOWN");
    check_matches_oracle(w, q);
}

TEST_CASE("spatial filter semantics on points and polygons") {
    const auto w = popularity_warehouse();

    // polygon cells pass only when every vertex is inside the region
    olap::QuerySpec q;
    q.filters = {spatial("GeoObjectType", kStudyRegion)};
    q.aggregates = {{olap::AggFn::Count, "*"}};
    auto res = olap::execute(w, q);
    CHECK(std::get<std::int64_t>(res.rows[0][0]) == 9);  // only the Paris fact is excluded

    // point containment
    wh::Warehouse pw;
    const auto in_traj = pw.resolve_dimension_member(
        "trajectory", dim_tuple("trajectory", {{"TrajSegmentSemanticStartPoint",
                                                oracles::point_wkt(-8.10, -34.93)}}));
    const auto out_traj = pw.resolve_dimension_member(
        "trajectory", dim_tuple("trajectory", {{"TrajSegmentSemanticStartPoint",
                                                oracles::point_wkt(-8.10, -35.50)}}));
    for (int k = 0; k < 2; ++k) {
        wh::FactRow f;
        f.traj_id = "p";
        f.segment_ordinal = k;
        f.traj_rep_id = k == 0 ? in_traj : out_traj;
        pw.insert_fact(f);
    }
    olap::QuerySpec pq;
    pq.filters = {spatial("TrajSegmentSemanticStartPoint", kStudyRegion)};
    pq.group_by = {"TrajId", "SegmentOrdinal"};
    res = olap::execute(pw, pq);
    REQUIRE(res.rows.size() == 1);
    CHECK(std::get<std::int64_t>(res.rows[0][1]) == 0);
    check_matches_oracle(pw, pq);
}

TEST_CASE("argmax_count keeps only the most frequent groups") {
    const auto w = popularity_warehouse();
    olap::CannedParams p;
    p.region = geo::parse_wkt_polygon(kStudyRegion);

    auto res = olap::canned_query(w, "Q1", p);
    REQUIRE(res.rows.size() == 1);
    CHECK(std::get<std::string>(res.rows[0][0]) == "Festival");
    CHECK(std::get<std::string>(res.rows[0][1]) == "Entertainment");
    CHECK(std::get<std::int64_t>(res.rows[0][2]) == 5);

    // ties keep every argmax group
    auto spec = olap::canned_query_spec("Q1", p);
    wh::Warehouse tie = popularity_warehouse();
    for (int k = 0; k < 3; ++k) {
        wh::FactRow f;
        f.traj_id = "t2";
        f.segment_ordinal = k;
        f.geo_space_id = 1;   // in-region member
        f.temp_inst_id = 1;   // summer member
        f.events_rep_id = 2;  // carnival
        tie.insert_fact(f);
    }
    const auto tied = olap::execute(tie, spec);
    REQUIRE(tied.rows.size() == 2);
    CHECK(std::get<std::string>(tied.rows[0][0]) == "Carnival");
    CHECK(std::get<std::string>(tied.rows[1][0]) == "Festival");
    check_matches_oracle(tie, spec);

    // duplicating every fact scales counts but not the winning groups
    wh::Warehouse doubled = popularity_warehouse();
    for (const auto& f : w.facts()) {
        auto copy = f;
        copy.traj_id = "copy-" + f.traj_id;
        doubled.insert_fact(copy);
    }
    const auto res2 = olap::canned_query(doubled, "Q1", p);
    REQUIRE(res2.rows.size() == 1);
    CHECK(std::get<std::string>(res2.rows[0][0]) == "Festival");
    CHECK(std::get<std::int64_t>(res2.rows[0][2]) == 10);

    // argmax without a COUNT aggregate is rejected
    olap::QuerySpec bad;
    bad.group_by = {"EventItemName"};
    bad.aggregates = {{olap::AggFn::Sum, "NumPoints"}};
    bad.argmax_count = true;
    CHECK_THROWS_AS(olap::execute(w, bad), olap::UnknownQuery);
}

TEST_CASE("canned queries match the oracle on a randomized warehouse") {
    std::mt19937 rng(7004);
    const auto w = oracles::random_warehouse(rng, 150);
    olap::CannedParams p;
    p.region = geo::parse_wkt_polygon(kStudyRegion);
    p.start_footprint = geo::parse_wkt_polygon(oracles::square_wkt(-8.12, -34.95, 0.01));
    p.end_footprint = geo::parse_wkt_polygon(oracles::square_wkt(-8.10, -34.93, 0.01));

    for (const std::string id : {"Q1", "Q2", "Q3", "Q4"}) {
        const auto spec = olap::canned_query_spec(id, p);
        const auto got = oracles::canonical(olap::canned_query(w, id, p));
        const auto want = oracles::run(w, spec);
        REQUIRE(got.columns == want.columns);
        CHECK(got.rows == want.rows);
    }

    // empty season yields an empty result, not an error
    olap::CannedParams none = p;
    none.season = "Monsoon";
    CHECK(olap::canned_query(w, "Q2", none).rows.empty());

    CHECK_THROWS_AS(olap::canned_query(w, "Q5", p), olap::UnknownQuery);
    CHECK_THROWS_AS(olap::canned_query(w, "Q1", olap::CannedParams{}), olap::UnknownQuery);
    olap::CannedParams no_footprints = p;
    no_footprints.start_footprint.reset();
    CHECK_THROWS_AS(olap::canned_query(w, "Q3", no_footprints), olap::UnknownQuery);
}

TEST_CASE("randomized query specs agree with the flat-scan oracle") {
    std::mt19937 rng(7005);
    const auto w = oracles::random_warehouse(rng, 180);

    const std::vector<std::string> group_pool = {
        "CalendarYear", "CalendarSeason",  "Month",        "City",
        "Country",      "EventItemName",   "DayType",      "TrajectoryTransportationTypeName",
        "TrajId",       "NumSemanticStops"};
    const std::vector<std::string> numeric_targets = {
        "DurationS", "TravelDistanceM", "NumPoints", "AverageTrajectorySpeed", "eventsRepId"};
    const std::vector<std::string> any_targets = {
        "DurationS", "NumPoints", "City", "EventItemName", "CalendarYear", "TrajId"};

    std::uniform_int_distribution<int> coin(0, 1);
    for (int iter = 0; iter < 80; ++iter) {
        olap::QuerySpec q;

        const int n_filters = std::uniform_int_distribution<int>(0, 2)(rng);
        for (int k = 0; k < n_filters; ++k) {
            switch (std::uniform_int_distribution<int>(0, 4)(rng)) {
                case 0:
                    q.filters.push_back(eq("CalendarSeason", coin(rng) ? "Summer" : "Winter"));
                    break;
                case 1: {
                    auto p = eq("Country", coin(rng) ? "Brazil" : "France");
                    if (coin(rng)) p.kind = olap::PredicateKind::Neq;
                    q.filters.push_back(p);
                    break;
                }
                case 2: {
                    olap::Predicate p;
                    p.kind = olap::PredicateKind::Between;
                    p.attr = coin(rng) ? "CalendarYear" : "NumPoints";
                    p.low = p.attr == "CalendarYear" ? "2010" : "5";
                    p.high = p.attr == "CalendarYear" ? "2015" : "25";
                    q.filters.push_back(p);
                    break;
                }
                case 3: {
                    olap::Predicate p;
                    p.kind = olap::PredicateKind::MeasureLess;
                    p.attr = coin(rng) ? "DurationS" : "AverageTrajectorySpeed";
                    p.threshold = p.attr == "DurationS" ? 500.0 : 4.0;
                    q.filters.push_back(p);
                    break;
                }
                case 4:
                    q.filters.push_back(spatial(
                        coin(rng) ? "GeoObjectType" : "TrajSegmentSemanticStartPoint",
                        kStudyRegion));
                    break;
            }
        }

        const int n_group = std::uniform_int_distribution<int>(1, 3)(rng);
        std::vector<std::string> pool = group_pool;
        std::shuffle(pool.begin(), pool.end(), rng);
        q.group_by.assign(pool.begin(), pool.begin() + n_group);

        const int n_aggs = std::uniform_int_distribution<int>(0, 3)(rng);
        for (int k = 0; k < n_aggs; ++k) {
            switch (std::uniform_int_distribution<int>(0, 5)(rng)) {
                case 0: q.aggregates.push_back({olap::AggFn::Count, "*"}); break;
                case 1:
                    q.aggregates.push_back(
                        {olap::AggFn::Sum,
                         numeric_targets[std::uniform_int_distribution<std::size_t>(
                             0, numeric_targets.size() - 1)(rng)]});
                    break;
                case 2:
                    q.aggregates.push_back(
                        {olap::AggFn::Avg,
                         numeric_targets[std::uniform_int_distribution<std::size_t>(
                             0, numeric_targets.size() - 1)(rng)]});
                    break;
                case 3:
                case 4:
                    q.aggregates.push_back(
                        {coin(rng) ? olap::AggFn::Min : olap::AggFn::Max,
                         any_targets[std::uniform_int_distribution<std::size_t>(
                             0, any_targets.size() - 1)(rng)]});
                    break;
                case 5:
                    q.aggregates.push_back(
                        {olap::AggFn::CountDistinct,
                         any_targets[std::uniform_int_distribution<std::size_t>(
                             0, any_targets.size() - 1)(rng)]});
                    break;
            }
        }

        bool has_count = false;
        for (const auto& a : q.aggregates) has_count |= a.fn == olap::AggFn::Count;
        if (has_count && coin(rng)) q.argmax_count = true;
        if (!q.group_by.empty() && coin(rng)) q.order_by = {q.group_by.back()};

        check_matches_oracle(w, q);

        // adding a filter never adds rows to an aggregate-free projection
        if (q.aggregates.empty()) {
            auto narrowed = q;
            narrowed.filters.push_back(eq("CalendarSeason", "Summer"));
            CHECK(olap::execute(w, narrowed).rows.size() <= olap::execute(w, q).rows.size());
        }
    }
}

TEST_CASE("rollup re-aggregates along a hierarchy") {
    std::mt19937 rng(7006);
    const auto w = oracles::random_warehouse(rng, 140);

    olap::QuerySpec day_q;
    day_q.group_by = {"CalendarYear", "Quarter", "CalendarSeason", "Month", "Week", "DayType",
                      "Day"};
    day_q.aggregates = {{olap::AggFn::Count, "*"}, {olap::AggFn::Sum, "NumPoints"}};
    const auto at_day = olap::execute(w, day_q);

    auto direct_at = [&](const std::vector<std::string>& keys) {
        olap::QuerySpec q;
        q.group_by = keys;
        q.aggregates = day_q.aggregates;
        return olap::execute(w, q);
    };

    const auto at_month = olap::rollup(at_day, "temporal", "day", "month");
    CHECK(at_month.to_csv() ==
          direct_at({"CalendarYear", "Quarter", "CalendarSeason", "Month"}).to_csv());

    const auto at_quarter = olap::rollup(at_month, "temporal", "month", "quarter");
    CHECK(at_quarter.to_csv() == direct_at({"CalendarYear", "Quarter"}).to_csv());

    const auto at_year = olap::rollup(at_quarter, "temporal", "quarter", "calendar_year");
    CHECK(at_year.to_csv() == direct_at({"CalendarYear"}).to_csv());

    // totals are conserved at every level
    auto totals = [](const olap::ResultTable& t) {
        std::int64_t count = 0, points = 0;
        const std::size_t n = t.columns.size();
        for (const auto& row : t.rows) {
            count += std::get<std::int64_t>(row[n - 2]);
            points += std::get<std::int64_t>(row[n - 1]);
        }
        return std::pair(count, points);
    };
    CHECK(totals(at_day) == totals(at_month));
    CHECK(totals(at_month) == totals(at_quarter));
    CHECK(totals(at_quarter) == totals(at_year));

    // geographic city -> country
    olap::QuerySpec city_q;
    city_q.group_by = {"Continent", "Country", "City"};
    city_q.aggregates = {{olap::AggFn::Count, "*"}};
    const auto by_city = olap::execute(w, city_q);
    const auto by_country = olap::rollup(by_city, "geographical", "city", "country");
    olap::QuerySpec country_q;
    country_q.group_by = {"Continent", "Country"};
    country_q.aggregates = city_q.aggregates;
    CHECK(by_country.to_csv() == olap::execute(w, country_q).to_csv());
}

TEST_CASE("rollup rejects bad level pairs and non-rollable aggregates") {
    std::mt19937 rng(7007);
    const auto w = oracles::random_warehouse(rng, 30);
    olap::QuerySpec q;
    q.group_by = {"CalendarYear", "Month", "Day"};
    q.aggregates = {{olap::AggFn::Count, "*"}};
    const auto res = olap::execute(w, q);

    CHECK_THROWS_AS(olap::rollup(res, "temporal", "month", "day"), olap::NotAncestorLevel);
    CHECK_THROWS_AS(olap::rollup(res, "temporal", "day", "day"), olap::NotAncestorLevel);
    CHECK_THROWS_AS(olap::rollup(res, "temporal", "day", "fortnight"), olap::NotAncestorLevel);
    CHECK_THROWS_AS(olap::rollup(res, "weather", "day", "month"), wh::UnknownDimension);

    olap::QuerySpec avg_q = q;
    avg_q.aggregates = {{olap::AggFn::Avg, "DurationS"}};
    CHECK_THROWS_AS(olap::rollup(olap::execute(w, avg_q), "temporal", "day", "month"),
                    olap::NonRollableAggregate);
    avg_q.aggregates = {{olap::AggFn::CountDistinct, "TrajId"}};
    CHECK_THROWS_AS(olap::rollup(olap::execute(w, avg_q), "temporal", "day", "month"),
                    olap::NonRollableAggregate);
}

TEST_CASE("query specs parse from JSON") {
    const std::string text = R"json({
        "filters": [
            {"type": "eq", "attr": "CalendarSeason", "value": "Summer"},
            {"type": "neq", "attr": "eventsRepId", "value": "0"},
            {"type": "between", "attr": "CalendarYear", "low": "2010", "high": "2015"},
            {"type": "measure_lt", "attr": "AverageTrajectorySpeed", "threshold": 8.33},
            {"type": "spatial_within", "attr": "GeoObjectType",
             "polygon_wkt": "POLYGON((0 0, 1 0, 1 1, 0 1, 0 0))"}
        ],
        "group_by": ["EventItemName"],
        "aggregates": [{"fn": "COUNT", "target": "*"}, {"fn": "SUM", "target": "DurationS"}],
        "argmax_count": true,
        "order_by": ["EventItemName"]
    })json";
    const auto q = olap::parse_query_spec_json(text);
    REQUIRE(q.filters.size() == 5);
    CHECK(q.filters[0].kind == olap::PredicateKind::Eq);
    CHECK(q.filters[1].kind == olap::PredicateKind::Neq);
    CHECK(q.filters[2].low == "2010");
    CHECK(q.filters[3].threshold == doctest::Approx(8.33));
    CHECK(q.filters[4].polygon.exterior.size() == 5);  // closed ring keeps the repeat vertex
    CHECK(q.group_by == std::vector<std::string>{"EventItemName"});
    REQUIRE(q.aggregates.size() == 2);
    CHECK(q.aggregates[1].fn == olap::AggFn::Sum);
    CHECK(q.argmax_count);
    CHECK(q.order_by == std::vector<std::string>{"EventItemName"});

    CHECK_THROWS_AS(olap::parse_query_spec_json(R"({"filters": [{"type": "like", "attr": "x"}]})"),
                    olap::UnknownQuery);
    CHECK_THROWS_AS(
        olap::parse_query_spec_json(R"({"aggregates": [{"fn": "MEDIAN", "target": "x"}]})"),
        olap::UnknownQuery);
    CHECK_THROWS(olap::parse_query_spec_json("not json"));
}

TEST_CASE("value ordering and CSV serialization are deterministic") {
    const auto w = popularity_warehouse();
    olap::QuerySpec q;
    q.group_by = {"EventItemName", "CalendarSeason"};
    q.aggregates = {{olap::AggFn::Count, "*"}, {olap::AggFn::Avg, "DurationS"}};
    const auto a = olap::execute(w, q).to_csv();
    const auto b = olap::execute(w, q).to_csv();
    CHECK(a == b);
    CHECK(a.rfind("EventItemName,CalendarSeason,COUNT(*),AVG(DurationS)\n", 0) == 0);
}
