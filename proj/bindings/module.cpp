#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "trajdw/etl.hpp"
#include "trajdw/olap.hpp"
#include "trajdw/warehouse.hpp"

namespace py = pybind11;
using namespace trajdw;

namespace {

py::dict report_to_dict(const etl::LoadReport& rep) {
    py::dict d;
    d["trajectories_in"] = rep.trajectories_in;
    d["episodes_built"] = rep.episodes_built;
    d["facts_inserted"] = rep.facts_inserted;
    d["facts_skipped_duplicate"] = rep.facts_skipped_duplicate;
    d["dimension_cardinalities"] = rep.dimension_cardinalities;
    d["orphan_posts"] = rep.orphan_posts;
    d["unmatched_stops"] = rep.unmatched_stops;
    d["warnings"] = rep.warnings;
    return d;
}

}  // namespace

PYBIND11_MODULE(_trajdw, m) {
    m.doc() = "semantic trajectory data warehouse core";

    m.def("haversine_distance",
          [](double lat1, double lon1, double lat2, double lon2) {
              return geo::haversine_distance(geo::GeoPoint(lat1, lon1), geo::GeoPoint(lat2, lon2));
          },
          py::arg("lat1"), py::arg("lon1"), py::arg("lat2"), py::arg("lon2"),
          "Great-circle distance in meters");

    m.def("point_in_polygon",
          [](double lat, double lon, const std::string& polygon_wkt) {
              return geo::point_in_polygon(geo::GeoPoint(lat, lon),
                                           geo::parse_wkt_polygon(polygon_wkt));
          },
          py::arg("lat"), py::arg("lon"), py::arg("polygon_wkt"));

    m.def("run_pipeline",
          [](const std::string& config_path, const std::string& out_dir) {
              const auto config = etl::parse_config(config_path);
              return report_to_dict(etl::run_pipeline(config, out_dir));
          },
          py::arg("config_path"), py::arg("out_dir"),
          "Run extract/transform/load and return the load report as a dict");

    m.def("query",
          [](const std::string& warehouse_dir, const std::string& spec_json) {
              const auto warehouse = wh::Warehouse::load(warehouse_dir);
              const auto spec = olap::parse_query_spec_json(spec_json);
              return olap::execute(warehouse, spec).to_csv();
          },
          py::arg("warehouse_dir"), py::arg("spec_json"),
          "Execute a JSON query spec and return the result as CSV text");

    m.def("canned_query",
          [](const std::string& warehouse_dir, const std::string& id, const std::string& season,
             const std::string& polygon_wkt, double speed_kmh, const std::string& year_from,
             const std::string& year_to, const std::string& start_polygon_wkt,
             const std::string& end_polygon_wkt) {
              const auto warehouse = wh::Warehouse::load(warehouse_dir);
              olap::CannedParams p;
              p.season = season;
              if (!polygon_wkt.empty()) p.region = geo::parse_wkt_polygon(polygon_wkt);
              p.speed_threshold_kmh = speed_kmh;
              p.year_from = year_from;
              p.year_to = year_to;
              if (!start_polygon_wkt.empty())
                  p.start_footprint = geo::parse_wkt_polygon(start_polygon_wkt);
              if (!end_polygon_wkt.empty())
                  p.end_footprint = geo::parse_wkt_polygon(end_polygon_wkt);
              return olap::canned_query(warehouse, id, p).to_csv();
          },
          py::arg("warehouse_dir"), py::arg("id"), py::arg("season") = "Summer",
          py::arg("polygon_wkt") = "", py::arg("speed_kmh") = 30.0, py::arg("year_from") = "2010",
          py::arg("year_to") = "2015", py::arg("start_polygon_wkt") = "",
          py::arg("end_polygon_wkt") = "");

    m.def("schema_descriptor", [] { return wh::Warehouse::schema_descriptor_json(); },
          "Schema descriptor JSON (dimensions, levels, attributes, measures)");
}
