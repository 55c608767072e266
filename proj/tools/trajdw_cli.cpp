#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "trajdw/etl.hpp"
#include "trajdw/olap.hpp"
#include "trajdw/warehouse.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 1;     // validation / parse failure
constexpr int kExitQuery = 2;     // query error
constexpr int kExitInternal = 3;  // internal fault

int cmd_ingest(const std::string& config_path) {
    try {
        const auto config = trajdw::etl::parse_config(config_path);
        const auto staged = trajdw::etl::extract(config);
        std::cout << "trajectories: " << staged.trajectories.size() << "\n"
                  << "pois: " << staged.pois.size() << "\n"
                  << "events: " << staged.events.size() << "\n"
                  << "posts: " << staged.posts.size() << "\n"
                  << "goal_rules: " << staged.goal_rules.size() << "\n";
        return kExitOk;
    } catch (const std::exception& e) {
        std::cerr << e.what() << "\n";
        return kExitInput;
    }
}

int cmd_run_etl(const std::string& config_path, const std::string& out_dir) {
    try {
        const auto config = trajdw::etl::parse_config(config_path);
        const auto report = trajdw::etl::run_pipeline(config, out_dir);
        std::cout << report.to_json();
        return kExitOk;
    } catch (const std::exception& e) {
        std::cerr << e.what() << "\n";
        return kExitInput;
    }
}

struct QueryArgs {
    std::string warehouse_dir;
    std::string spec_path;
    std::string canned;
    std::string season = "Summer";
    std::string polygon_wkt;
    std::string start_polygon_wkt;
    std::string end_polygon_wkt;
    double speed_kmh = 30.0;
    std::string year_from = "2010";
    std::string year_to = "2015";
};

int cmd_query(const QueryArgs& args) {
    trajdw::wh::Warehouse warehouse;
    try {
        warehouse = trajdw::wh::Warehouse::load(args.warehouse_dir);
        const auto report = warehouse.integrity_check();
        if (!report.empty()) {
            std::cerr << "warehouse failed integrity check\n";
            return kExitInternal;
        }
    } catch (const std::exception& e) {
        std::cerr << e.what() << "\n";
        return kExitInput;
    }
    try {
        trajdw::olap::ResultTable result;
        if (!args.canned.empty()) {
            trajdw::olap::CannedParams p;
            p.season = args.season;
            if (!args.polygon_wkt.empty())
                p.region = trajdw::geo::parse_wkt_polygon(args.polygon_wkt);
            if (!args.start_polygon_wkt.empty())
                p.start_footprint = trajdw::geo::parse_wkt_polygon(args.start_polygon_wkt);
            if (!args.end_polygon_wkt.empty())
                p.end_footprint = trajdw::geo::parse_wkt_polygon(args.end_polygon_wkt);
            p.speed_threshold_kmh = args.speed_kmh;
            p.year_from = args.year_from;
            p.year_to = args.year_to;
            result = trajdw::olap::canned_query(warehouse, args.canned, p);
        } else {
            std::ifstream is(args.spec_path, std::ios::binary);
            if (!is) {
                std::cerr << "cannot open " << args.spec_path << "\n";
                return kExitInput;
            }
            std::ostringstream ss;
            ss << is.rdbuf();
            const auto spec = trajdw::olap::parse_query_spec_json(ss.str());
            result = trajdw::olap::execute(warehouse, spec);
        }
        std::cout << result.to_csv();
        return kExitOk;
    } catch (const std::exception& e) {
        std::cerr << e.what() << "\n";
        return kExitQuery;
    }
}

int cmd_export_schema() {
    std::cout << trajdw::wh::Warehouse::schema_descriptor_json();
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"semantic trajectory data warehouse"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    QueryArgs query_args;

    auto* ingest = app.add_subcommand("ingest", "parse and validate the input files");
    ingest->add_option("--config", config_path, "ETL config file")->required();

    auto* run_etl = app.add_subcommand("run-etl", "run the full pipeline into a warehouse dir");
    run_etl->add_option("--config", config_path, "ETL config file")->required();
    run_etl->add_option("--out", out_dir, "warehouse output directory")->required();

    auto* query = app.add_subcommand("query", "run a query and print the result as CSV");
    query->add_option("--warehouse", query_args.warehouse_dir, "warehouse directory")->required();
    query->add_option("--spec", query_args.spec_path, "query spec JSON file");
    query->add_option("--canned", query_args.canned, "canned query id (Q1..Q4)");
    query->add_option("--season", query_args.season, "calendar season (Q1/Q2)");
    query->add_option("--polygon-wkt", query_args.polygon_wkt, "region polygon (Q1/Q2)");
    query->add_option("--start-polygon-wkt", query_args.start_polygon_wkt,
                      "start stop footprint (Q3)");
    query->add_option("--end-polygon-wkt", query_args.end_polygon_wkt, "end stop footprint (Q3)");
    query->add_option("--speed-kmh", query_args.speed_kmh, "speed threshold in km/h (Q4)");
    query->add_option("--from", query_args.year_from, "first calendar year (Q4)");
    query->add_option("--to", query_args.year_to, "last calendar year (Q4)");

    auto* export_schema = app.add_subcommand("export-schema", "print the schema descriptor JSON");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitInput;
    }

    try {
        if (ingest->parsed()) return cmd_ingest(config_path);
        if (run_etl->parsed()) return cmd_run_etl(config_path, out_dir);
        if (query->parsed()) {
            if (query_args.canned.empty() == query_args.spec_path.empty()) {
                std::cerr << "provide exactly one of --spec or --canned\n";
                return kExitInput;
            }
            return cmd_query(query_args);
        }
        if (export_schema->parsed()) return cmd_export_schema();
    } catch (const std::exception& e) {
        std::cerr << "internal fault: " << e.what() << "\n";
        return kExitInternal;
    }
    return kExitInternal;
}
