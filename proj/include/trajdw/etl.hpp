#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "trajdw/enrich.hpp"
#include "trajdw/timeutil.hpp"
#include "trajdw/trajectory.hpp"
#include "trajdw/warehouse.hpp"

namespace trajdw::etl {

struct FileNotFound : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct EtlConfig {
    std::string points_path;
    std::string pois_path;
    std::string events_path;
    std::string posts_path;
    std::string goal_rules_path;
    traj::SegmentationParams params;
    timeutil::Hemisphere hemisphere = timeutil::Hemisphere::North;
    std::string domain_profile = "tourism";  // tourism | birds | traffic | custom
    // custom-profile overrides, empty means "use the profile default"
    std::string object_type;
    std::string model_name;
    std::string model_feature;
    std::string mode_name;
    std::string forced_transport_type;
    std::string transportation_object;
};

/// Flat `key = value` file; relative paths resolve against the config file's directory.
EtlConfig parse_config(const std::string& path);

struct Staged {
    std::vector<traj::RawTrajectory> trajectories;  // sorted by traj_id
    std::vector<enrich::PointOfInterest> pois;
    std::vector<enrich::EventOfInterest> events;
    std::vector<enrich::SocialPost> posts;
    enrich::GoalRules goal_rules;
};

/// Throws ParseError listing every offending file:line when any record is bad.
Staged extract(const EtlConfig& config);

struct FactDraft {
    std::string traj_id;
    std::int64_t segment_ordinal = 0;
    // empty tuple means the reserved UNKNOWN member (key 0)
    std::vector<std::string> geo_attrs;
    std::vector<std::string> temporal_attrs;
    std::vector<std::string> event_attrs;
    std::vector<std::string> traj_attrs;
    std::vector<std::string> social_attrs;
    wh::FactRow measures;  // keys filled in at load time
    bool unmatched_stop = false;
};

struct Transformed {
    std::vector<enrich::SemanticTrajectory> trajectories;
    std::vector<FactDraft> drafts;
    std::int64_t orphan_posts = 0;
    std::int64_t foreign_posts = 0;
    std::vector<std::string> warnings;
};

Transformed transform(const Staged& staged, const EtlConfig& config);

struct LoadReport {
    std::int64_t trajectories_in = 0;
    std::int64_t episodes_built = 0;
    std::int64_t facts_inserted = 0;
    std::int64_t facts_skipped_duplicate = 0;
    std::map<std::string, std::int64_t> dimension_cardinalities;
    std::int64_t orphan_posts = 0;
    std::int64_t unmatched_stops = 0;
    std::vector<std::string> warnings;

    std::string to_json() const;
};

LoadReport load(wh::Warehouse& warehouse, const Transformed& transformed);

/// Extract + transform + load into out_dir; all table files are written through
/// temp files and renamed so a failure leaves existing files untouched.
LoadReport run_pipeline(const EtlConfig& config, const std::string& out_dir);

}  // namespace trajdw::etl
