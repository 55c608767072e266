#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "trajdw/geo.hpp"
#include "trajdw/trajectory.hpp"

namespace trajdw::enrich {

struct PointOfInterest {
    std::string poi_id;
    geo::Polygon footprint;
    std::string object_name;
    std::string object_category;  // Hotel, Museum, Mountain, ...
    std::map<std::string, std::string> landmark_attrs;
    bool allows_stop = true;
    bool allows_move = true;
    std::string semantic_purpose;
};

struct EventOfInterest {
    std::string event_id;
    geo::Polygon footprint;
    std::string event_item_name;
    std::string goal_name;
    std::vector<std::string> activity_names;
    std::string env_type;
    std::string env_characteristics;
    std::int64_t t_start = 0;
    std::int64_t t_end = 0;
};

struct SemanticAnnotation {
    std::string geo_object_property;      // O_P
    std::string trajectory_goal;          // O_G
    std::optional<std::string> event_ref; // O_E
    bool unannotated() const {
        return geo_object_property.empty() && trajectory_goal.empty() && !event_ref;
    }
};

struct SocialPost {
    std::string post_id;
    std::string object_id;
    std::int64_t t = 0;
    std::string medium_type;
    std::string account_platform;
    std::string content_kind;        // textual | image
    std::string content_text;
    std::string expressive_thought;  // positive | negative | indifferent
    std::string qualitative_mood;
    std::optional<geo::GeoPoint> location;
};

struct SemanticSegment {
    traj::TimedPoint begin;
    std::optional<std::string> begin_poi;
    traj::TimedPoint end;
    std::optional<std::string> end_poi;
    traj::Episode episode;  // kind selects stop/move role
    std::optional<std::string> matched_poi;
    std::vector<std::string> matched_events;  // sorted by event_id
    SemanticAnnotation annotation;
    std::string transport_mode;  // Walking/Biking/Driving/Flight/... ("none" for stops)
    std::string goal;
    traj::EpisodeStats stats;
    std::vector<SocialPost> posts;
};

struct SemanticTrajectory {
    std::string traj_id;
    std::string object_id;
    std::vector<SemanticSegment> segments;
};

/// `(object_category, event_item_name) -> goal`, empty key parts allowed as wildcards via "".
using GoalRules = std::map<std::pair<std::string, std::string>, std::string>;

/// Speed-threshold labels for Move segments; single label when forced_type is set.
struct TransportRules {
    std::string walking_label = "Walking";
    std::string biking_label = "Biking";
    std::string driving_label = "Driving";
    double walking_below_mps = 1.8;
    double biking_below_mps = 8.0;
    std::optional<std::string> forced_type;  // e.g. "Flight" for birds
};

geo::GeoPoint representative_point(const traj::RawTrajectory& traj, const traj::Episode& ep);

std::optional<std::string> match_poi(const traj::RawTrajectory& traj, const traj::Episode& ep,
                                     const std::vector<PointOfInterest>& catalog);

std::vector<std::string> match_events(const traj::RawTrajectory& traj, const traj::Episode& ep,
                                      const std::vector<EventOfInterest>& catalog);

SemanticTrajectory build_semantic_trajectory(const traj::RawTrajectory& traj,
                                             const std::vector<PointOfInterest>& pois,
                                             const std::vector<EventOfInterest>& events,
                                             const traj::SegmentationParams& params,
                                             const GoalRules& goal_rules,
                                             const TransportRules& transport = {});

struct AttachReport {
    std::size_t attached = 0;
    std::size_t orphans = 0;
    std::size_t foreign_object = 0;
};

AttachReport attach_social_posts(SemanticTrajectory& st, const std::vector<SocialPost>& posts);

GoalRules parse_goal_rules(const std::string& file_contents);

}  // namespace trajdw::enrich
