#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "trajdw/geo.hpp"

namespace trajdw::traj {

struct NonMonotonicTime : std::runtime_error {
    std::size_t index;
    NonMonotonicTime(std::size_t idx, const std::string& what)
        : std::runtime_error(what), index(idx) {}
};
struct EmptyTrajectory : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct IndexOutOfRange : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct TimedPoint {
    geo::GeoPoint point;
    std::int64_t t = 0;  // seconds since epoch, UTC

    bool operator==(const TimedPoint&) const = default;
};

struct RawTrajectory {
    std::string traj_id;
    std::string object_id;
    std::vector<TimedPoint> points;  // strictly increasing timestamps
};

struct SegmentationParams {
    double eps_meters = 50.0;
    double min_stop_duration_s = 300.0;
};

enum class EpisodeKind { Stop, Move };

struct Episode {
    EpisodeKind kind = EpisodeKind::Move;
    std::size_t start_index = 0;
    std::size_t end_index = 0;  // inclusive
    std::int64_t t_begin = 0;
    std::int64_t t_end = 0;
    geo::GeoPoint centroid;  // meaningful for Stops
    geo::BoundingBox bbox;
};

struct EpisodeStats {
    double duration_s = 0.0;
    double travel_distance_m = 0.0;
    double avg_speed_mps = 0.0;
    std::size_t num_points = 0;
};

struct SegmentationResult {
    std::vector<Episode> episodes;
    bool single_point_warning = false;
};

RawTrajectory validate_raw_trajectory(std::string traj_id, std::string object_id,
                                      std::vector<TimedPoint> points);

/// Sliding-anchor stop detection; adjacent episodes share their boundary index.
SegmentationResult segment_episodes(const RawTrajectory& traj, const SegmentationParams& params);

EpisodeStats episode_stats(const RawTrajectory& traj, const Episode& ep);

}  // namespace trajdw::traj
