#include "trajdw/trajectory.hpp"

#include <cmath>

namespace trajdw::traj {

RawTrajectory validate_raw_trajectory(std::string traj_id, std::string object_id,
                                      std::vector<TimedPoint> points) {
    if (points.empty()) throw EmptyTrajectory("trajectory '" + traj_id + "' has no points");
    for (std::size_t i = 1; i < points.size(); ++i) {
        if (points[i].t <= points[i - 1].t)
            throw NonMonotonicTime(i, "trajectory '" + traj_id +
                                          "': timestamp not strictly increasing at index " +
                                          std::to_string(i));
    }
    return RawTrajectory{std::move(traj_id), std::move(object_id), std::move(points)};
}

namespace {

geo::GeoPoint mean_point(const std::vector<TimedPoint>& pts, std::size_t a, std::size_t b) {
    double lat = 0.0, lon = 0.0;
    for (std::size_t k = a; k <= b; ++k) {
        lat += pts[k].point.lat;
        lon += pts[k].point.lon;
    }
    const double n = static_cast<double>(b - a + 1);
    return geo::GeoPoint(lat / n, lon / n);
}

bool window_is_stop(const std::vector<TimedPoint>& pts, std::size_t a, std::size_t b,
                    double eps_m) {
    const geo::GeoPoint c = mean_point(pts, a, b);
    for (std::size_t k = a; k <= b; ++k) {
        if (geo::haversine_distance(pts[k].point, c) > eps_m) return false;
    }
    return true;
}

Episode make_episode(const RawTrajectory& traj, EpisodeKind kind, std::size_t a, std::size_t b) {
    Episode ep;
    ep.kind = kind;
    ep.start_index = a;
    ep.end_index = b;
    ep.t_begin = traj.points[a].t;
    ep.t_end = traj.points[b].t;
    std::vector<geo::GeoPoint> pts;
    pts.reserve(b - a + 1);
    for (std::size_t k = a; k <= b; ++k) pts.push_back(traj.points[k].point);
    ep.bbox = geo::BoundingBox::of_points(pts);
    if (kind == EpisodeKind::Stop) ep.centroid = mean_point(traj.points, a, b);
    return ep;
}

}  // namespace

SegmentationResult segment_episodes(const RawTrajectory& traj, const SegmentationParams& params) {
    SegmentationResult result;
    const auto& pts = traj.points;
    const std::size_t m = pts.size();
    if (m < 2) {
        result.single_point_warning = true;
        return result;
    }

    // anchor scan: grow [i..j] while every member stays within eps of the running centroid
    std::vector<std::pair<std::size_t, std::size_t>> stops;
    std::size_t i = 0;
    while (i < m) {
        std::size_t j = i;
        while (j + 1 < m && window_is_stop(pts, i, j + 1, params.eps_meters)) ++j;
        if (j > i &&
            static_cast<double>(pts[j].t - pts[i].t) >= params.min_stop_duration_s) {
            stops.emplace_back(i, j);
            i = j + 1;
        } else {
            ++i;
        }
    }

    if (stops.empty()) {
        result.episodes.push_back(make_episode(traj, EpisodeKind::Move, 0, m - 1));
        return result;
    }

    if (stops.front().first > 0)
        result.episodes.push_back(make_episode(traj, EpisodeKind::Move, 0, stops.front().first));
    for (std::size_t s = 0; s < stops.size(); ++s) {
        result.episodes.push_back(
            make_episode(traj, EpisodeKind::Stop, stops[s].first, stops[s].second));
        if (s + 1 < stops.size())
            result.episodes.push_back(
                make_episode(traj, EpisodeKind::Move, stops[s].second, stops[s + 1].first));
    }
    if (stops.back().second < m - 1)
        result.episodes.push_back(make_episode(traj, EpisodeKind::Move, stops.back().second, m - 1));
    return result;
}

EpisodeStats episode_stats(const RawTrajectory& traj, const Episode& ep) {
    if (ep.end_index >= traj.points.size() || ep.start_index > ep.end_index)
        throw IndexOutOfRange("episode indices out of range for trajectory '" + traj.traj_id + "'");
    EpisodeStats st;
    st.num_points = ep.end_index - ep.start_index + 1;
    st.duration_s = static_cast<double>(traj.points[ep.end_index].t - traj.points[ep.start_index].t);
    for (std::size_t k = ep.start_index; k < ep.end_index; ++k)
        st.travel_distance_m +=
            geo::haversine_distance(traj.points[k].point, traj.points[k + 1].point);
    st.avg_speed_mps = st.duration_s > 0.0 ? st.travel_distance_m / st.duration_s : 0.0;
    return st;
}

}  // namespace trajdw::traj
