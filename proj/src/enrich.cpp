#include "trajdw/enrich.hpp"

#include <algorithm>
#include <sstream>

namespace trajdw::enrich {

geo::GeoPoint representative_point(const traj::RawTrajectory& traj, const traj::Episode& ep) {
    if (ep.kind == traj::EpisodeKind::Stop) return ep.centroid;
    const std::size_t mid = (ep.start_index + ep.end_index) / 2;
    return traj.points[mid].point;
}

namespace {

std::optional<std::string> poi_at_point(const geo::GeoPoint& p,
                                        const std::vector<PointOfInterest>& catalog,
                                        const traj::EpisodeKind* kind_filter) {
    const PointOfInterest* best = nullptr;
    double best_area = 0.0;
    for (const auto& poi : catalog) {
        if (kind_filter) {
            if (*kind_filter == traj::EpisodeKind::Stop && !poi.allows_stop) continue;
            if (*kind_filter == traj::EpisodeKind::Move && !poi.allows_move) continue;
        }
        if (!geo::point_in_polygon(p, poi.footprint)) continue;
        const double area = geo::bbox_area(poi.footprint.bbox());
        if (!best || area < best_area || (area == best_area && poi.poi_id < best->poi_id)) {
            best = &poi;
            best_area = area;
        }
    }
    if (!best) return std::nullopt;
    return best->poi_id;
}

const PointOfInterest* find_poi(const std::vector<PointOfInterest>& catalog,
                                const std::string& id) {
    for (const auto& poi : catalog)
        if (poi.poi_id == id) return &poi;
    return nullptr;
}

const EventOfInterest* find_event(const std::vector<EventOfInterest>& catalog,
                                  const std::string& id) {
    for (const auto& ev : catalog)
        if (ev.event_id == id) return &ev;
    return nullptr;
}

}  // namespace

std::optional<std::string> match_poi(const traj::RawTrajectory& traj, const traj::Episode& ep,
                                     const std::vector<PointOfInterest>& catalog) {
    const geo::GeoPoint p = representative_point(traj, ep);
    return poi_at_point(p, catalog, &ep.kind);
}

std::vector<std::string> match_events(const traj::RawTrajectory& traj, const traj::Episode& ep,
                                      const std::vector<EventOfInterest>& catalog) {
    const geo::GeoPoint p = representative_point(traj, ep);
    std::vector<std::string> out;
    for (const auto& ev : catalog) {
        if (ev.t_start > ep.t_end || ev.t_end < ep.t_begin) continue;
        if (geo::point_in_polygon(p, ev.footprint)) out.push_back(ev.event_id);
    }
    std::sort(out.begin(), out.end());
    return out;
}

SemanticTrajectory build_semantic_trajectory(const traj::RawTrajectory& traj,
                                             const std::vector<PointOfInterest>& pois,
                                             const std::vector<EventOfInterest>& events,
                                             const traj::SegmentationParams& params,
                                             const GoalRules& goal_rules,
                                             const TransportRules& transport) {
    SemanticTrajectory st;
    st.traj_id = traj.traj_id;
    st.object_id = traj.object_id;

    const auto seg = traj::segment_episodes(traj, params);
    for (const auto& ep : seg.episodes) {
        SemanticSegment s;
        s.episode = ep;
        s.begin = traj.points[ep.start_index];
        s.end = traj.points[ep.end_index];
        s.begin_poi = poi_at_point(s.begin.point, pois, nullptr);
        s.end_poi = poi_at_point(s.end.point, pois, nullptr);
        s.matched_poi = match_poi(traj, ep, pois);
        s.matched_events = match_events(traj, ep, events);
        s.stats = traj::episode_stats(traj, ep);

        std::string category;
        if (s.matched_poi) {
            const auto* poi = find_poi(pois, *s.matched_poi);
            s.annotation.geo_object_property = poi->semantic_purpose;
            category = poi->object_category;
        }
        std::string event_item;
        if (!s.matched_events.empty()) {
            s.annotation.event_ref = s.matched_events.front();
            event_item = find_event(events, s.matched_events.front())->event_item_name;
        }
        auto it = goal_rules.find({category, event_item});
        s.annotation.trajectory_goal = it != goal_rules.end() ? it->second : "unspecified";
        s.goal = s.annotation.trajectory_goal;

        if (ep.kind == traj::EpisodeKind::Stop) {
            s.transport_mode = "none";
        } else if (transport.forced_type) {
            s.transport_mode = *transport.forced_type;
        } else if (s.stats.avg_speed_mps < transport.walking_below_mps) {
            s.transport_mode = transport.walking_label;
        } else if (s.stats.avg_speed_mps < transport.biking_below_mps) {
            s.transport_mode = transport.biking_label;
        } else {
            s.transport_mode = transport.driving_label;
        }
        st.segments.push_back(std::move(s));
    }
    return st;
}

AttachReport attach_social_posts(SemanticTrajectory& st, const std::vector<SocialPost>& posts) {
    AttachReport rep;
    for (const auto& post : posts) {
        if (post.object_id != st.object_id) {
            ++rep.foreign_object;
            continue;
        }
        bool placed = false;
        for (auto& seg : st.segments) {
            // first matching segment wins; shared boundary instants go to the earlier one
            if (post.t >= seg.begin.t && post.t <= seg.end.t) {
                seg.posts.push_back(post);
                placed = true;
                break;
            }
        }
        if (placed)
            ++rep.attached;
        else
            ++rep.orphans;
    }
    return rep;
}

GoalRules parse_goal_rules(const std::string& file_contents) {
    GoalRules rules;
    std::istringstream in(file_contents);
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        const auto c1 = line.find(',');
        const auto c2 = line.find(',', c1 == std::string::npos ? c1 : c1 + 1);
        if (c1 == std::string::npos || c2 == std::string::npos)
            throw std::runtime_error("goal rule needs 'category,event,goal': " + line);
        rules[{line.substr(0, c1), line.substr(c1 + 1, c2 - c1 - 1)}] = line.substr(c2 + 1);
    }
    return rules;
}

}  // namespace trajdw::enrich
