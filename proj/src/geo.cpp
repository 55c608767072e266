#include "trajdw/geo.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace trajdw::geo {

namespace {

constexpr double kPi = 3.14159265358979323846;

double deg2rad(double deg) { return deg * kPi / 180.0; }

}  // namespace

GeoPoint::GeoPoint(double lat_deg, double lon_deg) : lat(lat_deg), lon(lon_deg) {
    if (!std::isfinite(lat) || lat < -90.0 || lat > 90.0)
        throw InvalidCoordinate("latitude out of range: " + std::to_string(lat_deg));
    if (!std::isfinite(lon) || lon < -180.0 || lon > 180.0)
        throw InvalidCoordinate("longitude out of range: " + std::to_string(lon_deg));
}

BoundingBox BoundingBox::of_points(const std::vector<GeoPoint>& pts) {
    BoundingBox b;
    if (pts.empty()) return b;
    b.min_lat = b.max_lat = pts.front().lat;
    b.min_lon = b.max_lon = pts.front().lon;
    for (const auto& p : pts) {
        b.min_lat = std::min(b.min_lat, p.lat);
        b.max_lat = std::max(b.max_lat, p.lat);
        b.min_lon = std::min(b.min_lon, p.lon);
        b.max_lon = std::max(b.max_lon, p.lon);
    }
    return b;
}

Polygon::Polygon(std::vector<GeoPoint> ring) : exterior(std::move(ring)) {
    if (exterior.size() < 4) throw TooFewVertices("polygon ring needs at least 4 vertices");
    if (!(exterior.front() == exterior.back())) throw OpenRing("polygon ring is not closed");
    // distinct vertices, ignoring the closing duplicate
    std::vector<GeoPoint> uniq(exterior.begin(), exterior.end() - 1);
    std::sort(uniq.begin(), uniq.end(), [](const GeoPoint& a, const GeoPoint& b) {
        return a.lat != b.lat ? a.lat < b.lat : a.lon < b.lon;
    });
    uniq.erase(std::unique(uniq.begin(), uniq.end()), uniq.end());
    if (uniq.size() < 3) throw TooFewVertices("polygon ring needs at least 3 distinct vertices");
}

double haversine_distance(const GeoPoint& a, const GeoPoint& b) {
    if (a == b) return 0.0;
    const double lat1 = deg2rad(a.lat);
    const double lat2 = deg2rad(b.lat);
    const double dlat = deg2rad(b.lat - a.lat);
    const double dlon = deg2rad(b.lon - a.lon);
    const double sl = std::sin(dlat / 2.0);
    const double so = std::sin(dlon / 2.0);
    double h = sl * sl + std::cos(lat1) * std::cos(lat2) * so * so;
    h = std::clamp(h, 0.0, 1.0);
    return 2.0 * kEarthRadiusM * std::atan2(std::sqrt(h), std::sqrt(1.0 - h));
}

namespace {

// distance from p to segment ab in degree space, for the boundary test
bool on_segment(const GeoPoint& p, const GeoPoint& a, const GeoPoint& b) {
    const double cross = (b.lon - a.lon) * (p.lat - a.lat) - (b.lat - a.lat) * (p.lon - a.lon);
    if (std::fabs(cross) > 1e-12) return false;
    const double dot = (p.lon - a.lon) * (b.lon - a.lon) + (p.lat - a.lat) * (b.lat - a.lat);
    if (dot < 0.0) return false;
    const double len2 = (b.lon - a.lon) * (b.lon - a.lon) + (b.lat - a.lat) * (b.lat - a.lat);
    return dot <= len2;
}

}  // namespace

bool point_in_polygon(const GeoPoint& p, const Polygon& poly) {
    const auto& ring = poly.exterior;
    const std::size_t n = ring.size() - 1;  // skip closing duplicate
    for (std::size_t i = 0; i < n; ++i) {
        if (on_segment(p, ring[i], ring[i + 1])) return true;
    }
    bool inside = false;
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
        const auto& vi = ring[i];
        const auto& vj = ring[j];
        if ((vi.lat > p.lat) != (vj.lat > p.lat) &&
            p.lon < (vj.lon - vi.lon) * (p.lat - vi.lat) / (vj.lat - vi.lat) + vi.lon) {
            inside = !inside;
        }
    }
    return inside;
}

namespace {

void skip_ws(const std::string& s, std::size_t& i) {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
}

double parse_number(const std::string& s, std::size_t& i) {
    skip_ws(s, i);
    std::size_t start = i;
    while (i < s.size() && (std::isdigit(static_cast<unsigned char>(s[i])) || s[i] == '-' ||
                            s[i] == '+' || s[i] == '.' || s[i] == 'e' || s[i] == 'E')) {
        ++i;
    }
    double value = 0.0;
    auto res = std::from_chars(s.data() + start, s.data() + i, value);
    if (res.ec != std::errc() || res.ptr != s.data() + i || start == i)
        throw MalformedWkt("non-numeric coordinate near offset " + std::to_string(start));
    return value;
}

}  // namespace

Polygon parse_wkt_polygon(const std::string& text) {
    std::size_t i = 0;
    skip_ws(text, i);
    const std::string kw = "POLYGON";
    if (text.compare(i, kw.size(), kw) != 0) throw MalformedWkt("expected POLYGON keyword");
    i += kw.size();
    skip_ws(text, i);
    if (i >= text.size() || text[i] != '(') throw MalformedWkt("expected '(('");
    ++i;
    skip_ws(text, i);
    if (i >= text.size() || text[i] != '(') throw MalformedWkt("expected '(('");
    ++i;

    std::vector<GeoPoint> ring;
    while (true) {
        const double lon = parse_number(text, i);
        const double lat = parse_number(text, i);
        try {
            ring.emplace_back(lat, lon);
        } catch (const InvalidCoordinate& e) {
            throw MalformedWkt(e.what());
        }
        skip_ws(text, i);
        if (i < text.size() && text[i] == ',') {
            ++i;
            continue;
        }
        break;
    }
    if (i >= text.size() || text[i] != ')') throw MalformedWkt("unbalanced parentheses");
    ++i;
    skip_ws(text, i);
    if (i >= text.size() || text[i] != ')') {
        if (i < text.size() && text[i] == ',')
            throw MalformedWkt("multiple rings are not supported");
        throw MalformedWkt("unbalanced parentheses");
    }
    ++i;
    skip_ws(text, i);
    if (i != text.size()) throw MalformedWkt("trailing characters after polygon");

    if (ring.size() < 4) {
        if (ring.size() >= 2 && !(ring.front() == ring.back()))
            throw OpenRing("polygon ring is not closed");
        throw TooFewVertices("polygon ring needs at least 4 vertices");
    }
    if (!(ring.front() == ring.back())) throw OpenRing("polygon ring is not closed");
    return Polygon(std::move(ring));
}

std::string format_double(double v) {
    if (v == 0.0) v = 0.0;  // normalize -0
    char buf[40];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::string to_wkt(const Polygon& poly) {
    std::string out = "POLYGON((";
    for (std::size_t i = 0; i < poly.exterior.size(); ++i) {
        if (i) out += ", ";
        out += format_double(poly.exterior[i].lon);
        out += ' ';
        out += format_double(poly.exterior[i].lat);
    }
    out += "))";
    return out;
}

GeoPoint parse_wkt_point(const std::string& text) {
    std::size_t i = 0;
    skip_ws(text, i);
    const std::string kw = "POINT";
    if (text.compare(i, kw.size(), kw) != 0) throw MalformedWkt("expected POINT keyword");
    i += kw.size();
    skip_ws(text, i);
    if (i >= text.size() || text[i] != '(') throw MalformedWkt("expected '('");
    ++i;
    const double lon = parse_number(text, i);
    const double lat = parse_number(text, i);
    skip_ws(text, i);
    if (i >= text.size() || text[i] != ')') throw MalformedWkt("unbalanced parentheses");
    try {
        return GeoPoint(lat, lon);
    } catch (const InvalidCoordinate& e) {
        throw MalformedWkt(e.what());
    }
}

std::string to_wkt(const GeoPoint& p) {
    return "POINT(" + format_double(p.lon) + " " + format_double(p.lat) + ")";
}

double bbox_area(const BoundingBox& box) {
    const double meters_per_deg = kPi * kEarthRadiusM / 180.0;
    const double mid_lat = (box.min_lat + box.max_lat) / 2.0;
    const double h = (box.max_lat - box.min_lat) * meters_per_deg;
    const double w = (box.max_lon - box.min_lon) * meters_per_deg * std::cos(deg2rad(mid_lat));
    return h * w;
}

}  // namespace trajdw::geo
