#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace trajdw::geo {

inline constexpr double kEarthRadiusM = 6371000.0;

struct InvalidCoordinate : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct MalformedWkt : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct OpenRing : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct TooFewVertices : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// WGS84 position, degrees. Construction validates ranges.
struct GeoPoint {
    double lat = 0.0;
    double lon = 0.0;

    GeoPoint() = default;
    GeoPoint(double lat_deg, double lon_deg);

    bool operator==(const GeoPoint&) const = default;
};

struct BoundingBox {
    double min_lat = 0.0;
    double max_lat = 0.0;
    double min_lon = 0.0;
    double max_lon = 0.0;

    bool contains(const GeoPoint& p) const {
        return p.lat >= min_lat && p.lat <= max_lat && p.lon >= min_lon && p.lon <= max_lon;
    }
    static BoundingBox of_points(const std::vector<GeoPoint>& pts);
};

/// Single closed exterior ring, SRID 4326, no holes.
struct Polygon {
    std::vector<GeoPoint> exterior;  // first vertex == last

    explicit Polygon(std::vector<GeoPoint> ring);
    Polygon() = default;

    BoundingBox bbox() const { return BoundingBox::of_points(exterior); }
};

double haversine_distance(const GeoPoint& a, const GeoPoint& b);

/// Boundary-inclusive ray casting.
bool point_in_polygon(const GeoPoint& p, const Polygon& poly);

/// Accepts `POLYGON((lon lat, lon lat, ...))`, lon-first coordinate order.
Polygon parse_wkt_polygon(const std::string& text);
std::string to_wkt(const Polygon& poly);

/// `POINT(lon lat)`
GeoPoint parse_wkt_point(const std::string& text);
std::string to_wkt(const GeoPoint& p);

/// Equirectangular approximation of the box area in square meters.
double bbox_area(const BoundingBox& box);

/// Shortest round-trip decimal representation, used everywhere numbers are persisted.
std::string format_double(double v);

}  // namespace trajdw::geo
