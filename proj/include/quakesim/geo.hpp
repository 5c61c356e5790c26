#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "quakesim/core.hpp"

namespace quakesim::geo {

struct GeoPoint {
  double lon = 0.0;
  double lat = 0.0;

  friend bool operator==(const GeoPoint&, const GeoPoint&) = default;
};

inline bool is_valid(const GeoPoint& p) {
  return std::isfinite(p.lon) && std::isfinite(p.lat) && p.lon >= -180.0 &&
         p.lon <= 180.0 && p.lat >= -90.0 && p.lat <= 90.0;
}

inline void validate(const GeoPoint& p) {
  require(is_valid(p), ErrorCode::InvalidArgument,
          "point outside lon/lat bounds",
          std::to_string(p.lon) + "," + std::to_string(p.lat));
}

/// Planar 2D vector; used both for lon/lat degrees and projected km.
struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }

inline Vec2 to_vec(const GeoPoint& p) { return {p.lon, p.lat}; }
inline GeoPoint to_point(Vec2 v) { return {v.x, v.y}; }

/// Open ring: the closing vertex is implicit.
using Ring = std::vector<GeoPoint>;

inline Ring normalize_ring(Ring ring) {
  if (ring.size() >= 2 && ring.front() == ring.back()) ring.pop_back();
  return ring;
}

/// Signed shoelace area (positive for counter-clockwise rings).
inline double signed_area(std::span<const GeoPoint> ring) {
  const std::size_t n = ring.size();
  if (n < 3) return 0.0;
  // Shift to the first vertex to limit cancellation.
  const Vec2 o = to_vec(ring[0]);
  double s = 0.0;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    s += cross(to_vec(ring[i]) - o, to_vec(ring[i + 1]) - o);
  }
  return 0.5 * s;
}

inline double signed_area(std::span<const Vec2> ring) {
  const std::size_t n = ring.size();
  if (n < 3) return 0.0;
  const Vec2 o = ring[0];
  double s = 0.0;
  for (std::size_t i = 1; i + 1 < n; ++i) s += cross(ring[i] - o, ring[i + 1] - o);
  return 0.5 * s;
}

/// Even-odd ray casting. Boundary points may land on either side.
inline bool ring_contains(std::span<const GeoPoint> ring, const GeoPoint& p) {
  bool inside = false;
  const std::size_t n = ring.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const auto& a = ring[i];
    const auto& b = ring[j];
    if ((a.lat > p.lat) != (b.lat > p.lat)) {
      const double x = (b.lon - a.lon) * (p.lat - a.lat) / (b.lat - a.lat) + a.lon;
      if (p.lon < x) inside = !inside;
    }
  }
  return inside;
}

struct BBox {
  double lon_min = 0.0;
  double lon_max = 0.0;
  double lat_min = 0.0;
  double lat_max = 0.0;

  double width() const { return lon_max - lon_min; }
  double height() const { return lat_max - lat_min; }
  double area() const { return width() * height(); }
  double diagonal() const { return std::hypot(width(), height()); }
  bool contains(const GeoPoint& p) const {
    return p.lon >= lon_min && p.lon <= lon_max && p.lat >= lat_min && p.lat <= lat_max;
  }
};

inline BBox bbox_of(std::span<const GeoPoint> pts) {
  BBox b{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity(),
         std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
  for (const auto& p : pts) {
    b.lon_min = std::min(b.lon_min, p.lon);
    b.lon_max = std::max(b.lon_max, p.lon);
    b.lat_min = std::min(b.lat_min, p.lat);
    b.lat_max = std::max(b.lat_max, p.lat);
  }
  return b;
}

/// Polygon with optional holes. Area is planar in whatever units the
/// vertices carry (squared degrees for lon/lat).
struct Polygon {
  Ring exterior;
  std::vector<Ring> holes;

  Polygon() = default;
  explicit Polygon(Ring ext, std::vector<Ring> hs = {})
      : exterior(normalize_ring(std::move(ext))) {
    for (auto& h : hs) holes.push_back(normalize_ring(std::move(h)));
  }

  static Polygon rectangle(double lon_min, double lat_min, double lon_max, double lat_max) {
    return Polygon(Ring{{lon_min, lat_min}, {lon_max, lat_min}, {lon_max, lat_max}, {lon_min, lat_max}});
  }

  double area() const {
    double a = std::abs(signed_area(exterior));
    for (const auto& h : holes) a -= std::abs(signed_area(h));
    return a;
  }

  bool contains(const GeoPoint& p) const {
    if (exterior.size() < 3 || !ring_contains(exterior, p)) return false;
    for (const auto& h : holes) {
      if (h.size() >= 3 && ring_contains(h, p)) return false;
    }
    return true;
  }

  BBox bbox() const { return bbox_of(exterior); }
  bool empty() const { return exterior.size() < 3; }
};

struct SpatialWindow {
  Polygon boundary;
  BBox bbox;

  SpatialWindow() = default;
  explicit SpatialWindow(Polygon poly) : boundary(std::move(poly)), bbox(boundary.bbox()) {
    require(boundary.area() > 0.0, ErrorCode::ZeroAreaRegion, "window has no area");
  }

  static SpatialWindow rectangle(double lon_min, double lat_min, double lon_max, double lat_max) {
    return SpatialWindow(Polygon::rectangle(lon_min, lat_min, lon_max, lat_max));
  }

  double area() const { return boundary.area(); }
  bool contains(const GeoPoint& p) const { return boundary.contains(p); }
};

// ---------------------------------------------------------------------------
// Spherical helpers (radius 6371 km)

inline double deg2rad(double d) { return d * kPi / 180.0; }
inline double rad2deg(double r) { return r * 180.0 / kPi; }

inline double haversine_km(const GeoPoint& a, const GeoPoint& b) {
  const double p1 = deg2rad(a.lat);
  const double p2 = deg2rad(b.lat);
  const double dp = p2 - p1;
  const double dl = deg2rad(b.lon - a.lon);
  const double h = std::sin(dp / 2) * std::sin(dp / 2) +
                   std::cos(p1) * std::cos(p2) * std::sin(dl / 2) * std::sin(dl / 2);
  return 2.0 * kEarthRadiusKm * std::asin(std::min(1.0, std::sqrt(h)));
}

/// Great-circle destination from `origin` along `bearing_deg` (clockwise
/// from north) after `distance_km`.
inline GeoPoint destination(const GeoPoint& origin, double bearing_deg, double distance_km) {
  const double d = distance_km / kEarthRadiusKm;
  const double th = deg2rad(bearing_deg);
  const double p1 = deg2rad(origin.lat);
  const double l1 = deg2rad(origin.lon);
  const double p2 = std::asin(std::sin(p1) * std::cos(d) + std::cos(p1) * std::sin(d) * std::cos(th));
  const double l2 = l1 + std::atan2(std::sin(th) * std::sin(d) * std::cos(p1),
                                    std::cos(d) - std::sin(p1) * std::sin(p2));
  double lon = rad2deg(l2);
  lon = std::fmod(lon + 540.0, 360.0) - 180.0;
  return {lon, rad2deg(p2)};
}

inline Polygon circle_polygon(const GeoPoint& center, double radius_km, int n_vertices) {
  require(radius_km > 0.0 && std::isfinite(radius_km), ErrorCode::InvalidRadius,
          "radius must be positive", std::to_string(radius_km));
  require(n_vertices >= 3, ErrorCode::InvalidArgument, "need at least 3 vertices");
  Ring ring;
  ring.reserve(static_cast<std::size_t>(n_vertices));
  // Counter-clockwise in lon/lat: bearings decreasing from north.
  for (int i = 0; i < n_vertices; ++i) {
    const double bearing = 360.0 - 360.0 * static_cast<double>(i) / n_vertices;
    ring.push_back(destination(center, bearing, radius_km));
  }
  return Polygon(std::move(ring));
}

/// Lambert azimuthal equal-area projection on the sphere, centered at a
/// point. Output in km; a geodesic circle of radius r maps to a circle of
/// radius 2R sin(r / 2R).
class AzimuthalEqualArea {
 public:
  explicit AzimuthalEqualArea(const GeoPoint& center)
      : lon0_(deg2rad(center.lon)),
        sin0_(std::sin(deg2rad(center.lat))),
        cos0_(std::cos(deg2rad(center.lat))) {}

  Vec2 operator()(const GeoPoint& p) const {
    const double phi = deg2rad(p.lat);
    const double dl = deg2rad(p.lon) - lon0_;
    const double sp = std::sin(phi);
    const double cp = std::cos(phi);
    const double cdl = std::cos(dl);
    const double denom = 1.0 + sin0_ * sp + cos0_ * cp * cdl;
    const double k = denom > 1e-15 ? std::sqrt(2.0 / denom) : 0.0;
    return {kEarthRadiusKm * k * cp * std::sin(dl),
            kEarthRadiusKm * k * (cos0_ * sp - sin0_ * cp * cdl)};
  }

  static double projected_radius(double geodesic_km) {
    return 2.0 * kEarthRadiusKm * std::sin(geodesic_km / (2.0 * kEarthRadiusKm));
  }

 private:
  double lon0_;
  double sin0_;
  double cos0_;
};

namespace detail {

/// Signed area of triangle (origin, a, b) intersected with the disk of
/// radius r at the origin.
inline double triangle_disk_area(Vec2 a, Vec2 b, double r) {
  const Vec2 d = b - a;
  const double qa = dot(d, d);
  if (qa == 0.0) return 0.0;
  const double qb = 2.0 * dot(a, d);
  const double qc = dot(a, a) - r * r;
  std::array<double, 4> ts{0.0, 0.0, 0.0, 1.0};
  std::size_t nt = 1;
  const double disc = qb * qb - 4.0 * qa * qc;
  if (disc > 0.0) {
    const double sq = std::sqrt(disc);
    const double t1 = (-qb - sq) / (2.0 * qa);
    const double t2 = (-qb + sq) / (2.0 * qa);
    if (t1 > 0.0 && t1 < 1.0) ts[nt++] = t1;
    if (t2 > 0.0 && t2 < 1.0) ts[nt++] = t2;
  }
  ts[nt++] = 1.0;
  double area = 0.0;
  for (std::size_t i = 0; i + 1 < nt; ++i) {
    const Vec2 p = a + ts[i] * d;
    const Vec2 q = a + ts[i + 1] * d;
    const Vec2 mid = a + (0.5 * (ts[i] + ts[i + 1])) * d;
    if (dot(mid, mid) <= r * r) {
      area += 0.5 * cross(p, q);
    } else {
      area += 0.5 * r * r * std::atan2(cross(p, q), dot(p, q));
    }
  }
  return area;
}

}  // namespace detail

/// Exact area of (ring ∩ disk(origin, r)) for a planar ring, unsigned.
inline double ring_disk_area(std::span<const Vec2> ring, double r) {
  if (r <= 0.0 || ring.size() < 3) return 0.0;
  double s = 0.0;
  for (std::size_t i = 0; i < ring.size(); ++i) {
    s += detail::triangle_disk_area(ring[i], ring[(i + 1) % ring.size()], r);
  }
  return std::abs(s);
}

/// Fraction of `region` lying in the annulus inner_km < d <= outer_km around
/// `center`, measured on an azimuthal equal-area projection at the center.
inline double band_area_fraction(const Polygon& region, const GeoPoint& center,
                                 double outer_km, double inner_km) {
  require(outer_km > inner_km && inner_km >= 0.0, ErrorCode::InvalidArgument,
          "annulus requires outer > inner >= 0");
  const AzimuthalEqualArea proj(center);
  auto project = [&](const Ring& r) {
    std::vector<Vec2> out;
    out.reserve(r.size());
    for (const auto& p : r) out.push_back(proj(p));
    return out;
  };
  const double ro = AzimuthalEqualArea::projected_radius(outer_km);
  const double ri = AzimuthalEqualArea::projected_radius(inner_km);

  const auto ext = project(region.exterior);
  double total = std::abs(signed_area(ext));
  double in_band = ring_disk_area(ext, ro) - ring_disk_area(ext, ri);
  for (const auto& h : region.holes) {
    const auto hp = project(h);
    total -= std::abs(signed_area(hp));
    in_band -= ring_disk_area(hp, ro) - ring_disk_area(hp, ri);
  }
  require(total > 1e-12, ErrorCode::ZeroAreaRegion, "region has no area");
  return std::clamp(in_band / total, 0.0, 1.0);
}

// ---------------------------------------------------------------------------
// Voronoi tessellation

/// Keeps the part of `ring` satisfying n·p <= c (Sutherland-Hodgman against
/// a single half-plane; valid for non-convex input rings).
inline Ring clip_halfplane(const Ring& ring, Vec2 n, double c) {
  Ring out;
  const std::size_t m = ring.size();
  if (m == 0) return out;
  out.reserve(m + 2);
  for (std::size_t i = 0; i < m; ++i) {
    const Vec2 p = to_vec(ring[i]);
    const Vec2 q = to_vec(ring[(i + 1) % m]);
    const double fp = dot(n, p) - c;
    const double fq = dot(n, q) - c;
    if (fp <= 0.0) out.push_back(ring[i]);
    if ((fp < 0.0 && fq > 0.0) || (fp > 0.0 && fq < 0.0)) {
      const double t = fp / (fp - fq);
      out.push_back(to_point(p + t * (q - p)));
    }
  }
  if (out.size() < 3) out.clear();
  return out;
}

struct VoronoiDiagram {
  std::vector<GeoPoint> generators;
  std::vector<Polygon> cells;
  SpatialWindow window;

  std::size_t size() const { return generators.size(); }
};

/// Voronoi cells in planar lon/lat coordinates, clipped to the window.
inline VoronoiDiagram voronoi_tessellate(std::span<const GeoPoint> points,
                                         const SpatialWindow& window) {
  require(!points.empty(), ErrorCode::InvalidArgument, "need at least one generator");
  const std::size_t n = points.size();
  for (std::size_t i = 0; i < n; ++i) {
    validate(points[i]);
    require(window.contains(points[i]), ErrorCode::OutOfWindow,
            "generator outside window", std::to_string(i));
  }
  {
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return std::pair(points[a].lon, points[a].lat) < std::pair(points[b].lon, points[b].lat);
    });
    for (std::size_t k = 1; k < n; ++k) {
      require(!(points[order[k]] == points[order[k - 1]]), ErrorCode::DuplicateGenerator,
              "duplicate generator",
              std::to_string(order[k - 1]) + "," + std::to_string(order[k]));
    }
  }

  VoronoiDiagram vd;
  vd.generators.assign(points.begin(), points.end());
  vd.window = window;
  vd.cells.resize(n);

  std::vector<std::pair<double, std::size_t>> by_dist;
  by_dist.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 g = to_vec(points[i]);
    by_dist.clear();
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i) by_dist.emplace_back(norm(to_vec(points[j]) - g), j);
    }
    std::sort(by_dist.begin(), by_dist.end());

    Ring ext = window.boundary.exterior;
    std::vector<Ring> holes = window.boundary.holes;
    auto reach = [&] {
      double r = 0.0;
      for (const auto& v : ext) r = std::max(r, norm(to_vec(v) - g));
      return r;
    };
    double r = reach();
    for (const auto& [dist, j] : by_dist) {
      if (dist > 2.0 * r) break;
      const Vec2 h = to_vec(points[j]);
      const Vec2 nrm = h - g;
      const double c = 0.5 * (dot(h, h) - dot(g, g));
      ext = clip_halfplane(ext, nrm, c);
      for (auto& hole : holes) hole = clip_halfplane(hole, nrm, c);
      r = reach();
    }
    std::erase_if(holes, [](const Ring& h) { return h.size() < 3; });
    Polygon cell;
    cell.exterior = std::move(ext);
    cell.holes = std::move(holes);
    vd.cells[i] = std::move(cell);
  }
  return vd;
}

}  // namespace quakesim::geo
