#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <span>

#include "quakesim/geo.hpp"

namespace quakesim::integrate {

using geo::Vec2;

namespace detail {

// Degree-5 seven-point triangle rule (barycentric coordinates, weights sum to 1).
struct TriNode {
  double a, b, c, w;
};
inline constexpr std::array<TriNode, 7> kTriRule{{
    {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0, 0.225},
    {0.059715871789770, 0.470142064105115, 0.470142064105115, 0.132394152788506},
    {0.470142064105115, 0.059715871789770, 0.470142064105115, 0.132394152788506},
    {0.470142064105115, 0.470142064105115, 0.059715871789770, 0.132394152788506},
    {0.797426985353087, 0.101286507323456, 0.101286507323456, 0.125939180544827},
    {0.101286507323456, 0.797426985353087, 0.101286507323456, 0.125939180544827},
    {0.101286507323456, 0.101286507323456, 0.797426985353087, 0.125939180544827},
}};

template <typename F>
double tri_rule(const F& f, Vec2 p, Vec2 q, Vec2 r) {
  const double area = 0.5 * geo::cross(q - p, r - p);
  double s = 0.0;
  for (const auto& n : kTriRule) {
    s += n.w * f(Vec2{n.a * p.x + n.b * q.x + n.c * r.x, n.a * p.y + n.b * q.y + n.c * r.y});
  }
  return s * area;
}

template <typename F>
double tri_adaptive(const F& f, Vec2 p, Vec2 q, Vec2 r, double whole, double tol, int depth) {
  const Vec2 pq = 0.5 * (p + q);
  const Vec2 qr = 0.5 * (q + r);
  const Vec2 rp = 0.5 * (r + p);
  const double c1 = tri_rule(f, p, pq, rp);
  const double c2 = tri_rule(f, pq, q, qr);
  const double c3 = tri_rule(f, rp, qr, r);
  const double c4 = tri_rule(f, pq, qr, rp);
  const double split = c1 + c2 + c3 + c4;
  if (depth <= 0 || std::abs(split - whole) <= tol) return split;
  const double t = 0.25 * tol;
  return tri_adaptive(f, p, pq, rp, c1, t, depth - 1) + tri_adaptive(f, pq, q, qr, c2, t, depth - 1) +
         tri_adaptive(f, rp, qr, r, c3, t, depth - 1) + tri_adaptive(f, pq, qr, rp, c4, t, depth - 1);
}

}  // namespace detail

/// ∫_P f over a polygon (exterior minus holes) by signed fan
/// triangulation and adaptive degree-5 cubature. `rel_tol` is relative to
/// a coarse first estimate of ∫|f|.
template <typename F>
double over_polygon(const F& f, const geo::Polygon& poly, double rel_tol = 1e-6, int max_depth = 8) {
  if (poly.empty()) return 0.0;
  // Coarse magnitude estimate for the absolute tolerance.
  auto coarse = [&](const geo::Ring& ring) {
    const std::size_t n = ring.size();
    if (n < 3) return 0.0;
    const Vec2 o = geo::to_vec(ring[0]);
    double s = 0.0;
    for (std::size_t i = 1; i + 1 < n; ++i) {
      s += std::abs(detail::tri_rule([&](Vec2 x) { return std::abs(f(x)); }, o, geo::to_vec(ring[i]),
                                     geo::to_vec(ring[i + 1])));
    }
    return s;
  };
  double scale = coarse(poly.exterior);
  if (scale == 0.0) scale = 1e-300;
  const double tol = rel_tol * scale;
  auto ring_value = [&](const geo::Ring& ring) {
    // Orientation-free: integrate with the ring's own orientation then take
    // the sign that makes the enclosed area positive.
    const std::size_t n = ring.size();
    if (n < 3) return 0.0;
    const Vec2 o = geo::to_vec(ring[0]);
    double area_abs = 0.0;
    for (std::size_t i = 1; i + 1 < n; ++i) {
      area_abs += std::abs(0.5 * geo::cross(geo::to_vec(ring[i]) - o, geo::to_vec(ring[i + 1]) - o));
    }
    if (area_abs == 0.0) return 0.0;
    double s = 0.0;
    for (std::size_t i = 1; i + 1 < n; ++i) {
      const Vec2 q = geo::to_vec(ring[i]);
      const Vec2 r = geo::to_vec(ring[i + 1]);
      const double a = std::abs(0.5 * geo::cross(q - o, r - o));
      if (a == 0.0) continue;
      const double whole = detail::tri_rule(f, o, q, r);
      s += detail::tri_adaptive(f, o, q, r, whole, tol * a / area_abs, max_depth);
    }
    return geo::signed_area(ring) >= 0.0 ? s : -s;
  };
  double total = ring_value(poly.exterior);
  for (const auto& h : poly.holes) total -= ring_value(h);
  return total;
}

/// Midpoint rule on a regular grid over the polygon's bounding box with
/// cell-centre masking, doubled from 16x16 until successive estimates
/// agree to `rel_tol` (cap 1024x1024).
template <typename F>
double midpoint_grid(const F& f, const geo::Polygon& poly, double rel_tol = 1e-4, int max_cells = 1024) {
  const auto bb = poly.bbox();
  auto eval = [&](int m) {
    const double dx = bb.width() / m;
    const double dy = bb.height() / m;
    KahanSum s;
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < m; ++j) {
        const geo::GeoPoint c{bb.lon_min + (i + 0.5) * dx, bb.lat_min + (j + 0.5) * dy};
        if (poly.contains(c)) s.add(f(Vec2{c.lon, c.lat}));
      }
    }
    return s.value() * dx * dy;
  };
  double prev = eval(16);
  for (int m = 32; m <= max_cells; m *= 2) {
    const double cur = eval(m);
    if (std::abs(cur - prev) <= rel_tol * std::abs(cur)) return cur;
    prev = cur;
  }
  return prev;
}

}  // namespace quakesim::integrate
