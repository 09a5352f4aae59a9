#pragma once

// Closed polygonal curves in R^2 / R^3: arc lengths, intrinsic distances,
// distortion, total curvature, sphere inversion and the canonical test curves.

#include "oharaknot/core.hpp"

#include <Eigen/Geometry>

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

namespace oknot {

/// Closed polygon x_0, ..., x_{N-1} with implicit closing edge x_{N-1} -> x_0.
/// Planar curves keep z = 0 and remember dim() == 2 for output.
class PolyCurve {
 public:
  PolyCurve(std::vector<Vec3> vertices, int dim) : vertices_(std::move(vertices)), dim_(dim) {
    validate();
  }

  std::size_t size() const { return vertices_.size(); }
  int dim() const { return dim_; }
  const std::vector<Vec3>& vertices() const { return vertices_; }

  /// Cyclic access, any integer index.
  const Vec3& operator[](long i) const {
    const long n = static_cast<long>(vertices_.size());
    return vertices_[static_cast<std::size_t>(((i % n) + n) % n)];
  }

  double edge_length(std::size_t j) const { return ((*this)[long(j) + 1] - (*this)[long(j)]).norm(); }

 private:
  void validate() const {
    if (dim_ != 2 && dim_ != 3) throw Error(ErrorKind::InvalidCurve, "curve dimension must be 2 or 3");
    const std::size_t n = vertices_.size();
    if (n < 3) throw Error(ErrorKind::InvalidCurve, "closed curve needs at least 3 vertices");
    for (const auto& v : vertices_) {
      if (!v.allFinite()) throw Error(ErrorKind::InvalidCurve, "non-finite vertex coordinate");
      if (dim_ == 2 && v.z() != 0.0) throw Error(ErrorKind::InvalidCurve, "planar curve with z != 0");
    }
    for (std::size_t j = 0; j < n; ++j) {
      if (!(edge_length(j) > 0.0))
        throw Error(ErrorKind::InvalidCurve, "degenerate edge at vertex " + std::to_string(j));
    }
    // Non-adjacent coincident vertices make the curve non-injective.
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    auto key = [&](std::size_t i) {
      const auto& v = vertices_[i];
      return std::array<double, 3>{v.x(), v.y(), v.z()};
    };
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return key(a) < key(b); });
    for (std::size_t i = 1; i < n; ++i) {
      if (key(order[i]) == key(order[i - 1]))
        throw Error(ErrorKind::SelfIntersection,
                    "vertices " + std::to_string(order[i - 1]) + " and " + std::to_string(order[i]) +
                        " coincide");
    }
  }

  std::vector<Vec3> vertices_;
  int dim_;
};

/// Cumulative arc lengths s_j (s_0 = 0, s_N = L) and mid-point weights
/// Delta_j = (|x_{j+1} - x_j| + |x_j - x_{j-1}|) / 2.
struct ArcTable {
  std::vector<double> cumulative;
  std::vector<double> weights;
  double length = 0.0;

  std::size_t size() const { return weights.size(); }
};

inline ArcTable build_arc_table(const PolyCurve& curve) {
  const std::size_t n = curve.size();
  ArcTable arc;
  arc.cumulative.resize(n + 1);
  arc.weights.resize(n);
  std::vector<double> edges(n);
  CompensatedSum running;
  arc.cumulative[0] = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    edges[j] = curve.edge_length(j);
    if (!(edges[j] > 0.0)) throw Error(ErrorKind::InvalidCurve, "degenerate edge");
    running.add(edges[j]);
    arc.cumulative[j + 1] = running.value();
  }
  arc.length = arc.cumulative[n];
  for (std::size_t j = 0; j < n; ++j) {
    arc.weights[j] = 0.5 * (edges[j] + edges[(j + n - 1) % n]);
  }
  return arc;
}

/// Shorter of the two arcs joining vertices j and k.
inline double intrinsic_dist(const ArcTable& arc, std::size_t j, std::size_t k) {
  if (j == k) return 0.0;
  const double fwd = j < k ? arc.cumulative[k] - arc.cumulative[j]
                           : arc.length - (arc.cumulative[j] - arc.cumulative[k]);
  return std::min(fwd, arc.length - fwd);
}

/// Discrete Gromov distortion max_{j != k} d_{j,k} / |x_j - x_k|.
inline double distortion(const PolyCurve& curve, const ExecPolicy& exec = {}) {
  const ArcTable arc = build_arc_table(curve);
  const std::size_t n = curve.size();
  const auto row_max = map_rows(n, exec, [&](std::size_t j) {
    double best = 0.0;
    const Vec3& xj = curve.vertices()[j];
    for (std::size_t k = j + 1; k < n; ++k) {
      const double chord = (xj - curve.vertices()[k]).norm();
      if (chord == 0.0) return std::numeric_limits<double>::infinity();
      best = std::max(best, intrinsic_dist(arc, j, k) / chord);
    }
    return best;
  });
  const double beta = *std::max_element(row_max.begin(), row_max.end());
  if (std::isinf(beta)) throw Error(ErrorKind::SelfIntersection, "coincident vertices: infinite distortion");
  return beta;
}

/// Inversion x -> c + r^2 (x - c) / |x - c|^2. `guard` is relative to `radius`.
inline PolyCurve sphere_inversion(const PolyCurve& curve, const Vec3& center, double radius,
                                  double guard = 1e-8) {
  if (!(radius > 0.0) || !std::isfinite(radius)) throw Error(ErrorKind::InvalidCurve, "inversion radius must be positive");
  if (!center.allFinite()) throw Error(ErrorKind::InvalidCurve, "inversion center must be finite");
  const long n = static_cast<long>(curve.size());
  for (long j = 0; j < n; ++j) {
    // distance from the center to the edge [x_j, x_{j+1}]
    const Vec3 a = curve[j], e = curve[j + 1] - curve[j];
    const double t = std::clamp((center - a).dot(e) / e.squaredNorm(), 0.0, 1.0);
    if ((a + t * e - center).norm() <= guard * radius)
      throw Error(ErrorKind::InversionSingularity, "edge " + std::to_string(j) + " passes through the inversion center");
  }
  std::vector<Vec3> out;
  out.reserve(curve.size());
  const double r2 = radius * radius;
  for (const auto& x : curve.vertices()) {
    const Vec3 rel = x - center;
    out.push_back(center + (r2 / rel.squaredNorm()) * rel);
  }
  // an off-plane center lifts a planar curve into space
  const int dim = (curve.dim() == 2 && center.z() != 0.0) ? 3 : curve.dim();
  return PolyCurve(std::move(out), dim);
}

/// Sum of exterior turning angles, each in [0, pi].
inline double total_curvature(const PolyCurve& curve) {
  CompensatedSum total;
  const long n = static_cast<long>(curve.size());
  for (long j = 0; j < n; ++j) {
    const Vec3 a = curve[j] - curve[j - 1];
    const Vec3 b = curve[j + 1] - curve[j];
    total.add(std::atan2(a.cross(b).norm(), a.dot(b)));
  }
  return total.value();
}

// ---------------------------------------------------------------------------
// Generators

enum class CurveKind { Circle, Square, Stadion, Wavy };

struct CurveSpec {
  CurveKind kind = CurveKind::Circle;
  int wavy_k = 5;          // lobes of r(theta) = 1 + amp cos(k theta)
  double wavy_amp = 0.3;
};

namespace detail {

/// Parameters in [0, 2pi) of n points equally spaced in arclength along f,
/// arclength measured on a dense polyline.
inline std::vector<double> arclength_parameters(const std::function<Vec3(double)>& f, std::size_t n,
                                                std::size_t oversample) {
  const std::size_t m = std::max<std::size_t>(oversample * n, 65536);
  std::vector<double> s(m + 1, 0.0);
  Vec3 prev = f(0.0);
  CompensatedSum running;
  for (std::size_t i = 1; i <= m; ++i) {
    const Vec3 cur = f(2.0 * kPi * double(i) / double(m));
    running.add((cur - prev).norm());
    s[i] = running.value();
    prev = cur;
  }
  const double length = s[m];
  std::vector<double> theta(n);
  std::size_t seg = 0;
  for (std::size_t j = 0; j < n; ++j) {
    const double target = length * double(j) / double(n);
    while (seg + 1 < m && s[seg + 1] < target) ++seg;
    const double span = s[seg + 1] - s[seg];
    const double frac = span > 0.0 ? (target - s[seg]) / span : 0.0;
    theta[j] = 2.0 * kPi * (double(seg) + frac) / double(m);
  }
  return theta;
}

}  // namespace detail

/// Samples the closed parametric curve f: [0, 2pi) -> R^3 at n points equally
/// spaced in arclength, starting at f(0).
inline PolyCurve sample_by_arclength(const std::function<Vec3(double)>& f, std::size_t n, int dim,
                                     std::size_t oversample = 256) {
  if (n < 3) throw Error(ErrorKind::InvalidCurve, "need n >= 3");
  std::vector<Vec3> pts;
  pts.reserve(n);
  for (double t : detail::arclength_parameters(f, n, oversample)) pts.push_back(f(t));
  return PolyCurve(std::move(pts), dim);
}

/// Equilateral inscribed polygon of f starting at f(0): the arclength
/// samples are moved along f until all edges agree to `tolerance` (relative).
inline PolyCurve sample_equilateral(const std::function<Vec3(double)>& f, std::size_t n, int dim,
                                    double tolerance = 1e-14, int max_iterations = 100) {
  if (n < 3) throw Error(ErrorKind::InvalidCurve, "need n >= 3");
  std::vector<double> theta = detail::arclength_parameters(f, n, 256);
  std::vector<double> cum(n + 1), next(n);
  for (int it = 0; it < max_iterations; ++it) {
    cum[0] = 0.0;
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double e = (f(j + 1 < n ? theta[j + 1] : 2.0 * kPi) - f(theta[j])).norm();
      lo = std::min(lo, e);
      hi = std::max(hi, e);
      cum[j + 1] = cum[j] + e;
    }
    if (hi - lo <= tolerance * hi) break;
    // invert the cumulative chord length piecewise linearly
    std::size_t seg = 0;
    for (std::size_t j = 0; j < n; ++j) {
      const double target = cum[n] * double(j) / double(n);
      while (seg + 1 < n && cum[seg + 1] < target) ++seg;
      const double t1 = seg + 1 < n ? theta[seg + 1] : 2.0 * kPi;
      next[j] = theta[seg] + (t1 - theta[seg]) * (target - cum[seg]) / (cum[seg + 1] - cum[seg]);
    }
    theta.swap(next);
  }
  std::vector<Vec3> pts;
  pts.reserve(n);
  for (double t : theta) pts.push_back(f(t));
  return PolyCurve(std::move(pts), dim);
}

namespace detail {

/// n points spread over `pieces` consecutive pieces of equal length, every
/// piece starting with its first point; piece(p, t) maps t in [0,1) onto it.
inline std::vector<Vec3> sample_pieces(std::size_t n, std::size_t pieces,
                                       const std::function<Vec3(std::size_t, double)>& piece) {
  std::vector<Vec3> pts;
  pts.reserve(n);
  for (std::size_t p = 0; p < pieces; ++p) {
    const std::size_t count = n / pieces + (p < n % pieces ? 1 : 0);
    for (std::size_t i = 0; i < count; ++i) pts.push_back(piece(p, double(i) / double(count)));
  }
  return pts;
}

}  // namespace detail

/// Unit circle, square max(|x|,|y|) <= 1 (corners sampled), stadion (two
/// unit semicircles whose centers are pi apart, junctions sampled), or the
/// wavy circle r(theta) = 1 + amp cos(k theta). All planar.
inline PolyCurve generate(const CurveSpec& spec, std::size_t n) {
  if (n < 3) throw Error(ErrorKind::InvalidCurve, "need n >= 3");
  switch (spec.kind) {
    case CurveKind::Circle: {
      std::vector<Vec3> pts(n);
      for (std::size_t j = 0; j < n; ++j) {
        const double t = 2.0 * kPi * double(j) / double(n);
        pts[j] = Vec3(std::cos(t), std::sin(t), 0.0);
      }
      return PolyCurve(std::move(pts), 2);
    }
    case CurveKind::Square: {
      if (n < 4) throw Error(ErrorKind::InvalidCurve, "square needs n >= 4 to hold its corners");
      static const std::array<Vec3, 4> corners = {Vec3(-1, -1, 0), Vec3(1, -1, 0), Vec3(1, 1, 0),
                                                  Vec3(-1, 1, 0)};
      return PolyCurve(detail::sample_pieces(n, 4,
                                             [](std::size_t p, double t) {
                                               return Vec3(corners[p] + t * (corners[(p + 1) % 4] - corners[p]));
                                             }),
                       2);
    }
    case CurveKind::Stadion: {
      if (n < 4) throw Error(ErrorKind::InvalidCurve, "stadion needs n >= 4 to hold its junctions");
      const double h = kPi / 2.0;  // semicircle centers at (+-pi/2, 0)
      return PolyCurve(detail::sample_pieces(n, 4,
                                             [h](std::size_t p, double t) -> Vec3 {
                                               switch (p) {
                                                 case 0: return {-h + t * kPi, -1.0, 0.0};
                                                 case 1: {
                                                   const double a = -kPi / 2 + t * kPi;
                                                   return {h + std::cos(a), std::sin(a), 0.0};
                                                 }
                                                 case 2: return {h - t * kPi, 1.0, 0.0};
                                                 default: {
                                                   const double a = kPi / 2 + t * kPi;
                                                   return {-h + std::cos(a), std::sin(a), 0.0};
                                                 }
                                               }
                                             }),
                       2);
    }
    case CurveKind::Wavy: {
      const double k = spec.wavy_k, amp = spec.wavy_amp;
      if (!(std::abs(amp) < 1.0)) throw Error(ErrorKind::InvalidCurve, "wavy amplitude must be < 1");
      return sample_by_arclength(
          [k, amp](double t) {
            const double r = 1.0 + amp * std::cos(k * t);
            return Vec3(r * std::cos(t), r * std::sin(t), 0.0);
          },
          n, 2);
    }
  }
  throw Error(ErrorKind::InvalidCurve, "unknown curve kind");
}

/// Uniformly scaled copy.
inline PolyCurve scaled(const PolyCurve& curve, double factor) {
  std::vector<Vec3> pts(curve.vertices());
  for (auto& p : pts) p *= factor;
  return PolyCurve(std::move(pts), curve.dim());
}

/// Copy with vertex order reversed (opposite orientation).
inline PolyCurve reversed(const PolyCurve& curve) {
  std::vector<Vec3> pts(curve.vertices().rbegin(), curve.vertices().rend());
  return PolyCurve(std::move(pts), curve.dim());
}

/// Rigid motion x -> R x + t. Planar curves become spatial unless the motion
/// keeps the plane.
inline PolyCurve transformed(const PolyCurve& curve, const Eigen::Matrix3d& rotation, const Vec3& shift) {
  std::vector<Vec3> pts;
  pts.reserve(curve.size());
  bool planar = curve.dim() == 2;
  for (const auto& p : curve.vertices()) {
    pts.push_back(rotation * p + shift);
    planar = planar && pts.back().z() == 0.0;
  }
  return PolyCurve(std::move(pts), planar ? 2 : 3);
}

}  // namespace oknot
