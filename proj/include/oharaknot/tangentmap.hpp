#pragma once

// The O'hara energy rewritten as a nonlocal energy of the unit tangent
// u: R/Z -> S^2.
//
// Discretization: sample i is the value of u on the cell [i/N, (i+1)/N).
// A pair (i, j) of grid points is joined by the shorter of the two arcs; the
// arc covers whole cells, so arc means are exact for piecewise constant maps
// and the energy of the edge tangents of an equilateral polygon coincides
// with the polygon's O'hara sum (antipodal pairs aside). Antipodal pairs
// (even N, |i - j| = N/2) are excluded from every double sum.

#include "oharaknot/core.hpp"
#include "oharaknot/curve.hpp"
#include "oharaknot/energy.hpp"
#include "oharaknot/io.hpp"

#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace oknot {

/// Compensated cyclic prefix sums: range sums are accurate to a few ulps of
/// the range sum itself, independent of the position along the circle.
class PrefixSum {
 public:
  PrefixSum() = default;

  explicit PrefixSum(const std::vector<double>& values) : hi_(values.size() + 1, 0.0), lo_(values.size() + 1, 0.0) {
    for (std::size_t i = 0; i < values.size(); ++i) {
      double s, e;
      two_sum(hi_[i], values[i], s, e);
      hi_[i + 1] = s;
      lo_[i + 1] = lo_[i] + e;
    }
  }

  std::size_t size() const { return hi_.empty() ? 0 : hi_.size() - 1; }
  double total() const { return hi_.back() + lo_.back(); }

  /// Sum of `count` consecutive values starting at `start`, wrapping around.
  double range(std::size_t start, std::size_t count) const {
    const std::size_t n = size();
    if (start + count <= n) return linear(start, start + count);
    return linear(start, n) + linear(0, start + count - n);
  }

 private:
  double linear(std::size_t b, std::size_t e) const { return (hi_[e] - hi_[b]) + (lo_[e] - lo_[b]); }

  std::vector<double> hi_, lo_;
};

/// Shortest arc between grid points i and j: cells start, ..., start+cells-1.
struct GridArc {
  std::size_t start = 0;
  std::size_t cells = 0;
  double rho = 0.0;  // length on R/Z
};

/// Shortest arc joining grid points i != j; empty for antipodal pairs.
inline std::optional<GridArc> grid_arc(std::size_t n, std::size_t i, std::size_t j) {
  if (i == j) return GridArc{i, 0, 0.0};
  const std::size_t fwd = (j + n - i) % n;
  const std::size_t bwd = n - fwd;
  if (fwd == bwd) return std::nullopt;
  if (fwd < bwd) return GridArc{i, fwd, double(fwd) / double(n)};
  return GridArc{j, bwd, double(bwd) / double(n)};
}

/// Samples of a map R/Z -> R^3 with the arc-mean caches used by the energy.
class VectorField {
 public:
  explicit VectorField(std::vector<Vec3> samples) : samples_(std::move(samples)) {
    const std::size_t n = samples_.size();
    if (n < 3) throw Error(ErrorKind::InvalidCurve, "a sampled map needs at least 3 samples");
    std::array<std::vector<double>, 3> comp;
    for (auto& c : comp) c.resize(n);
    std::vector<double> sq(n);
    for (std::size_t i = 0; i < n; ++i) {
      if (!samples_[i].allFinite()) throw Error(ErrorKind::InvalidCurve, "non-finite sample");
      for (int c = 0; c < 3; ++c) comp[c][i] = samples_[i][c];
      sq[i] = samples_[i].squaredNorm();
    }
    for (int c = 0; c < 3; ++c) {
      prefix_[c] = PrefixSum(comp[c]);
      mean_[c] = prefix_[c].total() / double(n);
    }
    square_ = PrefixSum(sq);
    std::vector<double> dev(n);
    for (std::size_t i = 0; i < n; ++i) dev[i] = (samples_[i] - mean_).norm();
    deviation_ = PrefixSum(dev);
  }

  std::size_t size() const { return samples_.size(); }
  const std::vector<Vec3>& samples() const { return samples_; }
  const Vec3& operator[](std::size_t i) const { return samples_[i]; }

  /// (u)_{R/Z}
  const Vec3& mean() const { return mean_; }

  Vec3 arc_sum(const GridArc& arc) const {
    return {prefix_[0].range(arc.start, arc.cells), prefix_[1].range(arc.start, arc.cells),
            prefix_[2].range(arc.start, arc.cells)};
  }
  Vec3 arc_mean(const GridArc& arc) const { return arc_sum(arc) / double(arc.cells); }
  double arc_mean_square(const GridArc& arc) const { return square_.range(arc.start, arc.cells) / double(arc.cells); }

  /// sum of |u - mean| over the arc's cells
  double arc_deviation_sum(const GridArc& arc) const { return deviation_.range(arc.start, arc.cells); }
  double total_deviation() const { return deviation_.total(); }
  double point_deviation(std::size_t i) const { return (samples_[i] - mean_).norm(); }

  double sup_norm() const {
    double m = 0.0;
    for (const auto& s : samples_) m = std::max(m, s.norm());
    return m;
  }

 private:
  std::vector<Vec3> samples_;
  std::array<PrefixSum, 3> prefix_;
  PrefixSum square_, deviation_;
  Vec3 mean_ = Vec3::Zero();
};

/// Sphere-valued samples: every | |u_i| - 1 | < 1e-10.
class SphereMap : public VectorField {
 public:
  static constexpr double kUnitTolerance = 1e-10;

  explicit SphereMap(std::vector<Vec3> samples) : VectorField(check(std::move(samples))) {}

  /// Normalizes every sample first.
  static SphereMap normalized(std::vector<Vec3> samples) {
    for (auto& s : samples) {
      const double len = s.norm();
      if (!(len > 0.0)) throw Error(ErrorKind::Domain, "cannot normalize a zero sample");
      s /= len;
    }
    return SphereMap(std::move(samples));
  }

 private:
  static std::vector<Vec3> check(std::vector<Vec3> samples) {
    for (std::size_t i = 0; i < samples.size(); ++i) {
      if (!(std::abs(samples[i].norm() - 1.0) < kUnitTolerance))
        throw Error(ErrorKind::Domain, "sample " + std::to_string(i) + " is not on the unit sphere");
    }
    return samples;
  }
};

/// Bracket <u,v>(x,y) for one pair of fields; the cross prefix sum of u.v is
/// built once.
class BracketEvaluator {
 public:
  BracketEvaluator(const VectorField& u, const VectorField& v) : u_(u), v_(v) {
    if (u.size() != v.size()) throw Error(ErrorKind::Domain, "bracket of maps with different sample counts");
    std::vector<double> dots(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) dots[i] = u[i].dot(v[i]);
    cross_ = PrefixSum(dots);
  }

  /// Double arc mean of (u(z1)-u(z2)).(v(z1)-v(z2)), computed as
  /// 2 (mean(u.v) - mean(u).mean(v)).
  double operator()(const GridArc& arc) const {
    if (arc.cells <= 1) return 0.0;
    const double k = double(arc.cells);
    return 2.0 * (cross_.range(arc.start, arc.cells) / k - u_.arc_mean(arc).dot(v_.arc_mean(arc)));
  }

  /// Empty for antipodal pairs.
  std::optional<double> operator()(std::size_t i, std::size_t j) const {
    const auto arc = grid_arc(u_.size(), i, j);
    if (!arc) return std::nullopt;
    return (*this)(*arc);
  }

 private:
  const VectorField& u_;
  const VectorField& v_;
  PrefixSum cross_;
};

/// <u,v>(i,j); empty for antipodal grid pairs. Builds its caches per call.
inline std::optional<double> bracket(const VectorField& u, const VectorField& v, std::size_t i, std::size_t j) {
  return BracketEvaluator(u, v)(i, j);
}

// ---------------------------------------------------------------------------
// Lagrangians

/// F(a,b,c) = ((b - a/2)^(-alpha/2) - c^(-alpha))^(p/2), G(a) = F(a,1,1), and
/// the functions G', H entering the first variation.
struct Lagrangian {
  double alpha = 2.0;
  double p = 2.0;

  explicit Lagrangian(const EnergyParams& params) : alpha(params.alpha), p(params.p) {}
  Lagrangian(double alpha_, double p_) : alpha(alpha_), p(p_) {}

  double F(double a, double b, double c) const {
    const double base = b - 0.5 * a;
    if (!(base > 0.0)) throw Error(ErrorKind::Domain, "F: b - a/2 must be positive");
    if (!(c > 0.0)) throw Error(ErrorKind::Domain, "F: c must be positive");
    const double inner = std::pow(base, -0.5 * alpha) - std::pow(c, -alpha);
    if (inner < 0.0) throw Error(ErrorKind::Domain, "F: negative bracket");
    return std::pow(inner, 0.5 * p);
  }

  double G(double a) const { return std::pow(inner(a), 0.5 * p); }

  double dG(double a) const {
    return alpha * p / 8.0 * pow_or_one(inner(a), 0.5 * (p - 2.0)) *
           std::exp(-0.5 * (alpha + 2.0) * std::log1p(-0.5 * a));
  }

  double H(double a) const {
    const double second = std::expm1(-0.5 * (alpha + 2.0) * std::log1p(-0.5 * a));
    return alpha * p / 2.0 * pow_or_one(inner(a), 0.5 * (p - 2.0)) * second;
  }

 private:
  /// (1 - a/2)^(-alpha/2) - 1 for a in [0, 2)
  double inner(double a) const {
    if (!(a >= 0.0 && a < 2.0)) throw Error(ErrorKind::Domain, "Lagrangian argument outside [0, 2)");
    return std::expm1(-0.5 * alpha * std::log1p(-0.5 * a));
  }
  static double pow_or_one(double x, double e) { return e == 0.0 ? 1.0 : std::pow(x, e); }
};

// ---------------------------------------------------------------------------
// Energies

enum class ThirdArgument {
  ArcMean,        // E: arc mean of |u - (u)|
  IntrinsicMass,  // E~: d_u(x,y) / rho(x,y)
};

namespace detail {

/// Integrand F(a, b, c) with b - a/2 taken as |arc mean of (u - (u))|^2, which
/// equals it by the bracket identity.
inline double energy_integrand(const VectorField& u, const GridArc& arc, double alpha, double half_p,
                               ThirdArgument third) {
  const Vec3 mu = u.arc_mean(arc) - u.mean();
  const double s = mu.squaredNorm();
  const double mass = u.arc_deviation_sum(arc);
  double c;
  if (third == ThirdArgument::ArcMean) {
    c = mass / double(arc.cells);
  } else {
    c = std::min(mass, u.total_deviation() - mass) / double(arc.cells);
  }
  if (!(c > 0.0)) return 0.0;  // u constant on the arc: zero-mass convention
  if (!(s > 0.0)) throw Error(ErrorKind::Domain, "closed sub-arc (a >= 2b): infinite energy");
  // s^(-a/2) - c^(-a) = c^(-a) (exp(-(a/2) log(s/c^2)) - 1)
  const double inner = std::pow(c, -alpha) * std::expm1(-0.5 * alpha * std::log(s / (c * c)));
  if (!(inner > 0.0)) return 0.0;
  return std::pow(inner, half_p);
}

}  // namespace detail

/// Grid quadrature of E^{alpha,p}(u) (or E~ with ThirdArgument::IntrinsicMass):
/// sum over non-antipodal pairs of F(...) |u_i - (u)| |u_j - (u)| rho^(-alpha p/2) / N^2.
inline double energy_E(const VectorField& u, const EnergyParams& params, const ExecPolicy& exec = {},
                       ThirdArgument third = ThirdArgument::ArcMean) {
  params.validate();
  const std::size_t n = u.size();
  const double half_p = 0.5 * params.p;
  const double weight_exp = -0.5 * params.alpha * params.p;
  const double cell = 1.0 / (double(n) * double(n));
  return sum_rows(n, exec, [&](std::size_t i) {
    CompensatedSum row;
    const double di = u.point_deviation(i);
    for (std::size_t j = i + 1; j < n; ++j) {
      const auto arc = grid_arc(n, i, j);
      if (!arc) continue;
      const double f = detail::energy_integrand(u, *arc, params.alpha, half_p, third);
      if (f == 0.0) continue;
      row.add(2.0 * f * di * u.point_deviation(j) * std::pow(arc->rho, weight_exp) * cell);
    }
    return row;
  });
}

inline double energy_E_tilde(const VectorField& u, const EnergyParams& params, const ExecPolicy& exec = {}) {
  return energy_E(u, params, exec, ThirdArgument::IntrinsicMass);
}

/// sup over non-antipodal grid pairs of <u,u>.
inline double lambda_bound(const VectorField& u, const ExecPolicy& exec = {}) {
  const std::size_t n = u.size();
  const BracketEvaluator br(u, u);
  const auto rows = map_rows(n, exec, [&](std::size_t i) {
    double best = 0.0;
    for (std::size_t j = i + 1; j < n; ++j) {
      const auto arc = grid_arc(n, i, j);
      if (arc) best = std::max(best, br(*arc));
    }
    return best;
  });
  return *std::max_element(rows.begin(), rows.end());
}

/// sum over non-antipodal pairs of <u,u>^(p/2) / rho^(1 + beta p) / N^2: the
/// p-th power of the bracket seminorm [[u]]_{W^{beta,p}} on the full circle.
inline double bracket_energy_sum(const VectorField& u, double beta, double p, const ExecPolicy& exec = {}) {
  const std::size_t n = u.size();
  const BracketEvaluator br(u, u);
  const double cell = 1.0 / (double(n) * double(n));
  return sum_rows(n, exec, [&](std::size_t i) {
    CompensatedSum row;
    for (std::size_t j = i + 1; j < n; ++j) {
      const auto arc = grid_arc(n, i, j);
      if (!arc) continue;
      const double a = std::max(0.0, br(*arc));
      row.add(2.0 * std::pow(a, 0.5 * p) * std::pow(arc->rho, -1.0 - beta * p) * cell);
    }
    return row;
  });
}

// ---------------------------------------------------------------------------
// First variation

/// phi - (phi.u) u sample-wise.
inline VectorField project_tangent(const SphereMap& u, const VectorField& phi) {
  std::vector<Vec3> out(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) out[i] = phi[i] - phi[i].dot(u[i]) * u[i];
  return VectorField(std::move(out));
}

/// max_i |phi_i . u_i| <= tol * max_i |phi_i|
inline bool is_tangential(const SphereMap& u, const VectorField& phi, double tol = 1e-10) {
  double worst = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) worst = std::max(worst, std::abs(phi[i].dot(u[i])));
  return worst <= tol * phi.sup_norm();
}

/// Smooth random tangential field: a trigonometric polynomial with
/// coefficients drawn from `seed`, projected onto the tangent planes of u.
inline VectorField random_tangent_field(const SphereMap& u, std::uint64_t seed, int modes = 3) {
  std::mt19937_64 rng(seed);
  // platform-independent uniform draws in [-1, 1)
  auto draw = [&] { return double(rng() >> 11) * 0x1.0p-52 - 1.0; };
  std::vector<std::array<double, 6>> coeff(std::size_t(modes) + 1);
  for (auto& c : coeff)
    for (double& x : c) x = draw();
  const std::size_t n = u.size();
  std::vector<Vec3> phi(n, Vec3::Zero());
  for (std::size_t i = 0; i < n; ++i) {
    const double t = 2.0 * kPi * (double(i) + 0.5) / double(n);
    for (int k = 0; k <= modes; ++k) {
      const auto& c = coeff[std::size_t(k)];
      const double ck = std::cos(k * t), sk = std::sin(k * t);
      phi[i] += Vec3(c[0] * ck + c[1] * sk, c[2] * ck + c[3] * sk, c[4] * ck + c[5] * sk);
    }
  }
  return project_tangent(u, VectorField(std::move(phi)));
}

/// The three parts of the first variation of E at a zero-mean sphere map,
/// with their absolute integrand masses (the natural scale for comparisons).
struct ELTerms {
  double Q = 0.0, R1 = 0.0, R2 = 0.0;
  double Q_abs = 0.0, R1_abs = 0.0, R2_abs = 0.0;

  double mass() const { return Q_abs + R1_abs + R2_abs; }
};

/// Signs of R1 and R2 in the first variation, delta E(u, phi) = Q + R1 - R2.
/// Checked against finite differences of energy_E in the test suite.
inline constexpr double kR1Sign = +1.0;
inline constexpr double kR2Sign = -1.0;

inline double first_variation(const ELTerms& t) { return t.Q + kR1Sign * t.R1 + kR2Sign * t.R2; }

/// Q(u,phi) = 2 sum G'(<u,u>) <u,phi> w,
/// R1(u,phi) = sum H(<u,u>) (arc mean of u).(phi) w,
/// R2(u,phi) = sum G(<u,u>) (u(x) + u(y)).(phi) w,  w = rho^(-alpha p/2) / N^2.
/// Valid for tangential phi and (u)_{R/Z} = 0.
inline ELTerms el_operators(const SphereMap& u, const VectorField& phi, const EnergyParams& params,
                            const ExecPolicy& exec = {}) {
  params.validate();
  if (u.size() != phi.size()) throw Error(ErrorKind::Domain, "u and phi have different sample counts");
  if (u.mean().norm() > 1e-6) throw Error(ErrorKind::Domain, "first variation formula needs a zero-mean map");
  if (!is_tangential(u, phi, 1e-8))
    throw Error(ErrorKind::NonTangential, "test function is not tangent to the sphere map");
  const std::size_t n = u.size();
  const Lagrangian lag(params);
  const BracketEvaluator uu(u, u), uphi(u, phi);
  const Vec3 phi_mean = phi.mean();
  const double weight_exp = -0.5 * params.alpha * params.p;
  const double cell = 1.0 / (double(n) * double(n));

  struct Row {
    CompensatedSum q, r1, r2, qa, r1a, r2a;
  };
  const auto rows = map_rows(n, exec, [&](std::size_t i) {
    Row row;
    for (std::size_t j = i + 1; j < n; ++j) {
      const auto arc = grid_arc(n, i, j);
      if (!arc || arc->cells <= 1) continue;  // single cells: every factor vanishes
      const double a = std::max(0.0, uu(*arc));
      const double w = 2.0 * std::pow(arc->rho, weight_exp) * cell;
      const double q = 2.0 * lag.dG(a) * uphi(*arc) * w;
      const double r1 = lag.H(a) * u.arc_mean(*arc).dot(phi_mean) * w;
      const double r2 = lag.G(a) * (u[i] + u[j]).dot(phi_mean) * w;
      row.q.add(q);
      row.r1.add(r1);
      row.r2.add(r2);
      row.qa.add(std::abs(q));
      row.r1a.add(std::abs(r1));
      row.r2a.add(std::abs(r2));
    }
    return row;
  });
  Row total;
  for (const auto& r : rows) {
    total.q.add(r.q);
    total.r1.add(r.r1);
    total.r2.add(r.r2);
    total.qa.add(r.qa);
    total.r1a.add(r.r1a);
    total.r2a.add(r.r2a);
  }
  return {total.q.value(),  total.r1.value(),  total.r2.value(),
          total.qa.value(), total.r1a.value(), total.r2a.value()};
}

/// (u + eps phi) / |u + eps phi| sample-wise.
inline SphereMap normalized_variation(const SphereMap& u, const VectorField& phi, double eps) {
  std::vector<Vec3> out(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) out[i] = u[i] + eps * phi[i];
  return SphereMap::normalized(std::move(out));
}

/// Central difference of eps -> E(normalize(u + eps phi)) at eps = 0.
inline double fd_first_variation(const SphereMap& u, const VectorField& phi, const EnergyParams& params,
                                 double eps = 1e-5, const ExecPolicy& exec = {}) {
  const double plus = energy_E(normalized_variation(u, phi, eps), params, exec);
  const double minus = energy_E(normalized_variation(u, phi, -eps), params, exec);
  return (plus - minus) / (2.0 * eps);
}

/// Realized constants |R_i| / (|u|_inf [[u]]^p |phi|_{L^1}) with
/// beta = alpha/2 - 1/p.
struct LowerOrderRatio {
  double r1 = 0.0;
  double r2 = 0.0;
  double lambda = 0.0;
};

inline LowerOrderRatio lower_order_bound(const SphereMap& u, const VectorField& phi, const EnergyParams& params,
                                         const ExecPolicy& exec = {}) {
  LowerOrderRatio out;
  out.lambda = lambda_bound(u, exec);
  if (!(out.lambda < 2.0)) throw Error(ErrorKind::Domain, "lower-order bound needs lambda(u) < 2");
  const ELTerms terms = el_operators(u, phi, params, exec);
  const double beta = 0.5 * params.alpha - 1.0 / params.p;
  const double seminorm_p = bracket_energy_sum(u, beta, params.p, exec);
  CompensatedSum l1;
  for (const auto& s : phi.samples()) l1.add(s.norm());
  const double phi_l1 = l1.value() / double(phi.size());
  const double denom = u.sup_norm() * seminorm_p * phi_l1;
  if (!(denom > 0.0)) throw Error(ErrorKind::Domain, "lower-order bound: vanishing normalization");
  out.r1 = std::abs(terms.R1) / denom;
  out.r2 = std::abs(terms.R2) / denom;
  return out;
}

// ---------------------------------------------------------------------------
// Curves <-> tangent maps

/// Unit edge directions of a polygon: the sphere map of its tangent.
inline SphereMap unit_tangent_map(const PolyCurve& curve) {
  std::vector<Vec3> t(curve.size());
  for (std::size_t k = 0; k < curve.size(); ++k) t[k] = curve[long(k) + 1] - curve[long(k)];
  return SphereMap::normalized(std::move(t));
}

/// gamma' for the parametrization gamma(k/N) = x_k: N (x_{k+1} - x_k).
inline VectorField velocity_field(const PolyCurve& curve) {
  const double n = double(curve.size());
  std::vector<Vec3> t(curve.size());
  for (std::size_t k = 0; k < curve.size(); ++k) t[k] = n * (curve[long(k) + 1] - curve[long(k)]);
  return VectorField(std::move(t));
}

/// Sphere-map file: three columns, rows within `tolerance` of unit length are
/// normalized; `renormalize` accepts any nonzero row.
inline SphereMap read_sphere_map(std::istream& in, bool renormalize = false, double tolerance = 1e-8) {
  const Table table = parse_table(in, 3, 3);
  std::vector<Vec3> samples;
  samples.reserve(table.rows.size());
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const Vec3 v(table.rows[i][0], table.rows[i][1], table.rows[i][2]);
    if (!renormalize && !(std::abs(v.norm() - 1.0) <= tolerance))
      throw Error(ErrorKind::InvalidCurve, "row " + std::to_string(i + 1) + " is not a unit vector");
    samples.push_back(v);
  }
  return SphereMap::normalized(std::move(samples));
}

inline SphereMap read_sphere_map(const std::string& path, bool renormalize = false, double tolerance = 1e-8) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path);
  return read_sphere_map(in, renormalize, tolerance);
}

inline void write_sphere_map(const VectorField& u, std::ostream& out) { write_rows(out, u.samples(), 3); }

}  // namespace oknot
