#pragma once

// Fractional seminorms of sampled maps on an interval or on R/Z.
//
// Samples are cell values on a uniform grid of width h. On an interval the
// distance is |i - j| h; on the circle it is the periodic distance. Both
// double sums skip the diagonal; the bracket form additionally skips
// antipodal pairs on the circle.

#include "oharaknot/core.hpp"
#include "oharaknot/io.hpp"
#include "oharaknot/tangentmap.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>

#include <cmath>
#include <functional>
#include <string>
#include <vector>

namespace oknot {

/// Uniformly sampled map into R^1..R^3 (padded with zeros to R^3).
/// `full_circle` means the samples cover R/Z and distances wrap.
class SampledFunction {
 public:
  SampledFunction(std::vector<Vec3> values, double start, double length, bool full_circle)
      : values_(std::move(values)), start_(start), length_(length), full_circle_(full_circle) {
    if (values_.size() < 2) throw Error(ErrorKind::InvalidCurve, "a sampled function needs at least 2 samples");
    if (!(length > 0.0) || !std::isfinite(length) || !std::isfinite(start))
      throw Error(ErrorKind::InvalidCurve, "interval length must be positive and finite");
    if (full_circle_ && std::abs(length_ - 1.0) > 1e-12)
      throw Error(ErrorKind::InvalidCurve, "a full-circle sample must have length 1");
    for (const auto& v : values_)
      if (!v.allFinite()) throw Error(ErrorKind::InvalidCurve, "non-finite sample");
  }

  /// Samples f at the cell midpoints of R/Z.
  static SampledFunction on_circle(const std::function<Vec3(double)>& f, std::size_t n) {
    std::vector<Vec3> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = f((double(i) + 0.5) / double(n));
    return SampledFunction(std::move(v), 0.0, 1.0, true);
  }

  /// Samples f at the cell midpoints of [a, a + len].
  static SampledFunction on_interval(const std::function<Vec3(double)>& f, double a, double len, std::size_t n) {
    std::vector<Vec3> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = f(a + len * (double(i) + 0.5) / double(n));
    return SampledFunction(std::move(v), a, len, false);
  }

  std::size_t size() const { return values_.size(); }
  const std::vector<Vec3>& values() const { return values_; }
  double start() const { return start_; }
  double length() const { return length_; }
  double spacing() const { return length_ / double(values_.size()); }
  bool full_circle() const { return full_circle_; }

  /// Samples first, ..., first+count-1 as a function on the corresponding
  /// sub-interval (never periodic).
  SampledFunction restrict(std::size_t first, std::size_t count) const {
    if (count < 2 || first + count > values_.size())
      throw Error(ErrorKind::Config, "restriction outside the sampled interval");
    std::vector<Vec3> v(values_.begin() + long(first), values_.begin() + long(first + count));
    return SampledFunction(std::move(v), start_ + double(first) * spacing(), double(count) * spacing(), false);
  }

  SampledFunction shifted_samples(std::size_t shift) const {
    std::vector<Vec3> v(values_.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = values_[(i + shift) % v.size()];
    return SampledFunction(std::move(v), start_, length_, full_circle_);
  }

 private:
  std::vector<Vec3> values_;
  double start_, length_;
  bool full_circle_;
};

/// Reads a sampled function file (1-3 columns) as samples over R/Z.
inline SampledFunction read_sampled_function(const std::string& path) {
  const Table table = read_table(path, 1, 3);
  std::vector<Vec3> v;
  v.reserve(table.rows.size());
  for (const auto& r : table.rows) {
    Vec3 x = Vec3::Zero();
    for (std::size_t c = 0; c < r.size(); ++c) x[long(c)] = r[c];
    v.push_back(x);
  }
  return SampledFunction(std::move(v), 0.0, 1.0, true);
}

struct SeminormParams {
  double beta = 0.5;
  double p = 2.0;

  void validate() const {
    if (!(beta > 0.0 && beta < 1.0)) throw Error(ErrorKind::Config, "beta must lie in (0,1)");
    if (!(p > 1.0) || !std::isfinite(p)) throw Error(ErrorKind::Config, "p must lie in (1,inf)");
  }

  /// Range in which the bracket seminorm is comparable to the Gagliardo one.
  bool equivalence_range() const { return beta > 1.0 / p - 0.5; }
};

namespace detail {

inline std::size_t grid_distance(const SampledFunction& u, std::size_t i, std::size_t j) {
  const std::size_t d = i > j ? i - j : j - i;
  return u.full_circle() ? std::min(d, u.size() - d) : d;
}

}  // namespace detail

/// [u]_{W^{beta,p}}^p: sum over i != j of |u_i - u_j|^p / rho^{1 + beta p} h^2.
inline double gagliardo_p(const SampledFunction& u, const SeminormParams& params, const ExecPolicy& exec = {}) {
  params.validate();
  const std::size_t n = u.size();
  const double h = u.spacing();
  const double expo = -1.0 - params.beta * params.p;
  return sum_rows(n, exec, [&](std::size_t i) {
    CompensatedSum row;
    for (std::size_t j = i + 1; j < n; ++j) {
      const double rho = double(detail::grid_distance(u, i, j)) * h;
      const double diff = (u.values()[i] - u.values()[j]).norm();
      row.add(2.0 * std::pow(diff, params.p) * std::pow(rho, expo) * h * h);
    }
    return row;
  });
}

inline double gagliardo(const SampledFunction& u, const SeminormParams& params, const ExecPolicy& exec = {}) {
  return std::pow(gagliardo_p(u, params, exec), 1.0 / params.p);
}

/// [[u]]_{W^{beta,p}}^p: sum over pairs of <u,u>^{p/2} / rho^{1 + beta p} h^2,
/// the bracket taken over the cells between the two grid points.
inline double bracket_seminorm_p(const SampledFunction& u, const SeminormParams& params,
                                 const ExecPolicy& exec = {}) {
  params.validate();
  if (u.full_circle()) return bracket_energy_sum(VectorField(u.values()), params.beta, params.p, exec);

  const std::size_t n = u.size();
  const double h = u.spacing();
  const double expo = -1.0 - params.beta * params.p;
  std::array<std::vector<double>, 3> comp;
  std::vector<double> sq(n);
  for (auto& c : comp) c.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (int c = 0; c < 3; ++c) comp[c][i] = u.values()[i][c];
    sq[i] = u.values()[i].squaredNorm();
  }
  const std::array<PrefixSum, 3> pre{PrefixSum(comp[0]), PrefixSum(comp[1]), PrefixSum(comp[2])};
  const PrefixSum pre_sq(sq);
  // grid points 0..n bound the cells; the pair (i, j) spans cells i..j-1
  return sum_rows(n + 1, exec, [&](std::size_t i) {
    CompensatedSum row;
    for (std::size_t j = i + 2; j <= n; ++j) {
      const std::size_t k = j - i;
      const Vec3 mean(pre[0].range(i, k) / double(k), pre[1].range(i, k) / double(k), pre[2].range(i, k) / double(k));
      const double a = std::max(0.0, 2.0 * (pre_sq.range(i, k) / double(k) - mean.squaredNorm()));
      row.add(2.0 * std::pow(a, 0.5 * params.p) * std::pow(double(k) * h, expo) * h * h);
    }
    return row;
  });
}

inline double bracket_seminorm(const SampledFunction& u, const SeminormParams& params,
                               const ExecPolicy& exec = {}) {
  return std::pow(bracket_seminorm_p(u, params, exec), 1.0 / params.p);
}

/// Integral of rho(x,y)^{-2-mu} over {min(x,y) < s,t < max(x,y)}:
/// 2 / (mu (1 + mu)) |t - s|^{-mu}.
inline double ast_integral(double s, double t, double mu) {
  if (!(mu > 0.0)) throw Error(ErrorKind::Domain, "mu must be positive");
  if (s == t) throw Error(ErrorKind::Domain, "A(s,t) integral is singular at s = t");
  return 2.0 / (mu * (1.0 + mu)) * std::pow(std::abs(t - s), -mu);
}

/// Same integral with the y-integration done in closed form and the
/// remaining semi-infinite x-integral 2/(1+mu) int_{-inf}^{s} (t-x)^{-1-mu} dx
/// evaluated by exp-sinh quadrature.
inline double ast_integral_numeric(double s, double t, double mu) {
  if (!(mu > 0.0)) throw Error(ErrorKind::Domain, "mu must be positive");
  if (s == t) throw Error(ErrorKind::Domain, "A(s,t) integral is singular at s = t");
  const double gap = std::abs(t - s);
  boost::math::quadrature::exp_sinh<double> integrator;
  const double inner = integrator.integrate([&](double r) { return std::pow(gap + r, -1.0 - mu); });
  return 2.0 / (1.0 + mu) * inner;
}

// ---------------------------------------------------------------------------
// Fixed test maps for the equivalence probes

struct TestMap {
  std::string name;
  std::function<Vec3(double)> f;  // 1-periodic
};

inline std::vector<TestMap> seminorm_test_maps() {
  constexpr double tau = 2.0 * kPi;
  std::vector<TestMap> maps;
  maps.push_back({"trig1", [=](double x) { return Vec3(std::cos(tau * x), std::sin(tau * x), 0.0); }});
  maps.push_back({"trig2", [=](double x) { return Vec3(std::cos(2 * tau * x), 0.5 * std::sin(tau * x), 0.0); }});
  maps.push_back({"trig3", [=](double x) {
                    return Vec3(std::sin(3 * tau * x) + 0.3 * std::cos(tau * x), std::cos(2 * tau * x), 0.0);
                  }});
  maps.push_back({"trig4", [=](double x) {
                    return Vec3(std::cos(4 * tau * x), std::sin(tau * x), 0.2 * std::cos(3 * tau * x));
                  }});
  maps.push_back({"trig5", [=](double x) {
                    return Vec3(std::sin(5 * tau * x) - 0.5 * std::sin(2 * tau * x), 0.0, 0.0);
                  }});
  maps.push_back({"trig-mixed", [=](double x) {
                    return Vec3(std::cos(tau * x) + 0.25 * std::cos(5 * tau * x), std::sin(3 * tau * x),
                                0.1 * std::sin(4 * tau * x));
                  }});
  maps.push_back({"trig-helix", [=](double x) {
                    return Vec3(std::cos(2 * tau * x), std::sin(2 * tau * x), 0.5 * std::cos(tau * x));
                  }});
  maps.push_back({"trig-scalar", [=](double x) { return Vec3(std::cos(tau * x) * std::sin(2 * tau * x), 0.0, 0.0); }});
  maps.push_back({"hat", [](double x) {
                    const double y = x - std::floor(x);
                    return Vec3(1.0 - 2.0 * std::abs(y - 0.5), 0.0, 0.0);
                  }});
  maps.push_back({"weierstrass", [=](double x) {
                    double v = 0.0;
                    for (int k = 0; k < 8; ++k) v += std::pow(2.0, -0.7 * k) * std::cos(std::pow(2.0, k) * tau * x);
                    return Vec3(v, 0.0, 0.0);
                  }});
  return maps;
}

}  // namespace oknot
