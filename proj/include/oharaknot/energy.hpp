#pragma once

// Discrete O'hara energies on polygons.
//
// Direct form: sum over j != k of (|x_j - x_k|^-a - d_jk^-a)^(p/2) D_j D_k,
// where d_jk is the polygon's intrinsic distance and D_j the mid-point weight.
// For the scale-invariant family p = 4/a the scaled functional
//     (1/a) * O^(a/2)
// tends to log(distortion) as a -> 0. Evaluating it directly underflows for
// small a, so it is also computed in the log-distortion form
//     log(b) * ( sum |x_j - x_k|^-2 B_jk^(2/a) D_j D_k )^(a/2),
//     B_jk = (1 - (|x_j - x_k| / d_jk)^a) / (a log b),
// with b the discrete distortion. Both are algebraically equal.

#include "oharaknot/core.hpp"
#include "oharaknot/curve.hpp"

#include <cmath>
#include <iomanip>
#include <limits>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace oknot {

struct EnergyParams {
  double alpha = 2.0;
  double p = 2.0;

  /// The (alpha, 4/alpha) member of the family.
  static EnergyParams scale_invariant_family(double alpha) { return {alpha, 4.0 / alpha}; }

  bool scale_invariant() const { return std::abs(alpha * p - 4.0) <= 1e-12 * 4.0; }
  /// alpha * p >= 4: self-intersections cost infinite energy.
  bool repulsive() const { return alpha * p >= 4.0 * (1.0 - 1e-12); }

  void validate() const {
    if (!(alpha > 0.0) || !std::isfinite(alpha)) throw Error(ErrorKind::Domain, "alpha must be positive");
    if (!(p >= 1.0) || !std::isfinite(p)) throw Error(ErrorKind::Domain, "p must be >= 1");
  }
};

struct EnergyReport {
  double value = 0.0;                   // direct quadrature of O^{alpha,p}
  std::optional<double> stable_value;   // same energy rebuilt from the log-distortion form
  double scaled = 0.0;                  // (1/alpha) value^(alpha/2), scale-invariant family only
  std::optional<double> scaled_stable;  // log-distortion form of `scaled`
  double beta = 1.0;                    // discrete distortion
  std::size_t terms = 0;                // unordered pairs with a positive summand
  double max_term = 0.0;                // largest single (ordered-pair) summand
  std::size_t underflowed = 0;          // positive brackets whose power underflowed to 0
  bool repulsive = true;

  /// The direct form lost the energy to underflow/cancellation.
  bool cancellation() const { return underflowed > 0; }
};

struct EnergyOptions {
  bool stable = true;  // also evaluate the log-distortion form (p = 4/alpha only)
  ExecPolicy exec{};
};

namespace detail {

struct PairPartial {
  CompensatedSum sum;
  std::size_t positive = 0;
  std::size_t underflowed = 0;
  double max_term = 0.0;
  bool coincident = false;
};

inline double chord_or_throw(const PolyCurve& curve, std::size_t j, std::size_t k) {
  const double chord = (curve.vertices()[j] - curve.vertices()[k]).norm();
  if (chord == 0.0) throw Error(ErrorKind::SelfIntersection, "coincident vertices: infinite energy");
  return chord;
}

/// Direct double sum; every unordered pair counted twice.
inline PairPartial direct_sum(const PolyCurve& curve, const ArcTable& arc, const EnergyParams& params,
                              const ExecPolicy& exec) {
  const std::size_t n = curve.size();
  const double a = params.alpha, half_p = 0.5 * params.p;
  const auto rows = map_rows(n, exec, [&](std::size_t j) {
    PairPartial row;
    const Vec3& xj = curve.vertices()[j];
    for (std::size_t k = j + 1; k < n; ++k) {
      const double chord = (xj - curve.vertices()[k]).norm();
      if (chord == 0.0) {
        row.coincident = true;
        return row;
      }
      const double d = intrinsic_dist(arc, j, k);
      if (chord >= d) continue;  // straight pieces: bracket is 0 up to rounding
      // chord^-a - d^-a without cancellation
      const double bracket = std::pow(chord, -a) * -std::expm1(a * std::log(chord / d));
      if (!(bracket > 0.0)) continue;
      const double term = std::pow(bracket, half_p) * arc.weights[j] * arc.weights[k];
      if (term == 0.0) {
        ++row.underflowed;
        continue;
      }
      ++row.positive;
      row.max_term = std::max(row.max_term, term);
      row.sum.add(2.0 * term);
    }
    return row;
  });
  PairPartial total;
  for (const auto& r : rows) {
    if (r.coincident) throw Error(ErrorKind::SelfIntersection, "coincident vertices: infinite energy");
    total.sum.add(r.sum);
    total.positive += r.positive;
    total.underflowed += r.underflowed;
    total.max_term = std::max(total.max_term, r.max_term);
  }
  return total;
}

/// log of sum_{j != k} chord^-2 B_jk^(2/a) D_j D_k, the inner sum of the
/// log-distortion form.
inline double stable_log_sum(const PolyCurve& curve, const ArcTable& arc, double alpha, double log_beta,
                             const ExecPolicy& exec) {
  const std::size_t n = curve.size();
  const double expo = 2.0 / alpha;
  const double scale = alpha * log_beta;
  const double total = sum_rows(n, exec, [&](std::size_t j) {
    CompensatedSum row;
    for (std::size_t k = j + 1; k < n; ++k) {
      const double chord = chord_or_throw(curve, j, k);
      const double d = intrinsic_dist(arc, j, k);
      if (chord >= d) continue;
      const double b = -std::expm1(alpha * std::log(chord / d)) / scale;
      if (!(b > 0.0)) continue;
      const double term = std::exp(expo * std::log(b)) / (chord * chord);
      row.add(2.0 * term * arc.weights[j] * arc.weights[k]);
    }
    return row;
  });
  return std::log(total);
}

}  // namespace detail

/// Direct mid-point quadrature of O^{alpha,p}, with the log-distortion form
/// alongside when p = 4/alpha.
inline EnergyReport ohara_energy(const PolyCurve& curve, const EnergyParams& params,
                                 const EnergyOptions& options = {}) {
  params.validate();
  const ArcTable arc = build_arc_table(curve);
  EnergyReport report;
  report.repulsive = params.repulsive();
  const auto direct = detail::direct_sum(curve, arc, params, options.exec);
  report.value = direct.sum.value();
  report.terms = direct.positive;
  report.max_term = direct.max_term;
  report.underflowed = direct.underflowed;
  report.beta = distortion(curve, options.exec);
  if (params.scale_invariant()) {
    report.scaled = std::pow(report.value, 0.5 * params.alpha) / params.alpha;
    if (options.stable && report.beta > 1.0 + 1e-9) {
      const double log_beta = std::log(report.beta);
      const double log_inner = detail::stable_log_sum(curve, arc, params.alpha, log_beta, options.exec);
      report.scaled_stable = log_beta * std::exp(0.5 * params.alpha * log_inner);
      report.stable_value = std::exp(2.0 / params.alpha * std::log(params.alpha * log_beta) + log_inner);
    }
  }
  return report;
}

struct ScaledEnergy {
  double value = 0.0;  // (1/alpha) O^{alpha,4/alpha}^(alpha/2)
  double beta = 1.0;
  bool fallback = false;  // distortion too close to 1, direct form used
};

/// Scaled energy (1/alpha) (O^{alpha,4/alpha})^(alpha/2) in log-distortion
/// form. `beta` may be supplied when already known.
inline ScaledEnergy scaled_energy_stable(const PolyCurve& curve, double alpha, const ExecPolicy& exec = {},
                                         std::optional<double> beta = std::nullopt) {
  if (!(alpha > 0.0 && alpha < 4.0)) throw Error(ErrorKind::Domain, "alpha must lie in (0, 4)");
  ScaledEnergy out;
  out.beta = beta ? *beta : distortion(curve, exec);
  const ArcTable arc = build_arc_table(curve);
  if (!(out.beta > 1.0 + 1e-9)) {
    out.fallback = true;
    const auto direct = detail::direct_sum(curve, arc, EnergyParams::scale_invariant_family(alpha), exec);
    out.value = std::pow(direct.sum.value(), 0.5 * alpha) / alpha;
    return out;
  }
  const double log_beta = std::log(out.beta);
  const double log_inner = detail::stable_log_sum(curve, arc, alpha, log_beta, exec);
  out.value = log_beta * std::exp(0.5 * alpha * log_inner);
  return out;
}

/// ((4 - alpha)/4) O^{alpha,4/alpha}: tends to a multiple of the total
/// curvature as alpha -> 4.
inline double total_curvature_limit(const PolyCurve& curve, double alpha, const ExecPolicy& exec = {}) {
  if (!(alpha > 3.0 && alpha < 4.0)) throw Error(ErrorKind::Domain, "alpha must lie in (3, 4)");
  const ArcTable arc = build_arc_table(curve);
  const auto direct = detail::direct_sum(curve, arc, EnergyParams::scale_invariant_family(alpha), exec);
  return 0.25 * (4.0 - alpha) * direct.sum.value();
}

// ---------------------------------------------------------------------------
// Sweeps

struct SweepRow {
  double alpha = 0.0;
  std::string curve;
  double value = std::numeric_limits<double>::quiet_NaN();
  double beta = std::numeric_limits<double>::quiet_NaN();
  std::size_t n = 0;
  std::string error;  // empty unless the cell failed
};

struct SweepTable {
  std::vector<SweepRow> rows;

  /// CSV with header `alpha,curve,value,beta,n`, 12 significant digits.
  void write_csv(std::ostream& out) const {
    out << "alpha,curve,value,beta,n\n";
    std::ostringstream cell;
    cell << std::setprecision(12);
    for (const auto& r : rows) {
      cell.str("");
      cell << r.alpha << ',' << r.curve << ',' << r.value << ',' << r.beta << ',' << r.n << '\n';
      out << cell.str();
    }
  }

  std::string csv() const {
    std::ostringstream s;
    write_csv(s);
    return s.str();
  }
};

using NamedCurve = std::pair<std::string, PolyCurve>;

/// Scaled stable energy for every (alpha, curve); rows ordered alpha-major,
/// curves in the given order. Cells that fail carry `error` and NaN values.
inline SweepTable alpha_sweep(const std::vector<NamedCurve>& curves, const std::vector<double>& alphas,
                              const ExecPolicy& exec = {}) {
  std::set<std::string> ids;
  for (const auto& [id, c] : curves) {
    if (id.empty() || id.find_first_of(",\n") != std::string::npos)
      throw Error(ErrorKind::Config, "curve id '" + id + "' is empty or contains ',' or a newline");
    if (!ids.insert(id).second) throw Error(ErrorKind::Config, "duplicate curve id '" + id + "'");
  }
  for (double a : alphas) {
    if (!(a > 0.0 && a <= 2.0)) throw Error(ErrorKind::Config, "sweep alphas must lie in (0, 2]");
  }
  std::vector<std::optional<double>> betas(curves.size());
  std::vector<std::string> beta_errors(curves.size());
  for (std::size_t c = 0; c < curves.size(); ++c) {
    try {
      betas[c] = distortion(curves[c].second, exec);
    } catch (const Error& e) {
      beta_errors[c] = to_string(e.kind());
    }
  }
  SweepTable table;
  for (double a : alphas) {
    for (std::size_t c = 0; c < curves.size(); ++c) {
      SweepRow row;
      row.alpha = a;
      row.curve = curves[c].first;
      row.n = curves[c].second.size();
      if (!betas[c]) {
        row.error = beta_errors[c];
      } else {
        try {
          const auto s = scaled_energy_stable(curves[c].second, a, exec, betas[c]);
          row.value = s.value;
          row.beta = s.beta;
        } catch (const Error& e) {
          row.error = to_string(e.kind());
        }
      }
      table.rows.push_back(std::move(row));
    }
  }
  return table;
}

/// Python/matplotlib script plotting value against alpha, one line per curve,
/// from the CSV written by SweepTable::write_csv.
inline void write_plot_script(std::ostream& out, const std::string& csv_path, const std::string& image_path) {
  out << "#!/usr/bin/env python3\n"
         "# Plots alpha -> (1/alpha) O^{alpha,4/alpha}^(alpha/2) per curve.\n"
         "import csv\n"
         "import collections\n"
         "import matplotlib\n"
         "matplotlib.use('Agg')\n"
         "import matplotlib.pyplot as plt\n\n"
         "series = collections.OrderedDict()\n"
      << "with open(" << std::quoted(csv_path) << ") as f:\n"
      << "    for row in csv.DictReader(f):\n"
         "        series.setdefault(row['curve'], []).append((float(row['alpha']), float(row['value'])))\n\n"
         "for name, pts in series.items():\n"
         "    pts.sort()\n"
         "    plt.plot([a for a, _ in pts], [v for _, v in pts], label=name)\n"
         "plt.xlabel('alpha')\n"
         "plt.ylabel('scaled energy')\n"
         "plt.legend()\n"
      << "plt.savefig(" << std::quoted(image_path) << ", dpi=150)\n";
}

}  // namespace oknot
