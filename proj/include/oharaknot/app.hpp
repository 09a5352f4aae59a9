#pragma once

// Command-line front end. Reports are `key=value` lines on the output
// stream; failures print `error=<kind>` and map onto exit codes
// 0 ok, 1 check failed, 2 invalid input, 3 numerical domain, 4 config.

#include "oharaknot/core.hpp"
#include "oharaknot/curve.hpp"
#include "oharaknot/energy.hpp"
#include "oharaknot/io.hpp"
#include "oharaknot/seminorm.hpp"
#include "oharaknot/tangentmap.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <fstream>
#include <iomanip>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace oknot::app {

enum ExitCode : int { kOk = 0, kCheckFailed = 1, kInvalidInput = 2, kDomain = 3, kConfig = 4 };

inline int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidCurve:
    case ErrorKind::SelfIntersection:
    case ErrorKind::NonTangential:
    case ErrorKind::Io: return kInvalidInput;
    case ErrorKind::InversionSingularity:
    case ErrorKind::Domain: return kDomain;
    case ErrorKind::Config: return kConfig;
  }
  return kConfig;
}

/// Flat `key=value` file; '#' starts a comment line.
inline std::map<std::string, std::string> read_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Config, "cannot open config " + path);
  std::map<std::string, std::string> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos || line[b] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw Error(ErrorKind::Config, path + ":" + std::to_string(line_no) + ": expected key=value");
    auto trim = [](std::string s) {
      const auto l = s.find_first_not_of(" \t\r");
      const auto r = s.find_last_not_of(" \t\r");
      return l == std::string::npos ? std::string() : s.substr(l, r - l + 1);
    };
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw Error(ErrorKind::Config, path + ":" + std::to_string(line_no) + ": empty key");
    out[key] = trim(line.substr(eq + 1));
  }
  return out;
}

inline std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ',' || c == ' ') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

/// 40 equally spaced alphas 0.05, 0.10, ..., 2.0.
inline std::vector<double> default_alpha_grid() {
  std::vector<double> a(40);
  for (int i = 0; i < 40; ++i) a[std::size_t(i)] = 0.05 * (i + 1);
  return a;
}

inline CurveKind parse_kind(const std::string& name) {
  if (name == "circle") return CurveKind::Circle;
  if (name == "square") return CurveKind::Square;
  if (name == "stadion") return CurveKind::Stadion;
  if (name == "wavy") return CurveKind::Wavy;
  throw Error(ErrorKind::Config, "unknown curve kind '" + name + "'");
}

/// Builtin ids (circle, square, stadion, wavy, inverted-<kind>) or `id=path`.
inline NamedCurve resolve_curve(const std::string& token, std::size_t n) {
  const auto eq = token.find('=');
  if (eq != std::string::npos) return {token.substr(0, eq), read_curve(token.substr(eq + 1))};
  const std::string prefix = "inverted-";
  if (token.rfind(prefix, 0) == 0) {
    const PolyCurve base = generate({parse_kind(token.substr(prefix.size()))}, n);
    return {token, sphere_inversion(base, Vec3::Zero(), 1.0)};
  }
  return {token, generate({parse_kind(token)}, n)};
}

inline std::string fmt(double x) {
  std::ostringstream s;
  s << std::setprecision(12) << x;
  return s.str();
}

struct Options {
  std::string config;
  std::string kind = "circle";
  std::string path;
  std::size_t n = 1000;
  double alpha = 2.0;
  std::optional<double> p;
  std::string out;
  bool stable = false;
  std::uint64_t seed = 1;
  unsigned threads = 1;
  std::string curves = "circle,stadion,inverted-stadion";
  std::string alphas;
  std::string plot;
  std::string image = "energy.png";
  double cx = 0.0, cy = 0.0, cz = 0.0, r = 1.0;
  std::size_t trials = 10;
  std::string phi = "random";
  double eps = 1e-5;
  double tolerance = 1e-3;
  double beta = 0.5;
  int wavy_k = 5;
  double wavy_amp = 0.3;
};

/// Seeds option defaults from a config map; keys are the long flag names.
inline void apply_config(const std::map<std::string, std::string>& cfg, Options& o) {
  for (const auto& [key, value] : cfg) {
    try {
      if (key == "kind") o.kind = value;
      else if (key == "path") o.path = value;
      else if (key == "n") o.n = std::stoul(value);
      else if (key == "alpha") o.alpha = std::stod(value);
      else if (key == "p") o.p = std::stod(value);
      else if (key == "out") o.out = value;
      else if (key == "stable") o.stable = (value == "true" || value == "1");
      else if (key == "seed") o.seed = std::stoull(value);
      else if (key == "threads") o.threads = unsigned(std::stoul(value));
      else if (key == "curves") o.curves = value;
      else if (key == "alphas") o.alphas = value;
      else if (key == "plot") o.plot = value;
      else if (key == "image") o.image = value;
      else if (key == "cx") o.cx = std::stod(value);
      else if (key == "cy") o.cy = std::stod(value);
      else if (key == "cz") o.cz = std::stod(value);
      else if (key == "r") o.r = std::stod(value);
      else if (key == "trials") o.trials = std::stoul(value);
      else if (key == "phi") o.phi = value;
      else if (key == "eps") o.eps = std::stod(value);
      else if (key == "tolerance") o.tolerance = std::stod(value);
      else if (key == "beta") o.beta = std::stod(value);
      else if (key == "wavy-k") o.wavy_k = std::stoi(value);
      else if (key == "wavy-amp") o.wavy_amp = std::stod(value);
      else throw Error(ErrorKind::Config, "unknown config key '" + key + "'");
    } catch (const std::logic_error&) {
      throw Error(ErrorKind::Config, "bad value for config key '" + key + "'");
    }
  }
}

/// Writes to `path`, or to `fallback` when the path is empty.
template <class Fn>
void emit(const std::string& path, std::ostream& fallback, Fn&& fn) {
  if (path.empty()) {
    fn(fallback);
    return;
  }
  std::ofstream f(path);
  if (!f) throw Error(ErrorKind::Io, "cannot write " + path);
  fn(f);
}

inline int cmd_generate(const Options& o, std::ostream& out) {
  CurveSpec spec{parse_kind(o.kind), o.wavy_k, o.wavy_amp};
  const PolyCurve c = generate(spec, o.n);
  emit(o.out, out, [&](std::ostream& s) { write_curve(c, s); });
  if (!o.out.empty()) out << "kind=" << o.kind << "\nn=" << c.size() << "\nout=" << o.out << '\n';
  return kOk;
}

inline int cmd_energy(const Options& o, std::ostream& out) {
  const PolyCurve c = read_curve(o.path);
  const EnergyParams params{o.alpha, o.p ? *o.p : 4.0 / o.alpha};
  const EnergyReport r = ohara_energy(c, params, {o.stable, {o.threads}});
  out << "n=" << c.size() << "\nalpha=" << fmt(params.alpha) << "\np=" << fmt(params.p) << "\nvalue=" << fmt(r.value)
      << '\n';
  if (params.scale_invariant()) out << "scaled=" << fmt(r.scaled) << '\n';
  if (r.stable_value) out << "stable_value=" << fmt(*r.stable_value) << '\n';
  if (r.scaled_stable) out << "scaled_stable=" << fmt(*r.scaled_stable) << '\n';
  out << "beta=" << fmt(r.beta) << "\nterms=" << r.terms << "\nmax_term=" << fmt(r.max_term)
      << "\nunderflowed=" << r.underflowed << "\nrepulsive=" << (r.repulsive ? "true" : "false") << '\n';
  if (r.cancellation()) out << "warning=catastrophic-cancellation\n";
  return kOk;
}

inline int cmd_sweep(const Options& o, std::ostream& out) {
  std::vector<NamedCurve> curves;
  for (const auto& tok : split_list(o.curves)) curves.push_back(resolve_curve(tok, o.n));
  if (curves.empty()) throw Error(ErrorKind::Config, "no curves given");
  std::vector<double> alphas;
  if (o.alphas.empty()) {
    alphas = default_alpha_grid();
  } else {
    for (const auto& tok : split_list(o.alphas)) {
      try {
        alphas.push_back(std::stod(tok));
      } catch (const std::logic_error&) {
        throw Error(ErrorKind::Config, "bad alpha '" + tok + "'");
      }
    }
  }
  const SweepTable table = alpha_sweep(curves, alphas, {o.threads});
  emit(o.out, out, [&](std::ostream& s) { table.write_csv(s); });
  if (!o.plot.empty()) {
    std::ofstream f(o.plot);
    if (!f) throw Error(ErrorKind::Io, "cannot write " + o.plot);
    write_plot_script(f, o.out.empty() ? "sweep.csv" : o.out, o.image);
  }
  if (!o.out.empty()) out << "rows=" << table.rows.size() << "\nout=" << o.out << '\n';
  return kOk;
}

inline int cmd_distortion(const Options& o, std::ostream& out) {
  const PolyCurve c = read_curve(o.path);
  out << "n=" << c.size() << "\nbeta=" << fmt(distortion(c, {o.threads})) << '\n';
  return kOk;
}

inline int cmd_invert(const Options& o, std::ostream& out) {
  const PolyCurve c = read_curve(o.path);
  const PolyCurve inv = sphere_inversion(c, Vec3(o.cx, o.cy, o.cz), o.r);
  emit(o.out, out, [&](std::ostream& s) { write_curve(inv, s); });
  if (!o.out.empty()) out << "n=" << inv.size() << "\nout=" << o.out << '\n';
  return kOk;
}

inline int cmd_elcheck(const Options& o, std::ostream& out) {
  const EnergyParams params{o.alpha, o.p ? *o.p : 4.0 / o.alpha};
  if (!params.scale_invariant() || params.p < 2.0)
    throw Error(ErrorKind::Config, "elcheck needs alpha * p = 4 and p >= 2");
  if (o.trials == 0) throw Error(ErrorKind::Config, "trials must be positive");
  if (o.phi != "random" && o.phi != "u") throw Error(ErrorKind::Config, "phi must be 'random' or 'u'");
  const SphereMap u = unit_tangent_map(generate({CurveKind::Circle}, o.n));
  const ExecPolicy exec{o.threads};
  double max_err = 0.0, max_residual = 0.0;
  for (std::size_t t = 0; t < o.trials; ++t) {
    const VectorField phi = o.phi == "u" ? VectorField(u.samples()) : random_tangent_field(u, o.seed + t);
    const ELTerms terms = el_operators(u, phi, params, exec);
    const double fd = fd_first_variation(u, phi, params, o.eps, exec);
    max_err = std::max(max_err, std::abs(fd - first_variation(terms)) / terms.mass());
    max_residual = std::max(max_residual, std::abs(first_variation(terms)) / terms.mass());
  }
  const bool pass = max_err <= o.tolerance;
  std::ostringstream s;
  s << std::setprecision(3) << std::scientific;
  s << "n=" << o.n << "\nalpha=" << fmt(params.alpha) << "\np=" << fmt(params.p) << "\ntrials=" << o.trials
    << "\nseed=" << o.seed << "\nmax_rel_error=" << max_err << "\nmax_residual=" << max_residual
    << "\nstatus=" << (pass ? "pass" : "fail") << '\n';
  out << s.str();
  return pass ? kOk : kCheckFailed;
}

inline int cmd_seminorm(const Options& o, std::ostream& out) {
  const SampledFunction u = read_sampled_function(o.path);
  const SeminormParams params{o.beta, o.p ? *o.p : 2.0};
  const double g = gagliardo(u, params, {o.threads});
  const double b = bracket_seminorm(u, params, {o.threads});
  out << "n=" << u.size() << "\nbeta=" << fmt(params.beta) << "\np=" << fmt(params.p) << "\ngagliardo=" << fmt(g)
      << "\nbracket=" << fmt(b) << '\n';
  if (g > 0.0) out << "ratio=" << fmt(b / g) << '\n';
  out << "equivalence_range=" << (params.equivalence_range() ? "true" : "false") << '\n';
  return kOk;
}

/// Entry point shared by the executable and the tests.
inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  Options o;
  // config first so that explicit flags override it
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    std::string path;
    if (a == "--config" && i + 1 < argc) path = argv[i + 1];
    else if (a.rfind("--config=", 0) == 0) path = a.substr(9);
    if (!path.empty()) {
      try {
        apply_config(read_config(path), o);
      } catch (const Error& e) {
        out << "error=" << to_string(e.kind()) << '\n';
        err << e.what() << '\n';
        return exit_code(e.kind());
      }
    }
  }

  CLI::App cli{"O'hara knot energies, distortion, tangent-map energies and fractional seminorms"};
  cli.require_subcommand(1);
  cli.fallthrough();
  cli.add_option("--config", o.config, "flat key=value file; flags override it");
  cli.add_option("--threads", o.threads, "worker threads for the pair sums")->check(CLI::PositiveNumber);

  auto* gen = cli.add_subcommand("generate", "write a sampled test curve");
  gen->add_option("kind", o.kind, "circle | square | stadion | wavy");
  gen->add_option("--n", o.n, "vertex count");
  gen->add_option("--out", o.out, "output file (default: standard output)");
  gen->add_option("--wavy-k", o.wavy_k, "lobes of the wavy circle");
  gen->add_option("--wavy-amp", o.wavy_amp, "amplitude of the wavy circle");

  auto* en = cli.add_subcommand("energy", "O'hara energy of a curve file");
  en->add_option("path", o.path, "curve file")->required();
  en->add_option("--alpha", o.alpha, "alpha");
  en->add_option("--p", o.p, "p (default 4/alpha)");
  en->add_flag("--stable", o.stable, "also evaluate the log-distortion form");

  auto* sw = cli.add_subcommand("sweep", "scaled energies over an alpha grid, as CSV");
  sw->add_option("--curves", o.curves, "comma-separated builtin ids or id=path");
  sw->add_option("--alphas", o.alphas, "comma-separated alphas in (0,2] (default: 40-point grid)");
  sw->add_option("--n", o.n, "vertex count of builtin curves");
  sw->add_option("--out", o.out, "CSV file (default: standard output)");
  sw->add_option("--plot", o.plot, "write a matplotlib script here");
  sw->add_option("--image", o.image, "image file named in the plot script");

  auto* di = cli.add_subcommand("distortion", "discrete distortion of a curve file");
  di->add_option("path", o.path, "curve file")->required();

  auto* inv = cli.add_subcommand("invert", "sphere inversion of a curve file");
  inv->add_option("path", o.path, "curve file")->required();
  inv->add_option("--cx", o.cx, "center x");
  inv->add_option("--cy", o.cy, "center y");
  inv->add_option("--cz", o.cz, "center z");
  inv->add_option("--r", o.r, "radius");
  inv->add_option("--out", o.out, "output file (default: standard output)");

  auto* el = cli.add_subcommand("elcheck", "finite-difference check of the first variation on the circle");
  el->add_option("--n", o.n, "samples");
  el->add_option("--alpha", o.alpha, "alpha");
  el->add_option("--p", o.p, "p (default 4/alpha)");
  el->add_option("--trials", o.trials, "random test functions");
  el->add_option("--seed", o.seed, "seed of the first test function");
  el->add_option("--phi", o.phi, "random | u");
  el->add_option("--eps", o.eps, "finite-difference step");
  el->add_option("--tolerance", o.tolerance, "largest accepted relative error");

  auto* se = cli.add_subcommand("seminorm", "Gagliardo and bracket seminorms of a sampled map on R/Z");
  se->add_option("path", o.path, "1-3 column sample file")->required();
  se->add_option("--beta", o.beta, "smoothness order in (0,1)");
  se->add_option("--p", o.p, "integrability exponent (default 2)");

  try {
    cli.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << cli.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    out << "error=config\n";
    err << e.what() << '\n';
    return kConfig;
  }

  try {
    if (*gen) return cmd_generate(o, out);
    if (*en) return cmd_energy(o, out);
    if (*sw) return cmd_sweep(o, out);
    if (*di) return cmd_distortion(o, out);
    if (*inv) return cmd_invert(o, out);
    if (*el) return cmd_elcheck(o, out);
    if (*se) return cmd_seminorm(o, out);
  } catch (const Error& e) {
    out << "error=" << to_string(e.kind()) << '\n';
    err << e.what() << '\n';
    return exit_code(e.kind());
  }
  return kConfig;
}

}  // namespace oknot::app
