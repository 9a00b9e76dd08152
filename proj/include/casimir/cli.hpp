#ifndef CASIMIR_CLI_HPP
#define CASIMIR_CLI_HPP

// Batch front end behind the casimir-edges executable. Subcommands:
//
//   overlap  energy of two parallel half-planes against d_x/d_y
//   tilt     c(theta) of a half-plane facing a plane
//   thermal  first-reflection free energy against d/lambda_T
//   point    one configuration (overlap | tilt | thermal) as a JSON record
//
// Curves are written as CSV (default) or JSON. Exit codes: 0 success, 1 fatal
// error, 2 some rows failed or did not converge, 64 usage error, 65 invalid
// physical domain (the message names the violated invariant).

#include <CLI11.hpp>
#include <Eigen/Core>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "casimir/errors.hpp"
#include "casimir/observables.hpp"
#include "casimir/parallel.hpp"
#include "casimir/thermal.hpp"
#include "casimir/types.hpp"

namespace casimir::cli {

inline constexpr const char* kToolName = "casimir-edges";
inline constexpr const char* kToolVersion = "1.0.0";
inline constexpr const char* kCsvMagic = "# casimir-edges v1";

enum ExitCode : int {
  kExitOk = 0,
  kExitFatal = 1,
  kExitPartial = 2,
  kExitUsage = 64,
  kExitDomain = 65,
};

/// Shortest decimal form with 12 significant digits.
inline std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

inline std::string to_csv(const CurveTable& table) {
  std::ostringstream os;
  os << kCsvMagic << '\n' << "abscissa,energy,error,method,converged\n";
  for (const auto& r : table.rows) {
    os << format_number(r.abscissa) << ',' << format_number(r.energy) << ','
       << format_number(r.failure ? std::nan("") : r.error) << ',' << r.method << ','
       << (r.converged && !r.failure ? "true" : "false") << '\n';
  }
  return os.str();
}

inline nlohmann::json number_or_null(double v) {
  return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
}

inline nlohmann::json to_json(const TruncationSpec& t) {
  return {{"nu_max", t.nu_max},
          {"nu_ceiling", t.nu_ceiling},
          {"lambda_max", t.lambda_max},
          {"lambda_nodes", t.lambda_nodes},
          {"convergence_tol", t.convergence_tol}};
}

inline nlohmann::json to_json(const numerics::QuadratureSpec& q) {
  return {{"rel_tol", q.rel_tol}, {"abs_tol", q.abs_tol}, {"max_refinements", q.max_refinements}};
}

inline nlohmann::json to_json(const CurveTable& table) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : table.rows) {
    nlohmann::json row = {{"abscissa", r.abscissa},
                          {"energy", number_or_null(r.energy)},
                          {"error", r.failure ? nlohmann::json(nullptr) : number_or_null(r.error)},
                          {"method", r.method},
                          {"converged", r.converged && !r.failure}};
    if (r.failure) row["failure"] = *r.failure;
    rows.push_back(std::move(row));
  }
  return {{"x_label", table.x_label}, {"y_label", table.y_label}, {"rows", std::move(rows)}};
}

/// Everything needed to reproduce a run.
struct RunManifest {
  std::string command;
  std::vector<std::string> arguments;
  nlohmann::json flags = nlohmann::json::object();
  EngineOptions engine;
  double wall_time_s = 0.0;
  std::vector<bool> row_converged;

  nlohmann::json to_json() const {
    nlohmann::json versions = {
        {kToolName, kToolVersion},
        {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                      std::to_string(EIGEN_MINOR_VERSION)},
        {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                              std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                              std::to_string(NLOHMANN_JSON_VERSION_PATCH)},
        {"cli11", CLI11_VERSION}};
    nlohmann::json flags_out = flags;
    return {{"tool", kToolName},
            {"format", "casimir-edges v1"},
            {"command", command},
            {"arguments", arguments},
            {"flags", flags_out},
            {"versions", versions},
            {"truncation", cli::to_json(engine.truncation)},
            {"quadrature", cli::to_json(engine.quadrature)},
            {"verify", engine.verify},
            {"threads", worker_count()},
            {"wall_time_s", wall_time_s},
            {"row_converged", row_converged}};
  }
};

namespace detail {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline Method parse_method(const std::string& text) {
  auto m = Method::parse(text);
  if (!m) throw UsageError("unknown method '" + text + "'");
  return *m;
}

inline Polarization parse_channel(const std::string& text, bool& em) {
  em = text == "em";
  if (em || text == "dirichlet") return Polarization::dirichlet;
  if (text == "neumann") return Polarization::neumann;
  throw UsageError("unknown channel '" + text + "' (em | dirichlet | neumann)");
}

inline std::vector<double> linspace(double lo, double hi, int steps) {
  require(std::isfinite(lo) && std::isfinite(hi), "range limits finite");
  require(steps >= 1, "steps >= 1");
  if (steps == 1) {
    require(lo == hi, "min = max when steps = 1");
    return {lo};
  }
  require(lo < hi, "min < max");
  std::vector<double> xs(steps);
  for (int i = 0; i < steps; ++i) xs[i] = lo + (hi - lo) * i / (steps - 1);
  xs.back() = hi;
  return xs;
}

inline void write_text(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open '" + path + "' for writing");
  f << text;
  if (!f) throw std::runtime_error("write to '" + path + "' failed");
}

struct Common {
  std::string out;
  std::string format = "csv";
  std::string manifest;
  int nu_max = TruncationSpec{}.nu_max;
  int nu_ceiling = TruncationSpec{}.nu_ceiling;
  double rel_tol = default_energy_quadrature().rel_tol;
  double convergence_tol = TruncationSpec{}.convergence_tol;
  bool no_verify = false;

  void attach(CLI::App& app, bool curve) {
    app.add_option("--out,-o", out, "Output file (default: stdout)");
    if (curve) app.add_option("--format", format, "csv | json")->check(CLI::IsMember({"csv", "json"}));
    app.add_option("--manifest", manifest, "Manifest file (default: <out>.manifest.json for CSV files)");
    app.add_option("--nu-max", nu_max, "Parabolic channel cutoff at q d >= 1");
    app.add_option("--nu-ceiling", nu_ceiling, "Largest parabolic channel cutoff");
    app.add_option("--rel-tol", rel_tol, "Relative tolerance of spectral integrals");
    app.add_option("--convergence-tol", convergence_tol, "Allowed relative change under doubled cutoffs");
    app.add_flag("--no-verify", no_verify, "Skip the doubled-cutoff convergence check of exact energies");
  }

  EngineOptions engine() const {
    EngineOptions e;
    e.truncation.nu_max = nu_max;
    e.truncation.nu_ceiling = std::max(nu_ceiling, nu_max);
    e.truncation.convergence_tol = convergence_tol;
    e.quadrature.rel_tol = rel_tol;
    e.verify = !no_verify;
    e.truncation.validate();
    e.quadrature.validate();
    return e;
  }

  nlohmann::json flags() const {
    return {{"out", out},   {"format", format},   {"nu_max", nu_max},
            {"nu_ceiling", nu_ceiling}, {"rel_tol", rel_tol}, {"convergence_tol", convergence_tol},
            {"verify", !no_verify}};
  }
};

}  // namespace detail

/// Runs the tool on argv (argv[0] is the program name). Output goes to `out`
/// unless --out names a file; diagnostics go to `err`.
inline int run(const std::vector<std::string>& argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  using detail::Common;
  const auto started = std::chrono::steady_clock::now();

  CLI::App app{"Casimir energies of semi-infinite planes", kToolName};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kToolName) + " " + kToolVersion);

  // overlap
  Common overlap_c;
  double ov_dy = 1.0, ov_min = -2.0, ov_max = 6.0;
  int ov_steps = 33;
  std::string ov_method = "reflection:1";
  auto* overlap = app.add_subcommand("overlap", "Energy of two parallel half-planes against d_x/d_y");
  overlap->add_option("--dy", ov_dy, "Vertical separation d_y");
  overlap->add_option("--dx-min", ov_min, "Smallest d_x/d_y");
  overlap->add_option("--dx-max", ov_max, "Largest d_x/d_y");
  overlap->add_option("--steps", ov_steps, "Number of equally spaced abscissae");
  overlap->add_option("--method", ov_method, "exact | reflection:N | pfa | closed-form");
  overlap_c.attach(*overlap, true);

  // tilt
  Common tilt_c;
  double ti_min = 0.0, ti_max = 1.5;
  int ti_steps = 16;
  std::string ti_method = "two-reflection";
  auto* tilt = app.add_subcommand("tilt", "c(theta) of a half-plane facing a plane");
  tilt->add_option("--theta-min", ti_min, "Smallest tilt angle (radians)");
  tilt->add_option("--theta-max", ti_max, "Largest tilt angle (radians, at most pi/2)");
  tilt->add_option("--steps", ti_steps, "Number of equally spaced angles");
  tilt->add_option("--method", ti_method, "exact | reflection:N | two-reflection");
  tilt_c.attach(*tilt, true);

  // thermal
  Common th_c;
  double th_theta = 0.0, th_min = 0.05, th_max = 5.0;
  int th_steps = 20;
  std::string th_channel = "em", th_method = "closed-form";
  auto* thermal_cmd = app.add_subcommand("thermal", "First-reflection free energy against d/lambda_T");
  thermal_cmd->add_option("--theta", th_theta, "Tilt of the half-plane (radians, < pi/2)");
  thermal_cmd->add_option("--ratio-min", th_min, "Smallest d/lambda_T");
  thermal_cmd->add_option("--ratio-max", th_max, "Largest d/lambda_T");
  thermal_cmd->add_option("--steps", th_steps, "Number of equally spaced ratios");
  thermal_cmd->add_option("--channel", th_channel, "em | dirichlet | neumann");
  thermal_cmd->add_option("--method", th_method, "closed-form | matsubara")
      ->check(CLI::IsMember({"closed-form", "matsubara"}));
  th_c.attach(*thermal_cmd, true);

  // point
  auto* point = app.add_subcommand("point", "Single configuration as a JSON record");
  point->require_subcommand(1);
  Common pov_c, pti_c, pth_c;
  double p_dx = 0.0, p_dy = 1.0, p_theta = 0.0, p_ratio = 1.0;
  std::string p_method = "reflection:1", pt_method = "two-reflection", pth_channel = "em",
              pth_method = "closed-form";
  auto* p_overlap = point->add_subcommand("overlap", "Two parallel half-planes");
  p_overlap->add_option("--dx", p_dx, "Horizontal displacement d_x (positive: overlap)");
  p_overlap->add_option("--dy", p_dy, "Vertical separation d_y");
  p_overlap->add_option("--method", p_method, "exact | reflection:N | pfa | closed-form");
  pov_c.attach(*p_overlap, false);
  auto* p_tilt = point->add_subcommand("tilt", "c(theta) of a half-plane facing a plane");
  p_tilt->add_option("--theta", p_theta, "Tilt angle (radians)");
  p_tilt->add_option("--method", pt_method, "exact | reflection:N | two-reflection");
  pti_c.attach(*p_tilt, false);
  auto* p_thermal = point->add_subcommand("thermal", "First-reflection free energy");
  p_thermal->add_option("--theta", p_theta, "Tilt angle (radians)");
  p_thermal->add_option("--ratio", p_ratio, "d/lambda_T");
  p_thermal->add_option("--channel", pth_channel, "em | dirichlet | neumann");
  p_thermal->add_option("--method", pth_method, "closed-form | matsubara")
      ->check(CLI::IsMember({"closed-form", "matsubara"}));
  pth_c.attach(*p_thermal, false);

  std::vector<std::string> reversed(argv.rbegin(), argv.rend());
  if (!reversed.empty()) reversed.pop_back();
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    err << app.help();
    return kExitUsage;
  }

  RunManifest manifest;
  manifest.arguments = argv;
  auto elapsed = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  };

  // Writes a curve and its manifest; returns the exit code for the rows.
  auto emit_curve = [&](const CurveTable& table, const Common& c) {
    for (const auto& r : table.rows) manifest.row_converged.push_back(r.converged && !r.failure);
    manifest.wall_time_s = elapsed();
    const nlohmann::json man = manifest.to_json();
    if (c.format == "json") {
      nlohmann::json doc = to_json(table);
      doc["manifest"] = man;
      detail::write_text(c.out, doc.dump(2) + "\n", out);
      if (!c.manifest.empty()) detail::write_text(c.manifest, man.dump(2) + "\n", out);
    } else {
      detail::write_text(c.out, to_csv(table), out);
      std::string mpath = c.manifest;
      if (mpath.empty() && !c.out.empty() && c.out != "-") mpath = c.out + ".manifest.json";
      if (!mpath.empty()) detail::write_text(mpath, man.dump(2) + "\n", out);
    }
    for (const auto& r : table.rows)
      if (r.failure) err << kToolName << ": row " << format_number(r.abscissa) << " failed: " << *r.failure << '\n';
    return table.all_ok() ? kExitOk : kExitPartial;
  };

  auto emit_point = [&](const EnergyResult& r, const Common& c) {
    manifest.row_converged = {r.converged};
    manifest.wall_time_s = elapsed();
    nlohmann::json result = {{"value", number_or_null(r.value)},
                             {"error_estimate", number_or_null(r.error_estimate)},
                             {"method", r.method.tag()},
                             {"converged", r.converged},
                             {"truncation_used", r.truncation_used ? to_json(*r.truncation_used)
                                                                   : nlohmann::json(nullptr)}};
    nlohmann::json doc = {{"result", result}, {"manifest", manifest.to_json()}};
    detail::write_text(c.out, doc.dump(2) + "\n", out);
    if (!c.manifest.empty()) detail::write_text(c.manifest, manifest.to_json().dump(2) + "\n", out);
    return r.converged ? kExitOk : kExitPartial;
  };

  auto thermal_value = [](double theta, double ratio, const std::string& channel, const std::string& method) {
    bool em = false;
    const Polarization pol = detail::parse_channel(channel, em);
    const HalfPlaneVsPlaneConfig config{1.0, theta};
    config.validate();
    const thermal::ThermalConfig tc{ratio, 100000};
    tc.validate();
    const Method tag = method == "matsubara" ? Method::reflection(1) : Method::closed_form();
    if (method == "matsubara") {
      const auto r = em ? thermal::matsubara_free_energy_em(config, tc) : thermal::matsubara_free_energy(config, tc, pol);
      return EnergyResult{r.value, 0.0, tag, r.converged, std::nullopt};
    }
    const double em_value = thermal::em_free_energy_closed(config, tc);
    if (em) return EnergyResult{em_value, 0.0, tag, true, std::nullopt};
    return EnergyResult{0.5 * em_value + thermal::scalar_free_energy_elliptic(1.0, tc, pol), 0.0, tag, true,
                        std::nullopt};
  };

  try {
    if (*overlap) {
      manifest.command = "overlap";
      const Method m = detail::parse_method(ov_method);
      manifest.engine = overlap_c.engine();
      manifest.flags = overlap_c.flags();
      manifest.flags.update({{"dy", ov_dy}, {"dx_min", ov_min}, {"dx_max", ov_max}, {"steps", ov_steps}, {"method", m.tag()}});
      require(std::isfinite(ov_dy) && ov_dy > 0.0, "d_y > 0");
      const auto xs = detail::linspace(ov_min, ov_max, ov_steps);
      return emit_curve(overlap_curve(ov_dy, xs, m, manifest.engine), overlap_c);
    }
    if (*tilt) {
      manifest.command = "tilt";
      const Method m = detail::parse_method(ti_method);
      manifest.engine = tilt_c.engine();
      manifest.flags = tilt_c.flags();
      manifest.flags.update({{"theta_min", ti_min}, {"theta_max", ti_max}, {"steps", ti_steps}, {"method", m.tag()}});
      require(ti_min >= 0.0 && ti_max <= std::numbers::pi / 2 + 1e-12, "0 <= theta <= pi/2");
      auto xs = detail::linspace(ti_min, std::min(ti_max, std::numbers::pi / 2), ti_steps);
      return emit_curve(tilt_curve(xs, m, manifest.engine), tilt_c);
    }
    if (*thermal_cmd) {
      manifest.command = "thermal";
      bool em = false;
      detail::parse_channel(th_channel, em);
      manifest.engine = th_c.engine();
      manifest.flags = th_c.flags();
      manifest.flags.update({{"theta", th_theta}, {"ratio_min", th_min}, {"ratio_max", th_max},
                             {"steps", th_steps}, {"channel", th_channel}, {"method", th_method}});
      HalfPlaneVsPlaneConfig{1.0, th_theta}.validate();
      require(th_min > 0.0, "ratio > 0");
      const auto xs = detail::linspace(th_min, th_max, th_steps);
      CurveTable t = tabulate(xs, th_method + ":" + th_channel,
                              [&](double x) { return thermal_value(th_theta, x, th_channel, th_method); });
      t.x_label = "d/lambda_T";
      t.y_label = "F d^2/(hbar c L)";
      return emit_curve(t, th_c);
    }
    if (*p_overlap) {
      manifest.command = "point overlap";
      const Method m = detail::parse_method(p_method);
      manifest.engine = pov_c.engine();
      manifest.flags = pov_c.flags();
      manifest.flags.update({{"dx", p_dx}, {"dy", p_dy}, {"method", m.tag()}});
      return emit_point(overlap_energy(p_dx, p_dy, m, manifest.engine), pov_c);
    }
    if (*p_tilt) {
      manifest.command = "point tilt";
      const Method m = detail::parse_method(pt_method);
      manifest.engine = pti_c.engine();
      manifest.flags = pti_c.flags();
      manifest.flags.update({{"theta", p_theta}, {"method", m.tag()}});
      const CoefficientResult c = c_of_theta(p_theta, m, manifest.engine);
      return emit_point({c.value, c.error_estimate, c.method, c.converged, std::nullopt}, pti_c);
    }
    if (*p_thermal) {
      manifest.command = "point thermal";
      manifest.engine = pth_c.engine();
      manifest.flags = pth_c.flags();
      manifest.flags.update({{"theta", p_theta}, {"ratio", p_ratio}, {"channel", pth_channel}, {"method", pth_method}});
      return emit_point(thermal_value(p_theta, p_ratio, pth_channel, pth_method), pth_c);
    }
  } catch (const detail::UsageError& e) {
    err << kToolName << ": " << e.what() << '\n';
    return kExitUsage;
  } catch (const DomainError& e) {
    err << kToolName << ": invalid domain: " << e.invariant() << '\n';
    return kExitDomain;
  } catch (const std::exception& e) {
    err << kToolName << ": error: " << e.what() << '\n';
    return kExitFatal;
  }
  err << app.help();
  return kExitUsage;
}

inline int run(int argc, char** argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  return run(std::vector<std::string>(argv, argv + argc), out, err);
}

}  // namespace casimir::cli

#endif  // CASIMIR_CLI_HPP
