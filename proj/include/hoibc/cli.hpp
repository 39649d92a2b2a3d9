#pragma once

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "hoibc/analysis.hpp"
#include "hoibc/config.hpp"

namespace hoibc::cli {

namespace fs = std::filesystem;

enum ExitCode { kOk = 0, kOtherError = 1, kValidation = 2, kNumerical = 3, kCompareFailed = 4 };

struct OutputFile {
  std::string name;  // relative to the output directory
  std::string content;
};

/// Everything a command produced. Files are only written once the command
/// has finished, so a failure leaves no partial output behind.
struct CommandOutput {
  std::vector<OutputFile> files;
  std::string report;  // key=value lines for stdout
  int exit_code = kOk;
};

class Log {
 public:
  explicit Log(bool quiet = false, std::ostream& os = std::cerr) : quiet_(quiet), os_(os) {}
  template <class... T>
  void operator()(const T&... parts) const {
    if (quiet_) return;
    (os_ << ... << parts) << '\n';
  }

 private:
  bool quiet_;
  std::ostream& os_;
};

inline void write_atomic(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary);
    if (!os) throw Error("cannot write " + tmp.string());
    os << content;
    if (!os) throw Error("write failed for " + tmp.string());
  }
  fs::rename(tmp, path);
}

inline void emit(const CommandOutput& out, const std::string& dir) {
  for (const auto& f : out.files) write_atomic(fs::path(dir) / f.name, f.content);
}

inline std::string lower(std::string s) {
  for (char& c : s) c = char(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

inline std::string tag(Polarization pol) { return lower(to_string(pol)); }

inline std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(12) << v;
  return os.str();
}

inline std::string fmt(cplx v) {
  std::ostringstream os;
  os << std::setprecision(12) << v.real() << (v.imag() < 0 ? "-" : "+") << std::abs(v.imag())
     << "i";
  return os.str();
}

/// Collocation angles from the config apply to the configured order only.
inline IbcCoefficients fit_for(const RunConfig& c, Polarization pol, IbcOrder order) {
  std::vector<double> rad;
  const std::size_t want = order == IbcOrder::IBC1 ? 2 : 4;
  if (order == c.order && c.collocation_deg.size() == want)
    for (double a : c.collocation_deg) rad.push_back(deg2rad(a));
  return fit_coefficients(c.coating, pol, c.k0, order, c.fit, rad);
}

inline void require_coating(const RunConfig& c) {
  if (!(c.coating.thickness > 0)) throw ValidationError("coating.d: must be positive for a fit");
}

inline Contour build_contour(const RunConfig& c) {
  if (!c.geometry.present) throw ValidationError("geometry: required for this command");
  if (c.geometry.n_elements < int(kMinElements))
    throw ValidationError("geometry.n_elements: required (at least " +
                          std::to_string(kMinElements) + ")");
  const auto n = std::size_t(c.geometry.n_elements);
  if (c.geometry.kind == GeometryKind::circle)
    return mesh_circle(c.geometry.radius + c.coating.thickness, n);
  return mesh_plate(c.geometry.length, n);
}

inline void add_coating_meta(const RunConfig& c, RcsPattern& p) {
  p.meta["eps_r"] = fmt(c.coating.eps_r);
  p.meta["mu_r"] = fmt(c.coating.mu_r);
  p.meta["d"] = fmt(c.coating.thickness);
  if (c.geometry.present) {
    p.meta["geometry"] = c.geometry.kind == GeometryKind::circle ? "circle" : "plate";
    if (c.geometry.kind == GeometryKind::circle) p.meta["radius"] = fmt(c.geometry.radius);
    else p.meta["length"] = fmt(c.geometry.length);
  }
}

inline std::string rcs_text(const RcsPattern& p) {
  std::ostringstream os;
  write_rcs_csv(os, p);
  return os.str();
}

// ---------------------------------------------------------------------------

inline CommandOutput cmd_impedance_table(const RunConfig& c, const Log& log = Log(true)) {
  require_coating(c);
  CommandOutput out;
  std::ostringstream rep;
  const auto thetas = angle_grid(c.theta_start, c.theta_stop, c.theta_step);
  for (Polarization pol : c.pols) {
    const auto i1 = fit_for(c, pol, IbcOrder::IBC1);
    const auto i2 = fit_for(c, pol, IbcOrder::IBC2);
    const auto rows = impedance_table(c.coating, pol, c.k0, i1, i2, thetas);
    std::ostringstream csv;
    write_impedance_csv(csv, rows);
    out.files.push_back({"impedance_" + tag(pol) + ".csv", csv.str()});
    for (int o = 0; o <= 2; ++o) {
      const double e = max_abs_error(rows, o);
      rep << tag(pol) << ".max_abs_err_ibc" << o << '=' << fmt(e) << '\n';
    }
    log(to_string(pol), ": max |Z_IBC1 - Z_exact| = ", fmt(max_abs_error(rows, 1)), " ohm (",
        to_string(c.fit), ")");
  }
  out.report = rep.str();
  return out;
}

/// SUC and well-posedness report on the physical (i-scaled) coefficients.
inline CommandOutput cmd_check(const RunConfig& c, const Log& log = Log(true)) {
  require_coating(c);
  CommandOutput out;
  std::ostringstream rep;
  for (Polarization pol : c.pols) {
    const std::string p = tag(pol);
    const auto k = fit_for(c, pol, c.order);
    const auto phys = to_physical(k);
    rep << p << ".ibc=" << to_string(c.order) << '\n' << p << ".fit=" << to_string(c.fit) << '\n';
    rep << p << ".a0=" << fmt(phys.a0) << '\n';
    if (c.order == IbcOrder::IBC0) {
      rep << p << ".suc=not applicable\n" << p << ".wellposedness=not applicable\n";
      log(to_string(pol), " IBC0: SUC and well-posedness not applicable");
      continue;
    }
    rep << p << ".a=" << fmt(phys.a) << '\n' << p << ".b=" << fmt(phys.b) << '\n';
    if (c.order == IbcOrder::IBC2)
      rep << p << ".ap=" << fmt(phys.ap) << '\n' << p << ".bp=" << fmt(phys.bp) << '\n';
    const double tol = default_suc_tolerance(phys);
    const SucReport suc =
        c.order == IbcOrder::IBC1 ? suc_check_ibc1(phys, tol) : suc_check_ibc2(phys, tol);
    const SucReport wp = wellposedness_check(phys, tol);
    write_report(rep, p + ".suc", suc);
    write_report(rep, p + ".wellposedness", wp);
    for (const auto& cl : suc.clauses)
      log(to_string(pol), " SUC ", cl.pass ? "pass" : "FAIL", "  ", cl.name, "  (", fmt(cl.lhs),
          ")");
    log(to_string(pol), " well-posedness ", wp.passed ? "pass" : "FAIL", "  (",
        fmt(wp.clauses.front().lhs), ")");
  }
  out.report = rep.str();
  return out;
}

inline std::string currents_text(const SurfaceCurrents& s) {
  std::ostringstream os;
  os << "field,index,re,im\n" << std::setprecision(17);
  for (Eigen::Index i = 0; i < s.j.size(); ++i)
    os << "J," << i << ',' << s.j(i).real() << ',' << s.j(i).imag() << '\n';
  for (Eigen::Index i = 0; i < s.m.size(); ++i)
    os << "M," << i << ',' << s.m(i).real() << ',' << s.m(i).imag() << '\n';
  return os.str();
}

inline CommandOutput cmd_solve(const RunConfig& c, const Log& log = Log(true)) {
  require_coating(c);
  const Contour contour = build_contour(c);
  AssemblyOptions opt;
  opt.field_space = c.p0_field ? SpaceKind::P0_elementwise : SpaceKind::P1_nodal;
  opt.lumped = c.lumped;
  CommandOutput out;
  std::ostringstream rep;
  std::vector<std::pair<std::string, BemSolution>> dumps;
  for (Polarization pol : c.pols) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto coeffs = fit_for(c, pol, c.order);
    const std::string stem = tag(pol) + "_ibc" + std::to_string(int(c.order));
    if (c.order != IbcOrder::IBC0) {
      const auto phys = to_physical(coeffs);
      const double tol = default_suc_tolerance(phys);
      const SucReport suc =
          c.order == IbcOrder::IBC1 ? suc_check_ibc1(phys, tol) : suc_check_ibc2(phys, tol);
      for (const auto& cl : suc.clauses)
        if (!cl.pass) log("warning: ", to_string(pol), " SUC clause fails: ", cl.name);
    }
    RcsPattern p;
    std::optional<BemSolution> sol;
    if (c.sweep.mode == SweepMode::frequency) {
      p = monostatic_frequency_sweep(contour, c.coating, pol, c.order, c.fit, c.sweep.frequencies,
                                     c.sweep.phi_inc, opt);
    } else {
      const auto angles = angle_grid(c.sweep.start, c.sweep.stop, c.sweep.step);
      if (c.sweep.mode == SweepMode::bistatic) {
        sol = bem_solve(contour, coeffs, c.k0, {deg2rad(c.sweep.phi_inc)}, opt);
        p = bistatic_rcs(*sol, contour, angles);
        p.meta["mode"] = "bistatic";
        p.meta["phi_inc"] = fmt(c.sweep.phi_inc);
      } else {
        BemSolution s;
        p = monostatic_sweep(contour, coeffs, c.k0, angles, opt, &s);
        sol = std::move(s);
      }
    }
    p.meta["fit"] = to_string(c.fit);
    add_coating_meta(c, p);
    const double dt =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    out.files.push_back({"rcs_" + stem + ".csv", rcs_text(p)});
    if (sol) {
      out.files.push_back({"currents_" + stem + ".csv", currents_text(sol->currents.front())});
      log(to_string(pol), " ", to_string(c.order), ": ", sol->system.reduced_matrix.rows(),
          " unknowns, rcond ", fmt(sol->factorization.rcond_estimate), ", ", fmt(dt), " s");
      if (sol->factorization.ill_conditioned())
        log("warning: ", to_string(pol), " system is ill-conditioned");
      if (c.dump_matrices) dumps.emplace_back(stem, std::move(*sol));
    } else {
      log(to_string(pol), " ", to_string(c.order), ": ", p.angles.size(), " frequencies, ",
          fmt(dt), " s");
    }
    rep << tag(pol) << ".rcs=rcs_" << stem << ".csv\n";
    rep << tag(pol) << ".geometry_hash=" << p.meta["geometry_hash"] << '\n';
    if (p.meta.count("rcond")) rep << tag(pol) << ".rcond=" << p.meta["rcond"] << '\n';
  }
  out.report = rep.str();
  // matrices are binary and large; written directly but still via rename
  if (c.dump_matrices) {
    for (auto& [stem, s] : dumps) {
      for (const auto& [name, m] :
           {std::pair<std::string, const CMatrix*>{"full", &s.system.full_matrix},
            {"reduced", &s.system.reduced_matrix}}) {
        const fs::path final_path = fs::path(c.out_dir) / ("matrix_" + stem + "_" + name + ".bin");
        fs::create_directories(final_path.parent_path());
        fs::path tmp = final_path;
        tmp += ".tmp";
        dump_matrix(tmp.string(), *m, s.system.meta, name);
        fs::rename(tmp, final_path);
        fs::path js = final_path;
        js += ".json";
        fs::rename(tmp.string() + ".json", js);
      }
    }
  }
  return out;
}

inline CommandOutput cmd_oracle(const RunConfig& c, const Log& log = Log(true)) {
  if (!c.geometry.present || c.geometry.kind != GeometryKind::circle)
    throw ValidationError("geometry: the series solution needs a circle");
  SeriesSolutionSpec s{c.geometry.radius, c.coating.thickness, c.coating.eps_r, c.coating.mu_r,
                       c.k0, c.n_max};
  CommandOutput out;
  std::ostringstream rep;
  for (Polarization pol : c.pols) {
    RcsPattern p;
    if (c.sweep.mode == SweepMode::frequency) {
      p = series_frequency_sweep(s, pol, c.sweep.frequencies);
    } else {
      const auto angles = angle_grid(c.sweep.start, c.sweep.stop, c.sweep.step);
      SeriesDiagnostics diag;
      p = series_coated_cylinder(
          s, pol, angles,
          c.sweep.mode == SweepMode::bistatic ? SeriesMode::bistatic : SeriesMode::monostatic,
          c.sweep.phi_inc, &diag);
      p.meta["mode"] = c.sweep.mode == SweepMode::bistatic ? "bistatic" : "monostatic";
      if (c.sweep.mode == SweepMode::bistatic) p.meta["phi_inc"] = fmt(c.sweep.phi_inc);
      log(to_string(pol), " series: N_max ", diag.n_max, ", tail ", fmt(diag.tail));
      rep << tag(pol) << ".n_max=" << diag.n_max << '\n'
          << tag(pol) << ".truncation_tail=" << fmt(diag.tail) << '\n';
    }
    add_coating_meta(c, p);
    const std::string name = "oracle_" + tag(pol) + ".csv";
    out.files.push_back({name, rcs_text(p)});
    rep << tag(pol) << ".rcs=" << name << '\n';
  }
  out.report = rep.str();
  return out;
}

inline RcsPattern read_rcs_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot read " + path);
  return read_rcs_csv(in);
}

/// Pass when the largest per-angle difference is within the threshold.
inline CommandOutput cmd_compare(const std::string& a, const std::string& b, double threshold_db,
                                 const Log& log = Log(true)) {
  if (!(threshold_db >= 0)) throw ValidationError("threshold must be non-negative");
  const auto r = compare_rcs(read_rcs_file(a), read_rcs_file(b));
  CommandOutput out;
  const bool pass = r.max_abs_db <= threshold_db;
  std::ostringstream rep;
  rep << "max_abs_dB=" << fmt(r.max_abs_db) << '\n'
      << "mean_abs_dB=" << fmt(r.mean_abs_db) << '\n'
      << "fraction_within=" << fmt(r.fraction_within(threshold_db)) << '\n'
      << "threshold_dB=" << fmt(threshold_db) << '\n'
      << "pass=" << (pass ? "true" : "false") << '\n';
  out.report = rep.str();
  out.exit_code = pass ? kOk : kCompareFailed;
  log(pass ? "PASS" : "FAIL", ": max ", fmt(r.max_abs_db), " dB, mean ", fmt(r.mean_abs_db),
      " dB");
  return out;
}

}  // namespace hoibc::cli
