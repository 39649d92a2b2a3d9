#pragma once

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "hoibc/errors.hpp"
#include "hoibc/impedance.hpp"

namespace hoibc {

enum class GeometryKind { circle, plate };
enum class SweepMode { bistatic, monostatic, frequency };

struct GeometryConfig {
  bool present = false;
  GeometryKind kind = GeometryKind::circle;
  double radius = 0;  // inner conductor radius; the mesh sits on radius + d
  double length = 0;  // plate length
  int n_elements = 0;
};

struct SweepConfig {
  SweepMode mode = SweepMode::bistatic;
  double start = 0, stop = 359, step = 1;  // degrees
  double phi_inc = 0;                      // degrees
  std::vector<double> frequencies;         // Hz, frequency mode only
};

struct RunConfig {
  GeometryConfig geometry;
  CoatingSpec coating;
  double k0 = 0;
  double frequency = 0;  // Hz, derived from k0 when k0 was given
  std::vector<Polarization> pols{Polarization::TE};
  IbcOrder order = IbcOrder::IBC1;
  FitMethod fit = FitMethod::pade;
  std::vector<double> collocation_deg;  // empty: defaults
  SweepConfig sweep;
  double theta_start = 0, theta_stop = 89, theta_step = 1;
  int n_max = -1;
  bool p0_field = false;
  bool lumped = false;
  bool dump_matrices = false;
  std::string out_dir = "out";

  double lambda0() const { return 2 * kPi / k0; }
};

namespace detail {

using nlohmann::json;

// Collects every problem before throwing so the user sees them all at once.
class Issues {
 public:
  void add(const std::string& field, const std::string& msg) { list_.push_back(field + ": " + msg); }
  bool empty() const { return list_.empty(); }
  void raise() const {
    if (list_.empty()) return;
    std::ostringstream os;
    os << "invalid configuration (" << list_.size() << " problem" << (list_.size() > 1 ? "s" : "")
       << ")";
    for (const auto& s : list_) os << "\n  " << s;
    throw ValidationError(os.str());
  }

 private:
  std::vector<std::string> list_;
};

inline std::optional<double> number(const json& j, const std::string& key, const std::string& path,
                                    Issues& is) {
  if (!j.contains(key)) return std::nullopt;
  if (!j[key].is_number()) {
    is.add(path + key, "expected a number");
    return std::nullopt;
  }
  const double v = j[key].get<double>();
  if (!std::isfinite(v)) {
    is.add(path + key, "not finite");
    return std::nullopt;
  }
  return v;
}

// A length may be given in meters as `key` or in wavelengths as `key_lambda0`
// when lambda0_reference is present.
inline std::optional<double> length(const json& j, const std::string& key, const std::string& path,
                                    std::optional<double> lambda_ref, Issues& is) {
  const auto m = number(j, key, path, is);
  const auto w = number(j, key + "_lambda0", path, is);
  if (m && w) {
    is.add(path + key, "given both in meters and in wavelengths");
    return std::nullopt;
  }
  if (w) {
    if (!lambda_ref) {
      is.add(path + key + "_lambda0", "needs lambda0_reference");
      return std::nullopt;
    }
    return *w * *lambda_ref;
  }
  return m;
}

inline std::optional<cplx> complex_value(const json& j, const std::string& key,
                                         const std::string& path, Issues& is) {
  if (!j.contains(key)) return std::nullopt;
  const json& v = j[key];
  if (v.is_number()) return cplx(v.get<double>(), 0.0);
  if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number())
    return cplx(v[0].get<double>(), v[1].get<double>());
  is.add(path + key, "expected a number or [re, im]");
  return std::nullopt;
}

inline std::optional<std::string> text(const json& j, const std::string& key,
                                       const std::string& path, Issues& is) {
  if (!j.contains(key)) return std::nullopt;
  if (!j[key].is_string()) {
    is.add(path + key, "expected a string");
    return std::nullopt;
  }
  return j[key].get<std::string>();
}

inline void unknown_keys(const json& j, std::initializer_list<const char*> allowed,
                         const std::string& path, Issues& is) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || it.key() == a;
    if (!ok) is.add(path + it.key(), "unknown key");
  }
}

}  // namespace detail

inline std::optional<Polarization> parse_polarization(const std::string& s) {
  if (s == "te" || s == "TE") return Polarization::TE;
  if (s == "tm" || s == "TM") return Polarization::TM;
  return std::nullopt;
}

inline std::optional<FitMethod> parse_fit_method(const std::string& s) {
  if (s == "taylor") return FitMethod::taylor;
  if (s == "pade") return FitMethod::pade;
  if (s == "collocation") return FitMethod::collocation;
  return std::nullopt;
}

inline RunConfig parse_config(const nlohmann::json& j) {
  using detail::json;
  detail::Issues is;
  RunConfig c;
  if (!j.is_object()) {
    is.add("<root>", "expected an object");
    is.raise();
  }
  detail::unknown_keys(j,
                       {"geometry", "coating", "frequency", "k0", "lambda0_reference",
                        "polarization", "ibc", "sweep", "impedance_table", "oracle", "solver",
                        "output", "comment"},
                       "", is);

  const auto lref = detail::number(j, "lambda0_reference", "", is);
  if (lref && !(*lref > 0)) is.add("lambda0_reference", "must be positive");

  // frequency or k0, exactly one
  const auto f = detail::number(j, "frequency", "", is);
  const auto k = detail::number(j, "k0", "", is);
  if (f && k)
    is.add("frequency", "give exactly one of frequency and k0");
  else if (!f && !k)
    is.add("frequency", "one of frequency and k0 is required");
  else if (f) {
    if (!(*f > 0)) is.add("frequency", "must be positive");
    c.frequency = *f;
    c.k0 = 2 * kPi * *f / kSpeedOfLight;
  } else {
    if (!(*k > 0)) is.add("k0", "must be positive");
    c.k0 = *k;
    c.frequency = *k * kSpeedOfLight / (2 * kPi);
  }

  if (j.contains("coating") && j["coating"].is_object()) {
    const json& cj = j["coating"];
    detail::unknown_keys(cj, {"eps_r", "mu_r", "d", "d_lambda0"}, "coating.", is);
    c.coating.eps_r = detail::complex_value(cj, "eps_r", "coating.", is).value_or(1.0);
    c.coating.mu_r = detail::complex_value(cj, "mu_r", "coating.", is).value_or(1.0);
    const auto d = detail::length(cj, "d", "coating.", lref, is);
    if (!d)
      is.add("coating.d", "required");
    else if (!(*d >= 0))
      is.add("coating.d", "must not be negative");
    else
      c.coating.thickness = *d;
    // exp(+i omega t): passive media have non-positive imaginary parts
    if (c.coating.eps_r.imag() > 0)
      is.add("coating.eps_r", "Im(eps_r) must be <= 0 under the exp(+i omega t) convention");
    if (c.coating.mu_r.imag() > 0)
      is.add("coating.mu_r", "Im(mu_r) must be <= 0 under the exp(+i omega t) convention");
    if (c.coating.eps_r.real() == 0 && c.coating.eps_r.imag() == 0)
      is.add("coating.eps_r", "must be nonzero");
    if (c.coating.mu_r.real() == 0 && c.coating.mu_r.imag() == 0)
      is.add("coating.mu_r", "must be nonzero");
  } else {
    is.add("coating", "required object");
  }

  if (j.contains("geometry")) {
    const json& g = j["geometry"];
    if (!g.is_object()) {
      is.add("geometry", "expected an object");
    } else {
      c.geometry.present = true;
      detail::unknown_keys(g, {"kind", "radius", "radius_lambda0", "length", "length_lambda0",
                               "n_elements"},
                           "geometry.", is);
      const auto kind = detail::text(g, "kind", "geometry.", is).value_or("circle");
      if (kind == "circle") {
        c.geometry.kind = GeometryKind::circle;
        const auto r = detail::length(g, "radius", "geometry.", lref, is);
        if (!r || !(*r > 0))
          is.add("geometry.radius", "positive radius required");
        else
          c.geometry.radius = *r;
      } else if (kind == "plate") {
        c.geometry.kind = GeometryKind::plate;
        const auto l = detail::length(g, "length", "geometry.", lref, is);
        if (l && !(*l > 0)) is.add("geometry.length", "must be positive");
        // default plate length is five free-space wavelengths
        c.geometry.length = l ? *l : (c.k0 > 0 ? 5 * c.lambda0() : 0.0);
      } else {
        is.add("geometry.kind", "expected circle or plate");
      }
      if (g.contains("n_elements")) {
        if (!g["n_elements"].is_number_integer())
          is.add("geometry.n_elements", "expected an integer");
        else
          c.geometry.n_elements = g["n_elements"].get<int>();
      }
      if (g.contains("n_elements") && c.geometry.n_elements < int(kMinElements))
        is.add("geometry.n_elements", "at least " + std::to_string(kMinElements) + " required");
    }
  }

  if (j.contains("polarization")) {
    const auto p = detail::text(j, "polarization", "", is);
    if (p == "both")
      c.pols = {Polarization::TE, Polarization::TM};
    else if (p && parse_polarization(*p))
      c.pols = {*parse_polarization(*p)};
    else if (p)
      is.add("polarization", "expected te, tm or both");
  }

  if (j.contains("ibc")) {
    const json& b = j["ibc"];
    detail::unknown_keys(b, {"order", "fit_method", "collocation_angles"}, "ibc.", is);
    if (b.contains("order")) {
      const json& o = b["order"];
      if (o.is_number_integer() && o.get<int>() >= 0 && o.get<int>() <= 2)
        c.order = static_cast<IbcOrder>(o.get<int>());
      else
        is.add("ibc.order", "expected 0, 1 or 2");
    }
    if (const auto m = detail::text(b, "fit_method", "ibc.", is)) {
      if (const auto fm = parse_fit_method(*m))
        c.fit = *fm;
      else
        is.add("ibc.fit_method", "expected taylor, pade or collocation");
    }
    if (b.contains("collocation_angles")) {
      const json& a = b["collocation_angles"];
      bool ok = a.is_array();
      for (const auto& v : a) ok = ok && v.is_number() && v.get<double>() > 0 && v.get<double>() < 90;
      if (!ok)
        is.add("ibc.collocation_angles", "expected a list of angles in (0, 90) degrees");
      else
        c.collocation_deg = a.get<std::vector<double>>();
    }
  }
  if (!c.collocation_deg.empty() && c.fit == FitMethod::collocation && c.order != IbcOrder::IBC0) {
    const std::size_t want = c.order == IbcOrder::IBC1 ? 2 : 4;
    if (c.collocation_deg.size() != want)
      is.add("ibc.collocation_angles", "IBC" + std::to_string(int(c.order)) + " needs " +
                                           std::to_string(want) + " angles");
  }

  if (j.contains("sweep")) {
    const json& s = j["sweep"];
    detail::unknown_keys(s, {"mode", "start", "stop", "step", "phi_inc", "frequencies"}, "sweep.",
                         is);
    const auto mode = detail::text(s, "mode", "sweep.", is).value_or("bistatic");
    if (mode == "bistatic")
      c.sweep.mode = SweepMode::bistatic;
    else if (mode == "monostatic")
      c.sweep.mode = SweepMode::monostatic;
    else if (mode == "frequency")
      c.sweep.mode = SweepMode::frequency;
    else
      is.add("sweep.mode", "expected bistatic, monostatic or frequency");
    c.sweep.start = detail::number(s, "start", "sweep.", is).value_or(c.sweep.start);
    c.sweep.stop = detail::number(s, "stop", "sweep.", is).value_or(c.sweep.stop);
    c.sweep.step = detail::number(s, "step", "sweep.", is).value_or(c.sweep.step);
    c.sweep.phi_inc = detail::number(s, "phi_inc", "sweep.", is).value_or(0.0);
    if (!(c.sweep.step > 0)) is.add("sweep.step", "must be positive");
    if (!(c.sweep.stop >= c.sweep.start)) is.add("sweep.stop", "must not be below start");
    if (s.contains("frequencies")) {
      const json& fr = s["frequencies"];
      bool ok = fr.is_array() && !fr.empty();
      for (const auto& v : fr) ok = ok && v.is_number() && v.get<double>() > 0;
      if (!ok)
        is.add("sweep.frequencies", "expected a non-empty list of positive frequencies");
      else
        c.sweep.frequencies = fr.get<std::vector<double>>();
    }
    if (c.sweep.mode == SweepMode::frequency && c.sweep.frequencies.empty())
      is.add("sweep.frequencies", "required for a frequency sweep");
    for (std::size_t i = 1; i < c.sweep.frequencies.size(); ++i)
      if (!(c.sweep.frequencies[i] > c.sweep.frequencies[i - 1]))
        is.add("sweep.frequencies", "must be strictly increasing");
  }

  if (j.contains("impedance_table")) {
    const json& t = j["impedance_table"];
    detail::unknown_keys(t, {"theta_start", "theta_stop", "theta_step"}, "impedance_table.", is);
    c.theta_start = detail::number(t, "theta_start", "impedance_table.", is).value_or(c.theta_start);
    c.theta_stop = detail::number(t, "theta_stop", "impedance_table.", is).value_or(c.theta_stop);
    c.theta_step = detail::number(t, "theta_step", "impedance_table.", is).value_or(c.theta_step);
    if (!(c.theta_step > 0)) is.add("impedance_table.theta_step", "must be positive");
    if (c.theta_start < 0 || c.theta_stop >= 90 || c.theta_stop < c.theta_start)
      is.add("impedance_table.theta_stop", "need 0 <= theta_start <= theta_stop < 90");
  }

  if (j.contains("oracle")) {
    const json& o = j["oracle"];
    detail::unknown_keys(o, {"n_max"}, "oracle.", is);
    if (o.contains("n_max")) {
      if (!o["n_max"].is_number_integer() || o["n_max"].get<int>() < 0)
        is.add("oracle.n_max", "expected a non-negative integer");
      else
        c.n_max = o["n_max"].get<int>();
    }
  }

  if (j.contains("solver")) {
    const json& s = j["solver"];
    detail::unknown_keys(s, {"field_space", "lumped", "dump_matrices"}, "solver.", is);
    if (const auto fs = detail::text(s, "field_space", "solver.", is)) {
      if (*fs == "P0")
        c.p0_field = true;
      else if (*fs != "P1")
        is.add("solver.field_space", "expected P1 or P0");
    }
    for (const char* key : {"lumped", "dump_matrices"}) {
      if (!s.contains(key)) continue;
      if (!s[key].is_boolean())
        is.add(std::string("solver.") + key, "expected true or false");
      else
        (std::string(key) == "lumped" ? c.lumped : c.dump_matrices) = s[key].get<bool>();
    }
  }

  if (j.contains("output")) {
    const json& o = j["output"];
    detail::unknown_keys(o, {"dir"}, "output.", is);
    if (const auto d = detail::text(o, "dir", "output.", is)) c.out_dir = *d;
  }

  is.raise();
  return c;
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot read config " + path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in, nullptr, true, true);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError(path + ": " + e.what());
  }
  return parse_config(j);
}

}  // namespace hoibc
