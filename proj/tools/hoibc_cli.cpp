#include <CLI11.hpp>

#include <iostream>

#include "hoibc/cli.hpp"

using namespace hoibc;
using namespace hoibc::cli;

namespace {

struct Overrides {
  std::string config, out, pol, fit;
  int ibc = -1;
  bool quiet = false;
};

RunConfig load(const Overrides& o) {
  if (o.config.empty()) throw ValidationError("--config is required");
  RunConfig c = load_config(o.config);
  if (!o.out.empty()) c.out_dir = o.out;
  if (!o.pol.empty()) c.pols = {*parse_polarization(o.pol)};
  if (o.ibc >= 0) c.order = static_cast<IbcOrder>(o.ibc);
  if (!o.fit.empty()) c.fit = *parse_fit_method(o.fit);
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Impedance boundary condition fitting and 2D scattering"};
  app.require_subcommand(1);
  app.fallthrough();

  Overrides o;
  app.add_option("--config", o.config, "JSON run configuration");
  app.add_option("--out", o.out, "output directory (overrides output.dir)");
  app.add_option("--pol", o.pol, "polarization")->check(CLI::IsMember({"te", "tm"}));
  app.add_option("--ibc", o.ibc, "IBC order")->check(CLI::Range(0, 2));
  app.add_option("--fit", o.fit, "fit method")
      ->check(CLI::IsMember({"taylor", "pade", "collocation"}));
  app.add_flag("--quiet", o.quiet, "no progress or diagnostic output");

  auto* table = app.add_subcommand("impedance-table", "exact and fitted impedance versus angle");
  auto* check = app.add_subcommand("check", "uniqueness and well-posedness report");
  auto* solve = app.add_subcommand("solve", "BEM solve and echo width");
  auto* oracle = app.add_subcommand("oracle", "series solution for the coated cylinder");
  auto* compare = app.add_subcommand("compare", "compare two RCS files");
  std::string file_a, file_b;
  double threshold = 1.0;
  compare->add_option("a", file_a, "first RCS CSV")->required();
  compare->add_option("b", file_b, "second RCS CSV")->required();
  compare->add_option("--threshold", threshold, "dB tolerance on the largest difference");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kValidation;
  }

  const Log log(o.quiet);
  try {
    CommandOutput out;
    std::string dir;
    if (compare->parsed()) {
      out = cmd_compare(file_a, file_b, threshold, log);
    } else {
      const RunConfig c = load(o);
      dir = c.out_dir;
      if (table->parsed()) out = cmd_impedance_table(c, log);
      else if (check->parsed()) out = cmd_check(c, log);
      else if (solve->parsed()) out = cmd_solve(c, log);
      else if (oracle->parsed()) out = cmd_oracle(c, log);
    }
    emit(out, dir);
    std::cout << out.report;
    for (const auto& f : out.files) log("wrote ", (std::filesystem::path(dir) / f.name).string());
    return out.exit_code;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kValidation;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kValidation;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return kNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kOtherError;
  }
}
