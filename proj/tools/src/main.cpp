// ecbench: sweeps, reports and schedule dumps for the concentration protocols.
//
// Exit codes: 0 success, 2 usage error, 3 numerical failure.

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "ecsim/cli/report.hpp"
#include "ecsim/cli/svg.hpp"
#include "ecsim/cli/sweep.hpp"
#include "ecsim/errors.hpp"
#include "ecsim/locc.hpp"
#include "ecsim/protocols.hpp"

namespace {

using namespace ecsim;
using cli::UsageError;

constexpr int kUsage = 2;
constexpr int kNumerical = 3;

// Flags shared by `sweep` and `compile`.
struct NoiseFlags {
  double a = 0.0;
  double pd = 0.0;
  double pg = 0.0;
  std::string weights;
  std::string convention = "error";
  std::string g = "1";

  void attach(CLI::App* app) {
    app->add_option("--a", a, "coherent error probability");
    app->add_option("--pd", pd, "depolarizing probability of each prepared pair");
    app->add_option("--pg", pg, "depolarizing probability per multi-controlled gate");
    app->add_option("--weights", weights, "relative error weights ex,ez,ey (default equal)");
    app->add_option("--axis-convention", convention, "error (default) or retention (a and p_d read as 1-x)")
        ->check(CLI::IsMember({"error", "retention"}));
    app->add_option("--g", g, "T-transforms per round (integer or 'all')");
  }

  cli::AxisConvention parsed_convention() const { return cli::parse_convention(convention); }

  std::size_t parsed_g() const {
    if (g == "all") return locc::kAllTransforms;
    if (g.empty() || g.find_first_not_of("0123456789") != std::string::npos || std::stoull(g) == 0)
      throw UsageError("--g must be a positive integer or 'all'");
    return static_cast<std::size_t>(std::stoull(g));
  }

  noise::NoiseParams params() const {
    noise::NoiseParams p;
    const bool retention = parsed_convention() == cli::AxisConvention::retention;
    p.a = retention ? 1.0 - a : a;
    p.p_d = retention ? 1.0 - pd : pd;
    p.p_g = pg;
    if (!weights.empty()) {
      std::vector<double> w;
      std::stringstream in(weights);
      std::string item;
      while (std::getline(in, item, ',')) {
        try {
          w.push_back(std::stod(item));
        } catch (const std::exception&) {
          throw UsageError("--weights expects three numbers ex,ez,ey");
        }
      }
      if (w.size() != 3 || w[0] < 0 || w[1] < 0 || w[2] < 0)
        throw UsageError("--weights expects three nonnegative numbers ex,ez,ey");
      const double sum = w[0] + w[1] + w[2];
      if (std::abs(sum - 1.0) > 1e-6) throw UsageError("--weights must sum to 1");
      p.depolarizing = {w[0] / sum, w[1] / sum, w[2] / sum};
      p.coherent = {std::sqrt(w[0] / sum), std::sqrt(w[1] / sum), std::sqrt(w[2] / sum)};
    }
    try {
      p.validate();
    } catch (const DomainError& e) {
      throw UsageError(e.what());
    }
    return p;
  }
};

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw UsageError("cannot open '" + path + "' for writing");
  f << text;
  if (!f) throw UsageError("failed writing '" + path + "'");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ecbench: entanglement-concentration benchmarks"};
  app.set_config("--config", "", "read options from a TOML/INI file");
  app.require_subcommand(1);

  // sweep
  auto* sweep = app.add_subcommand("sweep", "sweep one noise parameter and write CSV (and optional SVG/JSON)");
  NoiseFlags sweep_noise;
  sweep_noise.attach(sweep);
  std::string protocols, axis = "p_d", range, out = "-", svg, json;
  bool recompile = false;
  std::size_t threads = 0;
  sweep->add_option("--protocols", protocols, "comma list of nec,cec,catalyst-reuse,distillation")->required();
  sweep->add_option("--axis", axis, "swept parameter: a, p_d or p_g");
  sweep->add_option("--range", range, "lo:hi:step")->required();
  sweep->add_option("--out", out, "CSV output path ('-' for stdout)");
  sweep->add_option("--svg", svg, "SVG plot output path");
  sweep->add_option("--json", json, "JSON result document path");
  sweep->add_flag("--recompile-on-reuse", recompile, "recompile the reuse schedule for the deteriorated catalyst");
  sweep->add_option("--threads", threads, "worker threads (0: all cores)");

  // report
  auto* report = app.add_subcommand("report", "summarize sweep CSV files");
  std::vector<std::string> files;
  report->add_option("files", files, "CSV files")->required();

  // compile
  auto* compile = app.add_subcommand("compile", "dump the compiled protocol schedule as JSON");
  NoiseFlags compile_noise;
  compile_noise.attach(compile);
  std::string which = "nec", compile_out = "-";
  compile->add_option("--protocol", which, "nec or cec")->check(CLI::IsMember({"nec", "cec"}));
  compile->add_option("--out", compile_out, "output path ('-' for stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (sweep->parsed()) {
      cli::SweepConfig cfg;
      cfg.protocols = cli::parse_protocols(protocols);
      cfg.axis = cli::parse_axis(axis);
      cfg.range = cli::Range::parse(range);
      cfg.convention = sweep_noise.parsed_convention();
      cfg.base = sweep_noise.params();
      cfg.ttransforms_per_round = sweep_noise.parsed_g();
      cfg.recompile_on_reuse = recompile;
      cfg.threads = threads;
      cfg.validate();
      const auto rows = cli::run_sweep(cfg);
      std::ostringstream csv;
      cli::write_csv(csv, rows, cfg.axis, cfg.convention);
      write_text(out, csv.str());
      if (!svg.empty()) write_text(svg, cli::render_svg(rows, cfg.axis, cfg.convention));
      if (!json.empty()) write_text(json, cli::to_json(cfg, rows).dump(2) + "\n");
    } else if (report->parsed()) {
      for (const auto& path : files) {
        std::ifstream f(path);
        if (!f) throw UsageError("cannot open '" + path + "'");
        const auto table = cli::read_csv(f);
        if (files.size() > 1) std::cout << "== " << path << '\n';
        std::cout << cli::render(cli::summarize(table), table);
      }
    } else if (compile->parsed()) {
      const auto params = compile_noise.params();
      const auto g = compile_noise.parsed_g();
      const auto rho = noise::prepare_state(params);
      nlohmann::json doc{{"protocol", which}, {"a", params.a}, {"p_d", params.p_d}};
      if (which == "nec") {
        doc["schedule"] = locc::to_json(protocols::nec_schedule(rho, rho, g));
      } else {
        const auto cat = protocols::best_catalyst(rho, rho);
        doc["catalyst_schmidt"] = cat.schmidt.values();
        doc["schedule"] = locc::to_json(protocols::cec_schedule(rho, rho, cat, g));
      }
      write_text(compile_out, doc.dump(2) + "\n");
    }
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kNumerical;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kNumerical;
  }
  return 0;
}
