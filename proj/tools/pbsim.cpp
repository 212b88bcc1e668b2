// pbsim: sweep driver for the hybrid atom-optomechanical phonon-blockade models.
//
//   pbsim simulate   --config <file> --out <csv>
//   pbsim optimum    --config <file> [--no-refine]
//   pbsim boundaries --config <file>
//   pbsim presets list
//   pbsim presets run <name> [--out-dir <dir>]
//
// Exit codes: 0 success, 2 configuration or I/O error, 3 solver error.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "pbsim/config.hpp"
#include "pbsim/sweep.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitSolver = 3;

namespace fs = std::filesystem;

fs::path output_path(const fs::path& requested, const pbsim::SweepSpec& spec, std::size_t runs) {
  if (runs == 1) return requested;
  auto p = requested;
  p.replace_filename(requested.stem().string() + "_" + spec.name + requested.extension().string());
  return p;
}

// Validity warnings for the fixed parameters of a run; the swept axis is not checked point by point.
void warn_validity(const pbsim::SweepSpec& spec) {
  const auto warnings = spec.model() == pbsim::ModelKind::one_cavity ? pbsim::one_cavity_warnings(spec.fixed.one)
                                                                     : pbsim::two_cavity_warnings(spec.fixed.two);
  for (const auto& w : warnings) std::fprintf(stderr, "warning: %s: %s\n", spec.name.c_str(), w.c_str());
}

void run_and_write(const std::vector<pbsim::SweepSpec>& specs, const fs::path& out, unsigned threads) {
  for (const auto& spec : specs) {
    warn_validity(spec);
    const auto t0 = std::chrono::steady_clock::now();
    const auto rows = pbsim::run_sweep(spec, threads);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const auto path = output_path(out, spec, specs.size());
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    pbsim::emit_csv(rows, path.string());
    std::size_t failed = 0;
    for (const auto& r : rows) failed += r.ok() ? 0 : 1;
    std::printf("%s: %zu rows (%zu failed) in %.2f s -> %s\n", spec.name.c_str(), rows.size(), failed, secs,
                path.string().c_str());
    for (const auto& r : rows)
      if (!r.ok()) std::fprintf(stderr, "  %s at %s=%.6g: %s\n", spec.name.c_str(), spec.axis.c_str(), r.axis_value,
                                r.error.c_str());
  }
}

double coupling_of(const pbsim::ModelParams& p) {
  return p.model == pbsim::ModelKind::one_cavity ? pbsim::one_cavity_coupling(p.one) : pbsim::two_cavity_coupling(p.two);
}

double optimum_prediction(const pbsim::ModelParams& p) {
  return p.model == pbsim::ModelKind::one_cavity
             ? pbsim::optimal_coupling(p.one.kappa, p.one.gamma_tri)
             : pbsim::optimal_coupling(p.two.kappa, pbsim::two_cavity_tripartite_rate(p.two));
}

void print_optimum(const std::vector<pbsim::SweepSpec>& specs, bool refine, unsigned threads) {
  for (const auto& spec : specs) {
    warn_validity(spec);
    const auto opt = pbsim::find_optimum(spec, refine, threads);
    const auto p = spec.params_at(opt.axis_value);
    std::printf("%s: %s=%.10g g2=%.10g log10_g2=%.6f coupling=%.8g predicted_optimal_coupling=%.8g\n",
                spec.name.c_str(), spec.axis.c_str(), opt.axis_value, opt.g2, std::log10(opt.g2), coupling_of(p),
                optimum_prediction(p));
  }
}

void print_boundaries(const std::vector<pbsim::SweepSpec>& specs, unsigned threads) {
  for (const auto& spec : specs) {
    warn_validity(spec);
    const auto report = pbsim::locate_region_boundaries(spec, threads);
    std::printf("%s: %zu regions\n", spec.name.c_str(), report.sequence.size());
    for (const auto& o : report.sequence) {
      const auto letter = pbsim::table_region(o);
      std::printf("  region %c  %s\n", letter ? *letter : '?', o.c_str());
    }
    for (const auto& b : report.boundaries)
      std::printf("  boundary %s=%.6f  %s (%s) -> %s (%s)\n", spec.axis.c_str(), b.axis_value, b.left_ordering.c_str(),
                  b.left_region.c_str(), b.right_ordering.c_str(), b.right_region.c_str());
    for (const auto& w : report.warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Phonon-blockade master-equation sweeps"};
  app.require_subcommand(1);

  unsigned threads = pbsim::sweep_threads();
  app.add_option("--threads", threads, "Worker threads (default: PB_SIM_THREADS or hardware concurrency)")
      ->check(CLI::PositiveNumber);

  std::string config, out, out_dir = "results", preset;
  bool no_refine = false;

  auto* simulate = app.add_subcommand("simulate", "Run the sweep(s) in a config and write CSV");
  simulate->add_option("--config", config, "JSON config")->required();
  simulate->add_option("--out", out, "Output CSV path")->required();

  auto* optimum = app.add_subcommand("optimum", "Locate the g2 minimum along the sweep axis");
  optimum->add_option("--config", config, "JSON config")->required();
  optimum->add_flag("--no-refine", no_refine, "Report the coarse grid minimum only");

  auto* boundaries = app.add_subcommand("boundaries", "Locate correlation-ordering region boundaries");
  boundaries->add_option("--config", config, "JSON config")->required();

  auto* presets = app.add_subcommand("presets", "Shipped presets");
  presets->require_subcommand(1);
  auto* presets_list = presets->add_subcommand("list", "List preset names");
  auto* presets_run = presets->add_subcommand("run", "Run a preset and write its CSVs");
  presets_run->add_option("name", preset, "Preset name")->required();
  presets_run->add_option("--out-dir", out_dir, "Directory for CSV output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*simulate) {
      run_and_write(pbsim::load_config(config), out, threads);
    } else if (*optimum) {
      print_optimum(pbsim::load_config(config), !no_refine, threads);
    } else if (*boundaries) {
      print_boundaries(pbsim::load_config(config), threads);
    } else if (*presets_list) {
      for (const auto& name : pbsim::list_presets()) std::printf("%s\n", name.c_str());
    } else if (*presets_run) {
      const auto specs = pbsim::load_preset(preset);
      for (const auto& spec : specs) run_and_write({spec}, fs::path(out_dir) / (spec.name + ".csv"), threads);
    }
  } catch (const pbsim::InputError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitConfig;
  } catch (const pbsim::SolverError& e) {
    std::fprintf(stderr, "solver error: %s\n", e.what());
    return kExitSolver;
  } catch (const fs::filesystem_error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitConfig;
  }
  return 0;
}
