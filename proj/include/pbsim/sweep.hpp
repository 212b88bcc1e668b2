#pragma once

// Batch engine behind the CLI: one steady-state (or trajectory) evaluation per
// grid point, deterministic row order, failures recorded in-row.

#include <algorithm>
#include <atomic>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "pbsim/errors.hpp"
#include "pbsim/hilbert.hpp"
#include "pbsim/liouvillian.hpp"
#include "pbsim/models.hpp"
#include "pbsim/observables.hpp"
#include "pbsim/optimize.hpp"
#include "pbsim/solvers.hpp"

namespace pbsim {

enum class ModelKind { one_cavity, two_cavity_reduced, two_cavity_full };

inline std::string_view to_string(ModelKind m) {
  switch (m) {
    case ModelKind::one_cavity: return "one_cavity";
    case ModelKind::two_cavity_reduced: return "two_cavity_reduced";
    case ModelKind::two_cavity_full: return "two_cavity_full";
  }
  return "one_cavity";
}

inline std::optional<ModelKind> model_from_string(std::string_view s) {
  for (auto m : {ModelKind::one_cavity, ModelKind::two_cavity_reduced, ModelKind::two_cavity_full})
    if (to_string(m) == s) return m;
  return std::nullopt;
}

/// Parameters for whichever model a sweep uses; the other member is ignored.
struct ModelParams {
  ModelKind model = ModelKind::one_cavity;
  OneCavityParams one{};
  TwoCavityParams two{};

  std::size_t n_trunc() const { return model == ModelKind::one_cavity ? one.n_trunc : two.n_trunc; }
  std::size_t hilbert_dim() const { return 2 * n_trunc(); }
};

inline constexpr std::string_view kTimeAxis = "t";

/// Names of the numeric fields a sweep axis (or a config "params" key) may address.
inline std::vector<std::string_view> axis_names(ModelKind m) {
  if (m == ModelKind::one_cavity)
    return {"kappa", "gamma_m", "gamma_c", "gamma_tri", "omega_m", "delta_c", "omega_drive", "eps", "delta", "n_bth"};
  return {"g", "g0", "J", "Jm", "omega_m", "n_plus", "n_minus", "eps", "kappa", "gamma_m", "g_prime"};
}

/// Sets one named field. "g_prime" adjusts n_plus so that G' takes the value at fixed n_minus.
inline void set_parameter(ModelParams& p, std::string_view name, double value) {
  if (p.model == ModelKind::one_cavity) {
    auto& o = p.one;
    if (name == "kappa") o.kappa = value;
    else if (name == "gamma_m") o.gamma_m = value;
    else if (name == "gamma_c") o.gamma_c = value;
    else if (name == "gamma_tri") o.gamma_tri = value;
    else if (name == "omega_m") o.omega_m = value;
    else if (name == "delta_c") o.delta_c = value;
    else if (name == "omega_drive") o.omega_drive = value;
    else if (name == "eps") o.eps = value;
    else if (name == "delta") o.delta = value;
    else if (name == "n_bth") o.n_bth = value;
    else throw ConfigError("unknown one_cavity parameter '" + std::string(name) + "'");
    return;
  }
  auto& t = p.two;
  if (name == "g") t.g = value;
  else if (name == "g0") t.g0 = value;
  else if (name == "J") t.J = value;
  else if (name == "Jm") t.Jm = value;
  else if (name == "omega_m") t.omega_m = value;
  else if (name == "n_plus") t.n_plus = value;
  else if (name == "n_minus") t.n_minus = value;
  else if (name == "eps") t.eps = value;
  else if (name == "kappa") t.kappa = value;
  else if (name == "gamma_m") t.gamma_m = value;
  else if (name == "g_prime") t.n_plus = n_plus_for_coupling(t, value);
  else throw ConfigError("unknown two-cavity parameter '" + std::string(name) + "'");
}

struct SolverSettings {
  std::size_t dim_cap = 64;
  /// Golden-section bracket width as a fraction of the sweep range.
  double refine_tol = 1e-5;
  /// Bisection width for region boundaries, in axis units.
  double boundary_tol = 1e-4;
  double occupation_floor = kOccupationFloor;
  EvolveOptions evolve{};
};

struct SweepSpec {
  std::string name = "sweep";
  std::string axis = "delta";
  double lo = 0.0;
  double hi = 1.0;
  std::size_t points = 2;
  ModelParams fixed{};
  std::vector<std::string> outputs{"mean_phonon", "g2", "g3", "g4", "region"};
  SolverSettings solver{};

  ModelKind model() const noexcept { return fixed.model; }
  bool is_time_sweep() const noexcept { return axis == kTimeAxis; }

  void validate() const {
    if (!(lo < hi)) throw ConfigError("sweep '" + name + "': range needs lo < hi");
    if (points < 2) throw ConfigError("sweep '" + name + "': need at least 2 points");
    if (is_time_sweep()) {
      if (lo < 0) throw ConfigError("sweep '" + name + "': time axis must start at t >= 0");
    } else {
      if (model() == ModelKind::two_cavity_full)
        throw ConfigError("sweep '" + name + "': two_cavity_full is time-dependent and only supports the 't' axis");
      const auto names = axis_names(model());
      if (std::find(names.begin(), names.end(), axis) == names.end())
        throw ConfigError("sweep '" + name + "': axis '" + axis + "' is not a parameter of " +
                          std::string(to_string(model())));
    }
    for (const auto& o : outputs)
      if (o != "mean_phonon" && o != "g2" && o != "g3" && o != "g4" && o != "region")
        throw ConfigError("sweep '" + name + "': unknown output '" + o + "'");
    if (fixed.hilbert_dim() > solver.dim_cap)
      throw ConfigError("sweep '" + name + "': Hilbert dimension " + std::to_string(fixed.hilbert_dim()) +
                        " exceeds the cap " + std::to_string(solver.dim_cap));
    try {
      if (model() == ModelKind::one_cavity)
        fixed.one.validate();
      else
        fixed.two.validate();
    } catch (const InputError& e) {
      throw ConfigError("sweep '" + name + "': " + e.what());
    }
  }

  std::vector<double> grid() const {
    std::vector<double> g(points);
    for (std::size_t k = 0; k < points; ++k)
      g[k] = k + 1 == points ? hi : lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(points - 1);
    return g;
  }

  ModelParams params_at(double axis_value) const {
    ModelParams p = fixed;
    if (!is_time_sweep()) set_parameter(p, axis, axis_value);
    return p;
  }
};

struct ResultRow {
  double axis_value = 0;
  double mean_phonon = std::numeric_limits<double>::quiet_NaN();
  double g2 = std::numeric_limits<double>::quiet_NaN();
  double g3 = std::numeric_limits<double>::quiet_NaN();
  double g4 = std::numeric_limits<double>::quiet_NaN();
  double log10_g2 = std::numeric_limits<double>::quiet_NaN();
  double log10_g3 = std::numeric_limits<double>::quiet_NaN();
  double log10_g4 = std::numeric_limits<double>::quiet_NaN();
  std::string region_label = "error";
  std::string ordering;
  std::string error;

  bool ok() const noexcept { return error.empty(); }

  static ResultRow from_report(double axis_value, const CorrelationReport& r) {
    ResultRow row;
    row.axis_value = axis_value;
    row.mean_phonon = r.mean_phonon;
    row.g2 = r.g2;
    row.g3 = r.g3;
    row.g4 = r.g4;
    row.log10_g2 = std::log10(r.g2);
    row.log10_g3 = std::log10(r.g3);
    row.log10_g4 = std::log10(r.g4);
    row.region_label = std::string(to_string(r.region));
    row.ordering = r.ordering;
    return row;
  }

  static ResultRow failure(double axis_value, std::string message) {
    ResultRow row;
    row.axis_value = axis_value;
    row.error = std::move(message);
    return row;
  }
};

/// Hamiltonian and dissipators of a time-independent model.
inline Liouvillian model_liouvillian(const ModelParams& p) {
  switch (p.model) {
    case ModelKind::one_cavity:
      return build_liouvillian(build_one_cavity_hamiltonian(p.one), one_cavity_channels(p.one));
    case ModelKind::two_cavity_reduced:
      return build_liouvillian(build_two_cavity_hamiltonian_reduced(p.two), two_cavity_channels(p.two));
    case ModelKind::two_cavity_full:
      break;
  }
  throw ConfigError("two_cavity_full has no time-independent Liouvillian");
}

inline TimeDependentOperator model_hamiltonian(const ModelParams& p) {
  switch (p.model) {
    case ModelKind::one_cavity: return TimeDependentOperator{build_one_cavity_hamiltonian(p.one)};
    case ModelKind::two_cavity_reduced: return TimeDependentOperator{build_two_cavity_hamiltonian_reduced(p.two)};
    case ModelKind::two_cavity_full: return two_cavity_full_hamiltonian(p.two);
  }
  throw ConfigError("unknown model");
}

inline std::vector<CollapseChannel> model_channels(const ModelParams& p) {
  return p.model == ModelKind::one_cavity ? one_cavity_channels(p.one) : two_cavity_channels(p.two);
}

/// Mechanical mode slot; the atom is always slot 0.
inline constexpr std::size_t kPhononSlot = 1;

inline DensityMatrix model_steady_state(const ModelParams& p, const SteadyStateOptions& opt = {}) {
  return steady_state(model_liouvillian(p), opt);
}

inline CorrelationReport steady_state_report(const ModelParams& p, double occupation_floor = kOccupationFloor) {
  return correlation_report(model_steady_state(p), kPhononSlot, occupation_floor);
}

/// Worker count from PB_SIM_THREADS, else the hardware concurrency.
inline unsigned sweep_threads() {
  if (const char* env = std::getenv("PB_SIM_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v >= 1) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

/// Runs f(i) for i in [0, n) on `threads` workers. f must be safe to call concurrently.
template <class F>
void parallel_for(std::size_t n, unsigned threads, F&& f) {
  threads = static_cast<unsigned>(std::min<std::size_t>(std::max(1u, threads), n));
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> pool;
  pool.reserve(threads);
  for (unsigned w = 0; w < threads; ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) f(i);
    });
}

namespace detail {

inline ResultRow evaluate_point(const SweepSpec& spec, double x) {
  try {
    return ResultRow::from_report(x, steady_state_report(spec.params_at(x), spec.solver.occupation_floor));
  } catch (const Error& e) {
    return ResultRow::failure(x, e.what());
  }
}

inline std::vector<ResultRow> run_time_sweep(const SweepSpec& spec) {
  const auto grid = spec.grid();
  std::vector<double> times = grid;
  const bool prepend_origin = grid.front() > 0;
  if (prepend_origin) times.insert(times.begin(), 0.0);

  const ModelParams& p = spec.fixed;
  const auto h = model_hamiltonian(p);
  const auto rho0 = DensityMatrix::basis_state(h.constant.space(), {0, 0});
  std::vector<ResultRow> rows;
  rows.reserve(grid.size());
  try {
    const auto traj = evolve(h, model_channels(p), rho0, times, spec.solver.evolve);
    for (std::size_t k = prepend_origin ? 1 : 0; k < traj.times.size(); ++k) {
      try {
        rows.push_back(ResultRow::from_report(
            traj.times[k], correlation_report(traj.states[k], kPhononSlot, spec.solver.occupation_floor)));
      } catch (const Error& e) {
        rows.push_back(ResultRow::failure(traj.times[k], e.what()));
      }
    }
  } catch (const Error& e) {
    for (double t : grid) rows.push_back(ResultRow::failure(t, e.what()));
  }
  return rows;
}

}  // namespace detail

/// One row per grid point, in grid order. Per-point failures are recorded in the row.
inline std::vector<ResultRow> run_sweep(const SweepSpec& spec, unsigned threads = sweep_threads()) {
  spec.validate();
  if (spec.is_time_sweep()) return detail::run_time_sweep(spec);
  const auto grid = spec.grid();
  std::vector<ResultRow> rows(grid.size());
  parallel_for(grid.size(), threads, [&](std::size_t i) { rows[i] = detail::evaluate_point(spec, grid[i]); });
  return rows;
}

struct Optimum {
  double axis_value;
  double g2;
};

/// Coarse argmin over `grid` (ascending), then golden-section refinement on the
/// two neighbouring cells when `refine` is set. `coarse` may carry precomputed
/// objective values for the grid (failed points as NaN).
inline Optimum find_optimum(std::span<const double> grid, const std::function<double(double)>& objective, bool refine,
                            double tol, std::span<const double> coarse = {}) {
  if (grid.size() < 3) throw InvalidParameter("find_optimum: need at least 3 grid points");
  std::vector<double> values(coarse.begin(), coarse.end());
  if (values.empty())
    for (double x : grid) values.push_back(objective(x));
  if (values.size() != grid.size()) throw InvalidParameter("find_optimum: coarse values do not match the grid");
  std::size_t best = grid.size();
  for (std::size_t i = 0; i < values.size(); ++i)
    if (std::isfinite(values[i]) && (best == grid.size() || values[i] < values[best])) best = i;
  if (best == grid.size()) throw SolverError("find_optimum: no grid point could be evaluated");
  if (best == 0 || best + 1 == grid.size())
    throw BoundaryMinimum("find_optimum: minimum at the grid boundary x = " + std::to_string(grid[best]) +
                          "; widen the range");
  if (!refine) return {grid[best], values[best]};
  auto safe = [&](double x) {
    const double v = objective(x);
    return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
  };
  const auto m = golden_section_minimize(safe, grid[best - 1], grid[best + 1], tol);
  if (m.value <= values[best]) return {m.x, m.value};
  return {grid[best], values[best]};
}

/// Minimum of g2 along the sweep axis.
inline Optimum find_optimum(const SweepSpec& spec, bool refine, unsigned threads = sweep_threads()) {
  if (spec.is_time_sweep()) throw ConfigError("find_optimum: the time axis has no optimum");
  const auto rows = run_sweep(spec, threads);
  std::vector<double> coarse;
  coarse.reserve(rows.size());
  for (const auto& r : rows) coarse.push_back(r.ok() ? r.g2 : std::numeric_limits<double>::quiet_NaN());
  const auto grid = spec.grid();
  auto objective = [&spec](double x) { return steady_state_report(spec.params_at(x), spec.solver.occupation_floor).g2; };
  return find_optimum(grid, objective, refine, spec.solver.refine_tol * (spec.hi - spec.lo), coarse);
}

struct RegionBoundary {
  double axis_value;
  std::string left_ordering, right_ordering;
  std::string left_region, right_region;
};

struct BoundaryReport {
  std::vector<RegionBoundary> boundaries;
  /// Ordering of each contiguous region, left to right.
  std::vector<std::string> sequence;
  std::vector<std::string> warnings;
};

/// Boundaries where the correlation ordering changes along a sweep. When
/// `ordering_at` is given each boundary is bisected to `tol`; otherwise the
/// cell midpoint is reported. Failed rows are skipped.
inline BoundaryReport locate_region_boundaries(const std::vector<ResultRow>& rows,
                                               const std::function<std::string(double)>& ordering_at = {},
                                               double tol = 1e-4) {
  BoundaryReport out;
  const ResultRow* prev = nullptr;
  for (const auto& row : rows) {
    if (!row.ok()) continue;
    if (prev == nullptr) {
      out.sequence.push_back(row.ordering);
    } else if (row.ordering != prev->ordering) {
      double x = 0.5 * (prev->axis_value + row.axis_value);
      if (ordering_at) {
        const std::string left = prev->ordering;
        x = bisect_predicate([&](double v) { return ordering_at(v) == left; }, prev->axis_value, row.axis_value, tol);
      }
      out.boundaries.push_back({x, prev->ordering, row.ordering, prev->region_label, row.region_label});
      out.sequence.push_back(row.ordering);
    }
    prev = &row;
  }
  if (out.sequence.size() < 2)
    out.warnings.push_back("classification-degenerate: fewer than 2 regions found along the sweep");
  return out;
}

inline BoundaryReport locate_region_boundaries(const SweepSpec& spec, unsigned threads = sweep_threads()) {
  if (spec.is_time_sweep()) throw ConfigError("locate_region_boundaries: needs a parameter axis");
  const auto rows = run_sweep(spec, threads);
  auto ordering_at = [&spec](double x) {
    const auto r = steady_state_report(spec.params_at(x), spec.solver.occupation_floor);
    return r.ordering;
  };
  return locate_region_boundaries(rows, ordering_at, spec.solver.boundary_tol);
}

inline constexpr std::string_view kCsvHeader = "axis,mean_phonon,g2,g3,g4,log10_g2,log10_g3,log10_g4,region";

/// 17 significant digits in scientific notation; non-finite values as nan / inf / -inf.
inline std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.16e", v);
  return buf;
}

inline void write_csv(const std::vector<ResultRow>& rows, std::ostream& os) {
  os << kCsvHeader << '\n';
  for (const auto& r : rows) {
    os << format_double(r.axis_value) << ',' << format_double(r.mean_phonon) << ',' << format_double(r.g2) << ','
       << format_double(r.g3) << ',' << format_double(r.g4) << ',' << format_double(r.log10_g2) << ','
       << format_double(r.log10_g3) << ',' << format_double(r.log10_g4) << ',' << r.region_label << '\n';
  }
}

inline void emit_csv(const std::vector<ResultRow>& rows, const std::string& path) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw FileError(path, "cannot open for writing");
  write_csv(rows, os);
  os.flush();
  if (!os) throw FileError(path, "write failed");
}

namespace detail {

inline double parse_double(const std::string& s, const std::string& context) {
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0') throw FileError(context, "malformed number '" + s + "'");
  return v;
}

}  // namespace detail

/// Reads rows written by write_csv. Orderings are not stored in the file and come back empty.
inline std::vector<ResultRow> read_csv(std::istream& is, const std::string& context = "<csv>") {
  std::string line;
  if (!std::getline(is, line) || line != kCsvHeader) throw FileError(context, "missing or unexpected CSV header");
  std::vector<ResultRow> rows;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) cells.push_back(cell);
    if (cells.size() != 9) throw FileError(context, "expected 9 columns, got " + std::to_string(cells.size()));
    ResultRow r;
    r.axis_value = detail::parse_double(cells[0], context);
    r.mean_phonon = detail::parse_double(cells[1], context);
    r.g2 = detail::parse_double(cells[2], context);
    r.g3 = detail::parse_double(cells[3], context);
    r.g4 = detail::parse_double(cells[4], context);
    r.log10_g2 = detail::parse_double(cells[5], context);
    r.log10_g3 = detail::parse_double(cells[6], context);
    r.log10_g4 = detail::parse_double(cells[7], context);
    r.region_label = cells[8];
    if (r.region_label == "error") r.error = "error";
    rows.push_back(std::move(r));
  }
  return rows;
}

inline std::vector<ResultRow> read_csv(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw FileError(path, "cannot open for reading");
  return read_csv(is, path);
}

}  // namespace pbsim
