#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <string_view>
#include <utility>

#include "pbsim/errors.hpp"
#include "pbsim/hilbert.hpp"

namespace pbsim {

/// <b^dag b> below this makes g^(n) undefined rather than small.
inline constexpr double kOccupationFloor = 1e-12;

namespace detail {

inline Operator mode_lowering(const HilbertSpace& space, std::size_t mode) {
  if (mode >= space.subsystems()) throw InvalidDimension("mode index out of range");
  return embed(annihilation(space.dim(mode)), space, mode);
}

/// <(b^dag)^n b^n> = tr(b^n rho (b^dag)^n).
inline double normal_moment(const Matrix& b, const Matrix& rho, int n) {
  Matrix bn = Matrix::Identity(b.rows(), b.cols());
  for (int k = 0; k < n; ++k) bn = (bn * b).eval();
  const Complex m = (bn * rho * bn.adjoint()).trace();
  if (std::abs(m.imag()) > 1e-9 * std::max(1.0, std::abs(m.real())))
    throw SolverError("normal_moment: non-real moment; state is not hermitian");
  return m.real();
}

}  // namespace detail

inline double mean_occupation(const DensityMatrix& rho, std::size_t mode) {
  return detail::normal_moment(detail::mode_lowering(rho.space(), mode).matrix(), rho.matrix(), 1);
}

/// Equal-time correlation <(b^dag)^n b^n> / <b^dag b>^n for n = 2, 3, 4.
inline double g_n(const DensityMatrix& rho, std::size_t mode, int n, double occupation_floor = kOccupationFloor) {
  if (n < 2 || n > 4) throw InvalidParameter("g_n: order must be 2, 3 or 4");
  const Matrix b = detail::mode_lowering(rho.space(), mode).matrix();
  const double occ = detail::normal_moment(b, rho.matrix(), 1);
  if (!(occ > occupation_floor))
    throw UndefinedCorrelation("g_n: <b^dag b> = " + std::to_string(occ) + " is below the occupation floor");
  return detail::normal_moment(b, rho.matrix(), n) / std::pow(occ, n);
}

/// g^(2) of the antisymmetric mechanical supermode in the two-cavity model.
inline double supermode_g2(const DensityMatrix& rho, double occupation_floor = kOccupationFloor) {
  return g_n(rho, rho.space().index_of("phonon_minus"), 2, occupation_floor);
}

enum class Region { standard_pb, non_standard_pb, phonon_induced_tunneling, unclassified };

inline std::string_view to_string(Region r) {
  switch (r) {
    case Region::standard_pb: return "standard_PB";
    case Region::non_standard_pb: return "non_standard_PB";
    case Region::phonon_induced_tunneling: return "phonon_induced_tunneling";
    case Region::unclassified: return "unclassified";
  }
  return "unclassified";
}

inline std::optional<Region> region_from_string(std::string_view s) {
  for (auto r : {Region::standard_pb, Region::non_standard_pb, Region::phonon_induced_tunneling, Region::unclassified})
    if (to_string(r) == s) return r;
  return std::nullopt;
}

struct Classification {
  Region region;
  /// Descending order of {1, g2, g3, g4}, e.g. "1>g2>g4>g3"; exact ties print "=".
  std::string ordering;
};

inline std::string correlation_ordering(double g2, double g3, double g4) {
  std::array<std::pair<double, std::string_view>, 4> items{{{1.0, "1"}, {g2, "g2"}, {g3, "g3"}, {g4, "g4"}}};
  std::stable_sort(items.begin(), items.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
  std::string out(items[0].second);
  for (std::size_t k = 1; k < items.size(); ++k) {
    out += items[k].first == items[k - 1].first ? "=" : ">";
    out += items[k].second;
  }
  return out;
}

/// Blockade / tunneling regime of a steady state from its n = 2, 3, 4 correlations.
///
/// standard PB: all three below 1. Non-standard PB: g2 < 1 while g3 or g4 exceeds 1.
/// Tunneling: g4 > g3 > g2 > 1, or g3 > g2 > 1 when `weak_tunneling` is set.
inline Classification classify(double g2, double g3, double g4, bool weak_tunneling = false) {
  if (g2 < 0 || g3 < 0 || g4 < 0) throw InvalidParameter("classify: correlations must be non-negative");
  Region r = Region::unclassified;
  if (g2 < 1 && g3 < 1 && g4 < 1)
    r = Region::standard_pb;
  else if (g2 < 1 && (g3 > 1 || g4 > 1))
    r = Region::non_standard_pb;
  else if (g3 > g2 && g2 > 1 && (weak_tunneling || g4 > g3))
    r = Region::phonon_induced_tunneling;
  return {r, correlation_ordering(g2, g3, g4)};
}

/// Letter of the tabulated detuning region (A..F) whose ordering matches, if any.
inline std::optional<char> table_region(std::string_view ordering) {
  static constexpr std::array<std::pair<char, std::string_view>, 6> rows{{{'A', "1>g2>g4>g3"},
                                                                           {'B', "1>g4>g2>g3"},
                                                                           {'C', "g4>1>g2>g3"},
                                                                           {'D', "g4>1>g3>g2"},
                                                                           {'E', "g4>g3>1>g2"},
                                                                           {'F', "g4>g3>g2>1"}}};
  for (const auto& [letter, o] : rows)
    if (o == ordering) return letter;
  return std::nullopt;
}

struct CorrelationReport {
  double mean_phonon = 0;
  double g2 = 0, g3 = 0, g4 = 0;
  Region region = Region::unclassified;
  std::string ordering;
};

inline CorrelationReport correlation_report(const DensityMatrix& rho, std::size_t mode,
                                            double occupation_floor = kOccupationFloor) {
  CorrelationReport r;
  r.mean_phonon = mean_occupation(rho, mode);
  r.g2 = g_n(rho, mode, 2, occupation_floor);
  r.g3 = g_n(rho, mode, 3, occupation_floor);
  r.g4 = g_n(rho, mode, 4, occupation_floor);
  auto c = classify(std::max(r.g2, 0.0), std::max(r.g3, 0.0), std::max(r.g4, 0.0));
  r.region = c.region;
  r.ordering = std::move(c.ordering);
  return r;
}

}  // namespace pbsim
