#pragma once

// Effective atom-phonon Hamiltonians of the one- and two-cavity hybrid
// optomechanical systems, plus the coupling rates they derive from.
// Every rate is expressed in units of the atom damping kappa; time in 1/kappa.

#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <numbers>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "pbsim/errors.hpp"
#include "pbsim/hilbert.hpp"

namespace pbsim {

inline constexpr std::size_t kDefaultTruncation = 15;

using NamedValues = std::initializer_list<std::pair<const char*, double>>;

/// Converts a rate quoted as (rate / 2 pi) in MHz to units of kappa.
inline double mhz_over_2pi_to_kappa(double value_mhz, double kappa_mhz) {
  if (!(kappa_mhz > 0)) throw InvalidParameter("kappa in MHz/2pi must be positive");
  return value_mhz / kappa_mhz;
}

/// One-cavity model. Defaults are the standard single-cavity operating point.
struct OneCavityParams {
  double kappa = 1.0;        // atom damping
  double gamma_m = 0.01;     // NAMR damping
  double gamma_c = 1.0;      // cavity damping
  double gamma_tri = 0.003;  // tripartite atom-photon-phonon rate
  double omega_m = 280.0;    // mechanical frequency
  double delta_c = 0.0;      // cavity-drive detuning
  double omega_drive = 83.33;
  double eps = 0.01;         // mechanical drive
  double delta = 0.0;        // atom/phonon detuning from the mechanical drive
  double n_bth = 0.0;
  std::size_t n_trunc = kDefaultTruncation;

  void validate() const {
    for (auto [name, v] : NamedValues{{"kappa", kappa}, {"gamma_m", gamma_m}, {"gamma_c", gamma_c},
                           {"gamma_tri", gamma_tri}, {"omega_m", omega_m}, {"omega_drive", omega_drive},
                           {"eps", eps}, {"n_bth", n_bth}})
      if (!(v >= 0)) throw InvalidParameter(std::string("OneCavityParams: ") + name + " must be >= 0");
    if (!std::isfinite(delta) || !std::isfinite(delta_c)) throw InvalidParameter("OneCavityParams: non-finite detuning");
    if (n_trunc < 2) throw InvalidDimension("OneCavityParams: n_trunc must be >= 2");
  }
};

/// Reduced two-cavity model acting on the atom and the antisymmetric mechanical supermode.
struct TwoCavityParams {
  double g = 0.08;       // atom-photon rate
  double g0 = 0.4;       // optomechanical rate
  double J = 0.8;        // cavity-cavity rate
  double Jm = 0.002;     // mechanical-mechanical rate (neglected by the reduction)
  double omega_m = 280.0;
  double n_plus = 51.0 * 51.0;
  double n_minus = 1.0;
  double eps = 0.03;     // physical drive on the left mirror
  double kappa = 1.0;
  double gamma_m = 0.01;
  std::size_t n_trunc = kDefaultTruncation;

  void validate() const {
    for (auto [name, v] : NamedValues{{"g", g}, {"g0", g0}, {"Jm", Jm}, {"omega_m", omega_m}, {"eps", eps},
                           {"kappa", kappa}, {"gamma_m", gamma_m}, {"n_minus", n_minus}})
      if (!(v >= 0)) throw InvalidParameter(std::string("TwoCavityParams: ") + name + " must be >= 0");
    if (!(J > 0)) throw ZeroCoupling("TwoCavityParams: J must be > 0");
    if (!(n_plus >= n_minus)) throw InvalidParameter("TwoCavityParams: n_plus must be >= n_minus");
    if (n_trunc < 2) throw InvalidDimension("TwoCavityParams: n_trunc must be >= 2");
  }
};

/// Margins that turn the "much smaller than" conditions into warnings.
struct ValidityThresholds {
  double rwa_ratio = 10.0;   // require gamma_tri <= G / ratio and G <= omega_m / ratio
  double fast_term = 0.1;    // require (g / omega_m)(sqrt n+ - sqrt n-) <= fast_term
};

inline HilbertSpace one_cavity_space(std::size_t n_trunc) { return {{2, n_trunc}, {"atom", "phonon"}}; }
inline HilbertSpace two_cavity_space(std::size_t n_trunc) { return {{2, n_trunc}, {"atom", "phonon_minus"}}; }

/// Steady-state intracavity photon number of a driven damped cavity,
/// Omega^2 / (delta_c^2 + (Gamma_c / 2)^2).
inline double cavity_mean_photon(double omega_drive, double delta_c, double gamma_c) {
  if (gamma_c < 0) throw InvalidParameter("cavity_mean_photon: negative cavity damping");
  if (gamma_c == 0 && delta_c == 0) throw DivergentDrive("cavity_mean_photon: undamped resonant drive diverges");
  return omega_drive * omega_drive / (delta_c * delta_c + 0.25 * gamma_c * gamma_c);
}

/// G = gamma sqrt(n_cav).
inline double effective_coupling_one_cavity(double gamma_tri, double n_cav) {
  if (n_cav < 0) throw InvalidParameter("effective_coupling_one_cavity: negative photon number");
  return gamma_tri * std::sqrt(n_cav);
}

inline double one_cavity_coupling(const OneCavityParams& p) {
  return effective_coupling_one_cavity(p.gamma_tri, cavity_mean_photon(p.omega_drive, p.delta_c, p.gamma_c));
}

/// Optimal blockade coupling (1/2) sqrt(kappa (kappa + gamma)).
inline double optimal_coupling(double kappa, double gamma) {
  if (!(kappa > 0)) throw InvalidParameter("optimal_coupling: kappa must be > 0");
  return 0.5 * std::sqrt(kappa * (kappa + gamma));
}

/// Checks gamma << G << omega_m for the one-cavity reduction; empty when valid.
inline std::vector<std::string> one_cavity_warnings(const OneCavityParams& p, const ValidityThresholds& thr = {}) {
  std::vector<std::string> out;
  const double G = one_cavity_coupling(p);
  if (p.gamma_tri > G / thr.rwa_ratio) {
    std::ostringstream os;
    os << "rwa-violation: gamma_tri=" << p.gamma_tri << " not << G=" << G;
    out.push_back(os.str());
  }
  if (G > p.omega_m / thr.rwa_ratio) {
    std::ostringstream os;
    os << "rwa-violation: G=" << G << " not << omega_m=" << p.omega_m;
    out.push_back(os.str());
  }
  return out;
}

/// H = (Delta/2) sigma_z + Delta b^dag b + G (sigma_+ b + sigma_- b^dag) + eps (b^dag + b).
inline Operator build_one_cavity_hamiltonian(const OneCavityParams& p) {
  p.validate();
  const auto space = one_cavity_space(p.n_trunc);
  const auto [sp, sm, sz] = pauli_ops();
  const auto b = embed(annihilation(p.n_trunc), space, 1);
  const auto bd = b.adjoint();
  const auto sigma_p = embed(sp, space, 0);
  const auto sigma_m = embed(sm, space, 0);
  const auto sigma_z = embed(sz, space, 0);
  const double G = one_cavity_coupling(p);
  return (0.5 * p.delta) * sigma_z + p.delta * (bd * b) + G * (sigma_p * b + sigma_m * bd) + p.eps * (bd + b);
}

/// Effective tripartite rate in the two-cavity system, g g0 / (4 J).
inline double tripartite_rate_two_cavity(double g, double g0, double J) {
  if (J == 0) throw ZeroCoupling("tripartite_rate_two_cavity: J = 0");
  if (J < 0) throw InvalidParameter("tripartite_rate_two_cavity: J must be > 0");
  return g * g0 / (4.0 * J);
}

/// G' = gamma (sqrt n+ - sqrt n-).
inline double effective_coupling_two_cavity(double gamma_eff, double n_plus, double n_minus) {
  if (!(n_minus >= 0) || !(n_plus >= n_minus))
    throw InvalidParameter("effective_coupling_two_cavity: need n_plus >= n_minus >= 0");
  return gamma_eff * (std::sqrt(n_plus) - std::sqrt(n_minus));
}

inline double two_cavity_tripartite_rate(const TwoCavityParams& p) { return tripartite_rate_two_cavity(p.g, p.g0, p.J); }

inline double two_cavity_coupling(const TwoCavityParams& p) {
  return effective_coupling_two_cavity(two_cavity_tripartite_rate(p), p.n_plus, p.n_minus);
}

/// Returns n_plus such that the two-cavity coupling equals g_prime at fixed n_minus.
inline double n_plus_for_coupling(const TwoCavityParams& p, double g_prime) {
  const double gamma = two_cavity_tripartite_rate(p);
  if (!(gamma > 0)) throw InvalidParameter("n_plus_for_coupling: tripartite rate is zero");
  if (g_prime < 0) throw InvalidParameter("n_plus_for_coupling: negative coupling");
  const double root = std::sqrt(p.n_minus) + g_prime / gamma;
  return root * root;
}

/// (g / omega_m)(sqrt n+ - sqrt n-): how far the dropped fast atom drive is from negligible.
inline double fast_term_ratio(const TwoCavityParams& p) {
  return p.g / p.omega_m * (std::sqrt(p.n_plus) - std::sqrt(p.n_minus));
}

inline std::vector<std::string> two_cavity_warnings(const TwoCavityParams& p, const ValidityThresholds& thr = {}) {
  std::vector<std::string> out;
  const double r = fast_term_ratio(p);
  if (r > thr.fast_term) {
    std::ostringstream os;
    os << "validity: fast atom drive ratio " << r << " exceeds " << thr.fast_term;
    out.push_back(os.str());
  }
  return out;
}

enum class SupermodeOrder { exact, first_order };

struct SupermodeCoefficients {
  double alpha;
  double beta;
};

/// Optical supermode mixing coefficients for a mechanical shift delta_b.
inline SupermodeCoefficients supermode_coefficients(double delta_b, double J, SupermodeOrder order) {
  if (!(J > 0)) throw ZeroCoupling("supermode_coefficients: J must be > 0");
  if (order == SupermodeOrder::first_order) {
    const double x = delta_b / J;
    if (std::abs(x) >= 0.2) throw ExpansionInvalid("supermode_coefficients: |delta_b|/J >= 0.2");
    return {(1.0 - 0.5 * x) / std::numbers::sqrt2, (1.0 + 0.5 * x) / std::numbers::sqrt2};
  }
  const double s = std::hypot(delta_b, J) + delta_b;
  const double alpha = J / std::hypot(s, J);
  return {alpha, alpha / J * s};
}

namespace detail {

struct TwoCavityOperators {
  Operator sigma_plus, sigma_minus, b, bd;
};

inline TwoCavityOperators two_cavity_operators(std::size_t n_trunc) {
  const auto space = two_cavity_space(n_trunc);
  const auto [sp, sm, sz] = pauli_ops();
  auto b = embed(annihilation(n_trunc), space, 1);
  auto bd = b.adjoint();
  return {embed(sp, space, 0), embed(sm, space, 0), std::move(b), std::move(bd)};
}

inline Operator two_cavity_static_part(const TwoCavityParams& p, const TwoCavityOperators& ops) {
  const double Gp = two_cavity_coupling(p);
  return (-Gp) * (ops.sigma_plus * ops.b + ops.bd * ops.sigma_minus) +
         (p.eps / std::numbers::sqrt2) * (ops.bd + ops.b);
}

}  // namespace detail

/// H'' = -G'(sigma_+ b_- + b_-^dag sigma_-) + (eps / sqrt 2)(b_-^dag + b_-).
inline Operator build_two_cavity_hamiltonian_reduced(const TwoCavityParams& p) {
  p.validate();
  return detail::two_cavity_static_part(p, detail::two_cavity_operators(p.n_trunc));
}

/// H'(t): the reduced Hamiltonian plus the atom drive
/// (g / sqrt 2)(G'/gamma)(sigma_+ e^{i omega_m t} + sigma_- e^{-i omega_m t}).
inline TimeDependentOperator two_cavity_full_hamiltonian(const TwoCavityParams& p) {
  p.validate();
  auto ops = detail::two_cavity_operators(p.n_trunc);
  // G'/gamma written directly so the amplitude stays defined when g0 = 0.
  const double amplitude = p.g / std::numbers::sqrt2 * (std::sqrt(p.n_plus) - std::sqrt(p.n_minus));
  const double w = p.omega_m;
  TimeDependentOperator h{detail::two_cavity_static_part(p, ops)};
  h.terms.push_back({amplitude * ops.sigma_plus, [w](double t) { return std::polar(1.0, w * t); }});
  h.terms.push_back({amplitude * ops.sigma_minus, [w](double t) { return std::polar(1.0, -w * t); }});
  h.fastest_frequency = w;
  return h;
}

inline Operator build_two_cavity_hamiltonian_full(const TwoCavityParams& p, double t) {
  return two_cavity_full_hamiltonian(p).at(t);
}

}  // namespace pbsim
