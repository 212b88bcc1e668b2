#pragma once

// Lindblad generator on column-stacked density matrices:
//   vec(rho)[i + j d] = rho(i, j),  vec(A rho B) = (B^T (x) A) vec(rho).

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "pbsim/errors.hpp"
#include "pbsim/hilbert.hpp"
#include "pbsim/models.hpp"

namespace pbsim {

inline Vector vectorize(const Matrix& rho) { return rho.reshaped(); }

inline Matrix unvectorize(const Vector& v) {
  const auto d = static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(v.size()))));
  if (d * d != v.size()) throw InvalidDimension("unvectorize: length is not a perfect square");
  return v.reshaped(d, d);
}

struct CollapseChannel {
  Operator op;
  double rate;
};

class Liouvillian {
 public:
  Liouvillian(HilbertSpace space, Matrix matrix) : space_(std::move(space)), matrix_(std::move(matrix)) {
    const auto d = static_cast<Eigen::Index>(space_.total_dim());
    if (matrix_.rows() != d * d || matrix_.cols() != d * d) throw InvalidDimension("Liouvillian: matrix must be d^2 x d^2");
  }

  const HilbertSpace& space() const noexcept { return space_; }
  const Matrix& matrix() const noexcept { return matrix_; }
  std::size_t dim() const noexcept { return space_.total_dim(); }

  Matrix apply(const Matrix& rho) const { return unvectorize(matrix_ * vectorize(rho)); }

  /// max |vec(I)^T L|: zero for a trace-preserving generator.
  double trace_preservation_error() const {
    const auto d = static_cast<Eigen::Index>(dim());
    Vector trace_row = vectorize(Matrix::Identity(d, d));
    return (trace_row.transpose() * matrix_).cwiseAbs().maxCoeff();
  }

 private:
  HilbertSpace space_;
  Matrix matrix_;
};

/// Bose-Einstein occupation for x = hbar omega / (k_B T).
inline double thermal_occupation_from_ratio(double x) {
  if (!(x > 0)) throw InvalidFrequency("thermal_occupation_from_ratio: ratio must be > 0");
  return 1.0 / std::expm1(x);
}

/// Bose-Einstein occupation of a mode at angular frequency omega (rad/s), temperature in kelvin.
inline double thermal_occupation(double omega, double temperature) {
  constexpr double hbar = 1.054571817e-34;  // J s
  constexpr double k_b = 1.380649e-23;      // J / K
  if (!(omega > 0)) throw InvalidFrequency("thermal_occupation: omega must be > 0");
  if (temperature < 0) throw InvalidParameter("thermal_occupation: negative temperature");
  if (temperature == 0) return 0.0;
  return thermal_occupation_from_ratio(hbar * omega / (k_b * temperature));
}

/// Superoperator of D[c] rho = c rho c^dag - (c^dag c rho + rho c^dag c) / 2.
inline Matrix dissipator(const Operator& c) {
  const Matrix& m = c.matrix();
  const auto d = m.rows();
  const Matrix id = Matrix::Identity(d, d);
  const Matrix cdc = m.adjoint() * m;
  Matrix s = Eigen::kroneckerProduct(m.conjugate(), m).eval();
  s -= 0.5 * Eigen::kroneckerProduct(id, cdc).eval();
  s -= 0.5 * Eigen::kroneckerProduct(cdc.transpose(), id).eval();
  return s;
}

/// L = -i (I (x) H - H^T (x) I) + sum_k rate_k D[c_k].
inline Liouvillian build_liouvillian(const Operator& h, const std::vector<CollapseChannel>& channels) {
  const auto d = static_cast<Eigen::Index>(h.dim());
  const Matrix id = Matrix::Identity(d, d);
  const Complex minus_i(0.0, -1.0);
  Matrix l = minus_i * (Eigen::kroneckerProduct(id, h.matrix()).eval() -
                        Eigen::kroneckerProduct(h.matrix().transpose(), id).eval());
  for (const auto& ch : channels) {
    if (!(ch.op.space() == h.space())) throw InvalidDimension("build_liouvillian: channel operator on a different space");
    if (ch.rate < 0) throw InvalidParameter("build_liouvillian: negative channel rate");
    if (ch.rate == 0) continue;
    l += ch.rate * dissipator(ch.op);
  }
  return {h.space(), std::move(l)};
}

/// Mechanical damping with thermal occupation n_bar plus atom decay (atom bath at zero temperature).
inline std::vector<CollapseChannel> atom_phonon_channels(const HilbertSpace& space, double gamma_m, double n_bar,
                                                         double kappa) {
  const auto b = embed(annihilation(space.dim(1)), space, 1);
  const auto sm = embed(pauli_ops().sigma_minus, space, 0);
  return {{b, gamma_m * (n_bar + 1.0)}, {b.adjoint(), gamma_m * n_bar}, {sm, kappa}};
}

inline std::vector<CollapseChannel> one_cavity_channels(const OneCavityParams& p) {
  return atom_phonon_channels(one_cavity_space(p.n_trunc), p.gamma_m, p.n_bth, p.kappa);
}

/// Same structure on the b_- supermode, at zero temperature; cross-damping neglected.
inline std::vector<CollapseChannel> two_cavity_channels(const TwoCavityParams& p) {
  return atom_phonon_channels(two_cavity_space(p.n_trunc), p.gamma_m, 0.0, p.kappa);
}

}  // namespace pbsim
