#pragma once

// Truncated Fock-space and two-level operator algebra on composite spaces.
//
// Basis ordering: subsystem 0 is the slowest-varying Kronecker index, so the
// composite basis state |i0, i1, ...> sits at i0 * (d1 * d2 ...) + i1 * (d2 ...) + ...
// Models place the atom in slot 0 and the mechanical mode in slot 1.

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <numeric>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "pbsim/errors.hpp"

namespace pbsim {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

inline double max_abs(const Matrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

class HilbertSpace {
 public:
  HilbertSpace(std::vector<std::size_t> dims, std::vector<std::string> labels)
      : dims_(std::move(dims)), labels_(std::move(labels)) {
    if (dims_.empty()) throw InvalidDimension("HilbertSpace needs at least one subsystem");
    if (dims_.size() != labels_.size())
      throw InvalidDimension("HilbertSpace: " + std::to_string(dims_.size()) + " dims but " +
                             std::to_string(labels_.size()) + " labels");
    for (auto d : dims_)
      if (d < 2) throw InvalidDimension("HilbertSpace: subsystem dimension " + std::to_string(d) + " < 2");
    std::set<std::string> seen(labels_.begin(), labels_.end());
    if (seen.size() != labels_.size()) throw InvalidDimension("HilbertSpace: duplicate subsystem labels");
  }

  explicit HilbertSpace(std::size_t dim, std::string label = "mode")
      : HilbertSpace(std::vector<std::size_t>{dim}, std::vector<std::string>{std::move(label)}) {}

  const std::vector<std::size_t>& dims() const noexcept { return dims_; }
  const std::vector<std::string>& labels() const noexcept { return labels_; }
  std::size_t subsystems() const noexcept { return dims_.size(); }
  std::size_t dim(std::size_t position) const { return dims_.at(position); }

  std::size_t total_dim() const noexcept {
    return std::accumulate(dims_.begin(), dims_.end(), std::size_t{1}, std::multiplies<>());
  }

  std::size_t index_of(std::string_view label) const {
    auto it = std::find(labels_.begin(), labels_.end(), label);
    if (it == labels_.end()) throw InvalidDimension("HilbertSpace: no subsystem labelled '" + std::string(label) + "'");
    return static_cast<std::size_t>(it - labels_.begin());
  }

  bool operator==(const HilbertSpace&) const = default;

 private:
  std::vector<std::size_t> dims_;
  std::vector<std::string> labels_;
};

class Operator {
 public:
  Operator(HilbertSpace space, Matrix matrix) : space_(std::move(space)), matrix_(std::move(matrix)) {
    const auto n = static_cast<Eigen::Index>(space_.total_dim());
    if (matrix_.rows() != n || matrix_.cols() != n)
      throw InvalidDimension("Operator: matrix is " + std::to_string(matrix_.rows()) + "x" +
                             std::to_string(matrix_.cols()) + ", space needs " + std::to_string(n) + "x" +
                             std::to_string(n));
  }

  const HilbertSpace& space() const noexcept { return space_; }
  const Matrix& matrix() const noexcept { return matrix_; }
  std::size_t dim() const noexcept { return static_cast<std::size_t>(matrix_.rows()); }

  Operator adjoint() const { return {space_, matrix_.adjoint()}; }

  /// max|A - A^dagger| relative to max|A| (absolute when A is zero).
  double hermiticity_error() const {
    const double scale = max_abs(matrix_);
    const double err = max_abs(matrix_ - matrix_.adjoint());
    return scale > 0 ? err / scale : err;
  }

  friend Operator operator+(const Operator& a, const Operator& b) {
    require_same(a, b, "+");
    return {a.space_, a.matrix_ + b.matrix_};
  }
  friend Operator operator-(const Operator& a, const Operator& b) {
    require_same(a, b, "-");
    return {a.space_, a.matrix_ - b.matrix_};
  }
  friend Operator operator*(const Operator& a, const Operator& b) {
    require_same(a, b, "*");
    return {a.space_, a.matrix_ * b.matrix_};
  }
  friend Operator operator*(Complex s, const Operator& a) { return {a.space_, s * a.matrix_}; }
  friend Operator operator*(double s, const Operator& a) { return {a.space_, s * a.matrix_}; }

 private:
  static void require_same(const Operator& a, const Operator& b, const char* op) {
    if (!(a.space_ == b.space_)) throw InvalidDimension(std::string("Operator ") + op + ": spaces differ");
  }

  HilbertSpace space_;
  Matrix matrix_;
};

inline Operator commutator(const Operator& a, const Operator& b) { return a * b - b * a; }

inline Operator identity(const HilbertSpace& space) {
  const auto n = static_cast<Eigen::Index>(space.total_dim());
  return {space, Matrix::Identity(n, n)};
}

inline Operator identity(std::size_t n, std::string label = "mode") { return identity(HilbertSpace(n, std::move(label))); }

/// Truncated bosonic lowering operator: <m|b|m+1> = sqrt(m+1).
inline Operator annihilation(std::size_t n_trunc, std::string label = "mode") {
  if (n_trunc < 2) throw InvalidDimension("annihilation: truncation " + std::to_string(n_trunc) + " < 2");
  const auto n = static_cast<Eigen::Index>(n_trunc);
  Matrix m = Matrix::Zero(n, n);
  for (Eigen::Index k = 0; k + 1 < n; ++k) m(k, k + 1) = std::sqrt(static_cast<double>(k + 1));
  return {HilbertSpace(n_trunc, std::move(label)), std::move(m)};
}

inline Operator creation(std::size_t n_trunc, std::string label = "mode") {
  return annihilation(n_trunc, std::move(label)).adjoint();
}

inline Operator number(std::size_t n_trunc, std::string label = "mode") {
  auto b = annihilation(n_trunc, std::move(label));
  return b.adjoint() * b;
}

struct PauliOps {
  Operator sigma_plus;
  Operator sigma_minus;
  Operator sigma_z;
};

/// Atom operators on the ordered basis (|g>, |e>).
inline PauliOps pauli_ops(std::string label = "atom") {
  HilbertSpace atom(2, std::move(label));
  Matrix plus = Matrix::Zero(2, 2);
  plus(1, 0) = 1.0;  // |e><g|
  Matrix z = Matrix::Zero(2, 2);
  z(0, 0) = -1.0;
  z(1, 1) = 1.0;
  Operator sp(atom, plus);
  return {sp, sp.adjoint(), Operator(atom, z)};
}

/// I (x) ... (x) op (x) ... (x) I with op in slot `position` of `target`.
inline Operator embed(const Operator& op, const HilbertSpace& target, std::size_t position) {
  if (position >= target.subsystems())
    throw InvalidEmbedding("embed: slot " + std::to_string(position) + " out of range for " +
                           std::to_string(target.subsystems()) + " subsystems");
  if (op.dim() != target.dim(position))
    throw InvalidEmbedding("embed: operator dimension " + std::to_string(op.dim()) + " != slot dimension " +
                           std::to_string(target.dim(position)));
  std::size_t left = 1, right = 1;
  for (std::size_t k = 0; k < position; ++k) left *= target.dim(k);
  for (std::size_t k = position + 1; k < target.subsystems(); ++k) right *= target.dim(k);
  const auto l = static_cast<Eigen::Index>(left), r = static_cast<Eigen::Index>(right);
  Matrix inner = Eigen::kroneckerProduct(Matrix::Identity(l, l), op.matrix()).eval();
  Matrix full = Eigen::kroneckerProduct(inner, Matrix::Identity(r, r)).eval();
  return {target, std::move(full)};
}

/// Tolerances enforced when a DensityMatrix is constructed.
struct StateTolerances {
  double hermiticity = 1e-10;
  double trace = 1e-9;
  double min_eigenvalue = -1e-8;
};

class DensityMatrix {
 public:
  DensityMatrix(HilbertSpace space, Matrix matrix, StateTolerances tol = {})
      : space_(std::move(space)), matrix_(std::move(matrix)) {
    const auto n = static_cast<Eigen::Index>(space_.total_dim());
    if (matrix_.rows() != n || matrix_.cols() != n) throw InvalidDimension("DensityMatrix: matrix does not match space");
    const double herm = max_abs(matrix_ - matrix_.adjoint());
    if (herm > tol.hermiticity) throw InvalidState("DensityMatrix: hermiticity error " + std::to_string(herm));
    const Complex tr = matrix_.trace();
    if (std::abs(tr - 1.0) > tol.trace) throw InvalidState("DensityMatrix: trace deviates from 1 by " + std::to_string(std::abs(tr - 1.0)));
    Matrix h = 0.5 * (matrix_ + matrix_.adjoint());
    Eigen::SelfAdjointEigenSolver<Matrix> es(h, Eigen::EigenvaluesOnly);
    min_eigenvalue_ = es.eigenvalues().minCoeff();
    if (min_eigenvalue_ < tol.min_eigenvalue)
      throw InvalidState("DensityMatrix: negative eigenvalue " + std::to_string(min_eigenvalue_));
  }

  /// |psi><psi| after normalizing psi.
  static DensityMatrix pure(HilbertSpace space, const Vector& psi) {
    const double norm = psi.norm();
    if (norm == 0.0) throw InvalidState("DensityMatrix::pure: zero vector");
    Vector v = psi / norm;
    return {std::move(space), v * v.adjoint()};
  }

  /// Product basis state with the given level in each subsystem.
  static DensityMatrix basis_state(const HilbertSpace& space, const std::vector<std::size_t>& levels) {
    if (levels.size() != space.subsystems()) throw InvalidDimension("basis_state: one level per subsystem required");
    std::size_t index = 0;
    for (std::size_t k = 0; k < levels.size(); ++k) {
      if (levels[k] >= space.dim(k)) throw InvalidDimension("basis_state: level out of range");
      index = index * space.dim(k) + levels[k];
    }
    Vector psi = Vector::Zero(static_cast<Eigen::Index>(space.total_dim()));
    psi(static_cast<Eigen::Index>(index)) = 1.0;
    return pure(space, psi);
  }

  const HilbertSpace& space() const noexcept { return space_; }
  const Matrix& matrix() const noexcept { return matrix_; }
  double min_eigenvalue() const noexcept { return min_eigenvalue_; }

 private:
  HilbertSpace space_;
  Matrix matrix_;
  double min_eigenvalue_ = 0.0;
};

/// Tensor product of two states; the result's labels are a's followed by b's.
inline DensityMatrix tensor(const DensityMatrix& a, const DensityMatrix& b) {
  auto dims = a.space().dims();
  auto labels = a.space().labels();
  dims.insert(dims.end(), b.space().dims().begin(), b.space().dims().end());
  labels.insert(labels.end(), b.space().labels().begin(), b.space().labels().end());
  return {HilbertSpace(std::move(dims), std::move(labels)), Eigen::kroneckerProduct(a.matrix(), b.matrix()).eval()};
}

/// tr(op rho).
inline Complex expectation(const Operator& op, const DensityMatrix& rho) {
  if (!(op.space() == rho.space())) throw InvalidDimension("expectation: operator and state live on different spaces");
  return op.matrix().cwiseProduct(rho.matrix().transpose()).sum();
}

/// H(t) = constant + sum_k coefficient_k(t) term_k.
struct TimeDependentOperator {
  struct Term {
    Operator op;
    std::function<Complex(double)> coefficient;
  };

  Operator constant;
  std::vector<Term> terms{};
  /// Largest angular frequency present in the coefficients; sets the RK4 step.
  double fastest_frequency = 0.0;

  bool is_static() const noexcept { return terms.empty(); }

  Operator at(double t) const {
    Matrix m = constant.matrix();
    for (const auto& term : terms) m += term.coefficient(t) * term.op.matrix();
    return {constant.space(), std::move(m)};
  }
};

inline DensityMatrix fock_state(std::size_t n_trunc, std::size_t n, std::string label = "mode") {
  return DensityMatrix::basis_state(HilbertSpace(n_trunc, std::move(label)), {n});
}

/// Coherent state |alpha> truncated to n_trunc levels and renormalized.
inline DensityMatrix coherent_state(std::size_t n_trunc, Complex alpha, std::string label = "mode") {
  HilbertSpace space(n_trunc, std::move(label));
  Vector psi(static_cast<Eigen::Index>(n_trunc));
  Complex amp = std::exp(-0.5 * std::norm(alpha));
  for (std::size_t n = 0; n < n_trunc; ++n) {
    psi(static_cast<Eigen::Index>(n)) = amp;
    amp *= alpha / std::sqrt(static_cast<double>(n + 1));
  }
  return DensityMatrix::pure(std::move(space), psi);
}

/// Bose-Einstein (chaotic) state with mean occupation n_bar, truncated and renormalized.
inline DensityMatrix thermal_state(std::size_t n_trunc, double n_bar, std::string label = "mode") {
  if (n_bar < 0) throw InvalidParameter("thermal_state: negative occupation");
  HilbertSpace space(n_trunc, std::move(label));
  const auto n = static_cast<Eigen::Index>(n_trunc);
  Eigen::VectorXd p(n);
  const double ratio = n_bar / (1.0 + n_bar);
  double w = 1.0;
  for (Eigen::Index k = 0; k < n; ++k, w *= ratio) p(k) = w;
  p /= p.sum();
  return {std::move(space), p.cast<Complex>().asDiagonal().toDenseMatrix()};
}

}  // namespace pbsim
