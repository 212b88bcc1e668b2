#pragma once

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "pbsim/errors.hpp"
#include "pbsim/hilbert.hpp"
#include "pbsim/liouvillian.hpp"

namespace pbsim {

struct SteadyStateOptions {
  /// Augmented systems with a larger 1-norm condition estimate go to the SVD fallback.
  double max_condition = 1e14;
  /// Relative size below which a second singular value counts as a second steady state.
  double null_tolerance = 1e-12;
  StateTolerances tolerances{};
};

namespace detail {

inline DensityMatrix to_density_matrix(const HilbertSpace& space, const Vector& x, const StateTolerances& tol) {
  const Matrix raw = unvectorize(x);
  Matrix rho = 0.5 * (raw + raw.adjoint());
  const double tr = rho.trace().real();
  if (!std::isfinite(tr) || tr == 0.0) throw DegenerateSteadyState("steady_state: solution has zero or non-finite trace");
  rho /= tr;
  try {
    return {space, std::move(rho), tol};
  } catch (const InvalidState& e) {
    throw TruncationTooSmall(std::string("steady_state: ") + e.what() + "; increase the Fock truncation");
  }
}

inline Vector null_vector_svd(const Matrix& l, double null_tolerance) {
  Eigen::BDCSVD<Matrix> svd(l, Eigen::ComputeFullV);
  const auto& s = svd.singularValues();  // descending
  const auto n = s.size();
  if (n >= 2 && s(n - 2) <= null_tolerance * s(0))
    throw DegenerateSteadyState("steady_state: Liouvillian has more than one steady state");
  return svd.matrixV().col(n - 1);
}

// Real coordinates of a hermitian d x d matrix, one per column-stacked slot:
// (i,i) -> X_ii, (i,j) with i < j -> Re X_ij, (j,i) with i < j -> Im X_ij.
// A Lindblad generator maps hermitian to hermitian, so it is a real d^2 x d^2
// matrix in these coordinates.
inline Eigen::MatrixXd hermitian_coordinates(const Matrix& l, Eigen::Index d) {
  const Eigen::Index n = d * d;
  const Complex i_unit(0.0, 1.0);
  Matrix cols(n, n);
  for (Eigen::Index b = 0; b < d; ++b)
    for (Eigen::Index a = 0; a < d; ++a) {
      const Eigen::Index p = a + b * d;
      if (a == b)
        cols.col(p) = l.col(p);
      else if (a < b)  // basis E_ab + E_ba
        cols.col(p) = l.col(p) + l.col(b + a * d);
      else  // slot (a,b) below the diagonal: basis i E_ba - i E_ab
        cols.col(p) = i_unit * (l.col(b + a * d) - l.col(p));
    }
  Eigen::MatrixXd m(n, n);
  for (Eigen::Index j = 0; j < d; ++j)
    for (Eigen::Index i = 0; i < d; ++i) {
      const Eigen::Index q = i + j * d;
      if (i <= j)
        m.row(q) = cols.row(q).real();
      else
        m.row(q) = cols.row(j + i * d).imag();
    }
  return m;
}

inline Matrix from_hermitian_coordinates(const Eigen::VectorXd& c, Eigen::Index d) {
  Matrix rho(d, d);
  for (Eigen::Index j = 0; j < d; ++j)
    for (Eigen::Index i = 0; i <= j; ++i) {
      if (i == j) {
        rho(i, i) = c(i + i * d);
      } else {
        rho(i, j) = Complex(c(i + j * d), c(j + i * d));
        rho(j, i) = std::conj(rho(i, j));
      }
    }
  return rho;
}

}  // namespace detail

/// Unique rho with L vec(rho) = 0 and tr rho = 1.
///
/// L is written in real hermitian coordinates, the row of the (0,0) entry is
/// replaced by the trace functional, and the system is solved against e_1 by LU
/// with partial pivoting. When the condition estimate exceeds `max_condition`
/// the null vector is taken from an SVD of the complex L instead; a second
/// (near-)zero singular value means the steady state is not unique and
/// DegenerateSteadyState is thrown.
inline DensityMatrix steady_state(const Liouvillian& liouvillian, const SteadyStateOptions& opt = {}) {
  const auto d = static_cast<Eigen::Index>(liouvillian.dim());
  Eigen::MatrixXd a = detail::hermitian_coordinates(liouvillian.matrix(), d);
  a.row(0).setZero();
  for (Eigen::Index i = 0; i < d; ++i) a(0, i + i * d) = 1.0;
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(d * d);
  rhs(0) = 1.0;

  Eigen::PartialPivLU<Eigen::MatrixXd> lu(a);
  // rcond() misses exact zero pivots, so the pivot spread is checked as well.
  const auto pivots = lu.matrixLU().diagonal().cwiseAbs();
  const double rcond = std::min(lu.rcond(), pivots.minCoeff() / pivots.maxCoeff());
  if (rcond > 0 && std::isfinite(rcond) && 1.0 / rcond <= opt.max_condition)
    return detail::to_density_matrix(liouvillian.space(), vectorize(detail::from_hermitian_coordinates(lu.solve(rhs), d)),
                                     opt.tolerances);
  return detail::to_density_matrix(liouvillian.space(), detail::null_vector_svd(liouvillian.matrix(), opt.null_tolerance),
                                   opt.tolerances);
}

/// ||L vec(rho)||_2.
inline double steady_state_residual(const Liouvillian& liouvillian, const DensityMatrix& rho) {
  return (liouvillian.matrix() * vectorize(rho.matrix())).norm();
}

struct Trajectory {
  std::vector<double> times;
  std::vector<DensityMatrix> states;
};

struct EvolveOptions {
  /// Fixed RK4 step; 0 picks one from the generator scale and the fastest drive frequency.
  double step = 0.0;
  /// Default step for driven problems, as a phase h * omega_fast.
  double phase_per_step = 0.02;
  /// Default step otherwise, as a fraction of 1 / (generator scale).
  double scale_per_step = 0.02;
  /// Hard limit on h * omega_fast.
  double max_phase_per_step = 0.1;
  /// Largest tolerated |tr rho - 1| at an output time before renormalization.
  double max_trace_drift = 1e-6;
  StateTolerances tolerances{};
};

namespace detail {

/// d rho / dt for a Lindblad equation, evaluated with d x d products instead of the superoperator.
class LindbladRhs {
 public:
  LindbladRhs(const TimeDependentOperator& h, const std::vector<CollapseChannel>& channels) : h_(h) {
    const auto d = static_cast<Eigen::Index>(h.constant.dim());
    damping_ = Matrix::Zero(d, d);
    for (const auto& ch : channels) {
      if (!(ch.op.space() == h.constant.space())) throw InvalidDimension("evolve: channel on a different space");
      if (ch.rate < 0) throw InvalidParameter("evolve: negative channel rate");
      if (ch.rate == 0) continue;
      jumps_.push_back(ch.op.matrix());
      jump_adjoints_.push_back(ch.op.matrix().adjoint());
      rates_.push_back(ch.rate);
      damping_ += (0.5 * ch.rate) * (ch.op.matrix().adjoint() * ch.op.matrix());
    }
    h_eff_ = Matrix::Zero(d, d);
    work_ = Matrix::Zero(d, d);
    jump_work_ = Matrix::Zero(d, d);
  }

  /// Writes f(t, rho) into out. rho must be hermitian.
  void operator()(double t, const Matrix& rho, Matrix& out) {
    h_eff_ = h_.constant.matrix();
    for (const auto& term : h_.terms) h_eff_ += term.coefficient(t) * term.op.matrix();
    h_eff_ -= Complex(0.0, 1.0) * damping_;
    work_.noalias() = h_eff_ * rho;
    // rho H_eff^dag = (H_eff rho)^dag for hermitian rho.
    out = Complex(0.0, -1.0) * (work_ - work_.adjoint());
    for (std::size_t k = 0; k < jumps_.size(); ++k) {
      jump_work_.noalias() = jumps_[k] * rho;
      out.noalias() += rates_[k] * (jump_work_ * jump_adjoints_[k]);
    }
  }

  /// Rough spectral radius of the generator, for picking a stable step.
  double scale() const {
    auto inf_norm = [](const Matrix& m) { return m.cwiseAbs().rowwise().sum().maxCoeff(); };
    double s = 2.0 * inf_norm(h_.constant.matrix()) + 2.0 * inf_norm(damping_);
    for (const auto& term : h_.terms) s += 2.0 * inf_norm(term.op.matrix());
    return s;
  }

 private:
  const TimeDependentOperator& h_;
  std::vector<Matrix> jumps_, jump_adjoints_;
  std::vector<double> rates_;
  Matrix damping_, h_eff_, work_, jump_work_;
};

}  // namespace detail

/// Classical fourth-order Runge-Kutta integration of the master equation.
///
/// rho0 is the state at t_grid.front(); the returned trajectory holds one state
/// per grid time. Each output is renormalized to unit trace after checking the
/// drift, and must satisfy the DensityMatrix invariants.
inline Trajectory evolve(const TimeDependentOperator& h, const std::vector<CollapseChannel>& channels,
                         const DensityMatrix& rho0, const std::vector<double>& t_grid, const EvolveOptions& opt = {}) {
  if (t_grid.empty()) throw InvalidParameter("evolve: empty time grid");
  for (std::size_t k = 1; k < t_grid.size(); ++k)
    if (!(t_grid[k] > t_grid[k - 1])) throw InvalidParameter("evolve: time grid must be strictly increasing");
  if (!(rho0.space() == h.constant.space())) throw InvalidDimension("evolve: initial state on a different space");

  detail::LindbladRhs rhs(h, channels);
  double step = opt.step;
  if (step <= 0) {
    const double scale = rhs.scale();
    step = scale > 0 ? opt.scale_per_step / scale : 1.0;
    if (!h.is_static() && h.fastest_frequency > 0) step = std::min(step, opt.phase_per_step / h.fastest_frequency);
  }
  if (!h.is_static() && step * h.fastest_frequency > opt.max_phase_per_step)
    throw StepSizeError("evolve: step " + std::to_string(step) + " does not resolve the drive at omega = " +
                        std::to_string(h.fastest_frequency));

  const auto d = static_cast<Eigen::Index>(rho0.space().total_dim());
  Matrix rho = rho0.matrix();
  Matrix k1(d, d), k2(d, d), k3(d, d), k4(d, d), tmp(d, d);

  Trajectory out;
  out.times.reserve(t_grid.size());
  out.states.reserve(t_grid.size());
  out.times.push_back(t_grid.front());
  out.states.push_back(rho0);

  for (std::size_t k = 1; k < t_grid.size(); ++k) {
    const double span = t_grid[k] - t_grid[k - 1];
    const auto n_steps = static_cast<long>(std::ceil(span / step - 1e-9));
    const double hh = span / static_cast<double>(std::max(n_steps, 1L));
    double t = t_grid[k - 1];
    for (long s = 0; s < std::max(n_steps, 1L); ++s) {
      rhs(t, rho, k1);
      tmp = rho + (0.5 * hh) * k1;
      rhs(t + 0.5 * hh, tmp, k2);
      tmp = rho + (0.5 * hh) * k2;
      rhs(t + 0.5 * hh, tmp, k3);
      tmp = rho + hh * k3;
      rhs(t + hh, tmp, k4);
      rho += (hh / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      t = t_grid[k - 1] + static_cast<double>(s + 1) * hh;
    }
    const Complex tr = rho.trace();
    if (!std::isfinite(tr.real()) || std::abs(tr - 1.0) > opt.max_trace_drift)
      throw StepSizeError("evolve: trace drifted by " + std::to_string(std::abs(tr - 1.0)) + " at t = " +
                          std::to_string(t_grid[k]) + "; reduce the step");
    rho = (0.5 * (rho + rho.adjoint()) / tr.real()).eval();
    try {
      out.states.emplace_back(rho0.space(), rho, opt.tolerances);
    } catch (const InvalidState& e) {
      throw StepSizeError(std::string("evolve: ") + e.what() + " at t = " + std::to_string(t_grid[k]) +
                          "; reduce the step or raise the truncation");
    }
    out.times.push_back(t_grid[k]);
  }
  return out;
}

inline Trajectory evolve(const Operator& h, const std::vector<CollapseChannel>& channels, const DensityMatrix& rho0,
                         const std::vector<double>& t_grid, const EvolveOptions& opt = {}) {
  return evolve(TimeDependentOperator{h}, channels, rho0, t_grid, opt);
}

}  // namespace pbsim
