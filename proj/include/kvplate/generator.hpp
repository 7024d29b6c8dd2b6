#pragma once

#include <Eigen/Core>
#include <complex>
#include <cstdint>

#include "kvplate/disc.hpp"
#include "kvplate/model.hpp"

namespace kvplate {

using Complex = std::complex<double>;

/// Discrete state (u, v) on the interior unknowns. The Omega1/Omega2 split
/// is implied by the grid roles; interface nodes are shared.
template <class Scalar>
struct BasicState {
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  Vector u;
  Vector v;

  static BasicState zero(Eigen::Index n) { return {Vector::Zero(n), Vector::Zero(n)}; }
  Eigen::Index size() const { return u.size(); }

  BasicState& operator+=(const BasicState& o) {
    u += o.u;
    v += o.v;
    return *this;
  }
  friend BasicState operator+(BasicState a, const BasicState& b) { return a += b; }
  friend BasicState operator-(const BasicState& a, const BasicState& b) { return {a.u - b.u, a.v - b.v}; }
  friend BasicState operator*(Scalar s, const BasicState& a) { return {s * a.u, s * a.v}; }
};

using State = BasicState<double>;
using ComplexState = BasicState<Complex>;

/// Block operator A_h = [[0, I], [-B, -D]] with B = G*G and
/// D = M_c^{-1} L^T diag(h a / c1) L, L the 3-point second difference.
///
/// The energy inner product is <U, W> = (G u)^T M_c (G p) + v^T M_c q and
/// E(U) = <U, U>/2. With these choices
///   Re <A_h U, U> = -(1/c1) sum_j h a_j (L v)_j^2
/// holds algebraically.
class DiscreteGenerator {
public:
  DiscreteGenerator(const TransmissionModel1D& model, const Grid1D& grid);

  const TransmissionModel1D& model() const { return model_; }
  const Grid1D& grid() const { return grid_; }
  const TransmissionLaplacian& laplacian() const { return lap_; }
  int unknowns() const { return grid_.unknowns(); }
  int dimension() const { return 2 * grid_.unknowns(); }
  bool damped() const { return damped_; }

  const SparseMatrix& stiffness_block() const { return stiffness_; }
  const SparseMatrix& damping_block() const { return damping_; }
  const SparseMatrix& second_difference() const { return second_diff_; }
  /// Nodal values a(x_j) on the unknowns.
  const Eigen::VectorXd& damping_values() const { return a_; }
  /// Full 2n x 2n matrix acting on [u; v].
  const SparseMatrix& matrix() const { return matrix_; }
  /// R A_h R^{-1} with R = blockdiag(M^{-1/2} K, M^{1/2}), so that the energy
  /// norm becomes the Euclidean norm: [[0, S], [-S, -D_s]] with
  /// S = M^{-1/2} K M^{-1/2} and D_s = M^{-1/2} L^T W L M^{-1/2}.
  const SparseMatrix& symmetrized() const { return symmetrized_; }

  /// Coordinates of U in the symmetrized frame (R U); ||R U||^2 = <U, U>.
  template <class S>
  Eigen::Matrix<S, Eigen::Dynamic, 1> to_energy_frame(const BasicState<S>& s) const;
  template <class S>
  BasicState<S> from_energy_frame(const Eigen::Matrix<S, Eigen::Dynamic, 1>& y) const;

  template <class S>
  S inner(const BasicState<S>& a, const BasicState<S>& b) const;
  double energy(const State& s) const { return 0.5 * inner(s, s); }
  double norm_squared(const ComplexState& s) const { return inner(s, s).real(); }

  /// (1/c1) * sum_j h a_j |(L v)_j|^2, the exact dissipation rate.
  double dissipation_rate(const State& s) const;
  double dissipation_rate(const ComplexState& s) const;

  State apply(const State& s) const;
  ComplexState apply(const ComplexState& s) const;

  Eigen::VectorXd flatten(const State& s) const;
  State unflatten(const Eigen::VectorXd& x) const;

private:
  TransmissionModel1D model_;
  Grid1D grid_;
  TransmissionLaplacian lap_;
  bool damped_ = false;
  Eigen::VectorXd a_;
  Eigen::VectorXd weights_;  // h a_j / c1
  SparseMatrix stiffness_, damping_, second_diff_, matrix_, symmetrized_;
  Eigen::VectorXd sqrt_mass_;
};

/// Residuals of the two algebraic invariants measured at assembly time.
struct AssemblyCheck {
  double max_dissipation_defect = 0.0;  ///< |Re<AU,U> + rate| / <U,U>
  double max_skew_defect = 0.0;         ///< undamped part: |<AU,W> + <U,AW>| / (|U||W|)
};

/// Builds A_h and checks both invariants on 10 random states drawn from
/// seed; throws NumericalError (with the offending residual) on failure.
DiscreteGenerator assemble_generator(const TransmissionModel1D& model, const Grid1D& grid,
                                     std::uint64_t seed = 0x6b76706cULL,
                                     AssemblyCheck* check = nullptr);

AssemblyCheck check_invariants(const DiscreteGenerator& gen, std::uint64_t seed, int samples = 10);

double energy(const DiscreteGenerator& gen, const State& s);
State apply_generator(const DiscreteGenerator& gen, const State& s);

/// Random state with standard normal nodal entries.
State random_state(int unknowns, std::uint64_t seed);

}  // namespace kvplate
