#include "kvplate/generator.hpp"

#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "kvplate/errors.hpp"

namespace kvplate {

namespace {

template <class S>
Eigen::Matrix<S, Eigen::Dynamic, 1> mul(const SparseMatrix& m, const Eigen::Matrix<S, Eigen::Dynamic, 1>& x) {
  if constexpr (std::is_same_v<S, double>)
    return m * x;
  else
    return m.cast<S>() * x;
}

}  // namespace

DiscreteGenerator::DiscreteGenerator(const TransmissionModel1D& model, const Grid1D& grid)
    : model_(model), grid_(grid), lap_(assemble_G(model, grid)) {
  const int n = grid_.unknowns();
  const double h = grid_.spacing;
  stiffness_ = assemble_bilaplacian(model_, grid_, lap_);
  second_diff_ = kvplate::second_difference(grid_);

  a_.resize(n);
  weights_.resize(n);
  for (int i = 0; i < n; ++i) {
    a_[i] = model_.damping(grid_.unknown_x(i));
    weights_[i] = h * a_[i] / model_.c1;
  }
  damped_ = a_.maxCoeff() > 0.0;

  const Eigen::VectorXd inv_mass = lap_.mass.cwiseInverse();
  SparseMatrix lt_w_l = SparseMatrix(second_diff_.transpose()) * weights_.asDiagonal() * second_diff_;
  damping_ = inv_mass.asDiagonal() * lt_w_l;
  damping_.prune(0.0);
  damping_.makeCompressed();

  std::vector<Eigen::Triplet<double>> t;
  t.reserve(static_cast<std::size_t>(n + stiffness_.nonZeros() + damping_.nonZeros()));
  for (int i = 0; i < n; ++i) t.emplace_back(i, n + i, 1.0);
  for (int col = 0; col < n; ++col) {
    for (SparseMatrix::InnerIterator it(stiffness_, col); it; ++it)
      t.emplace_back(n + static_cast<int>(it.row()), col, -it.value());
    for (SparseMatrix::InnerIterator it(damping_, col); it; ++it)
      t.emplace_back(n + static_cast<int>(it.row()), n + col, -it.value());
  }
  matrix_.resize(2 * n, 2 * n);
  matrix_.setFromTriplets(t.begin(), t.end());

  sqrt_mass_ = lap_.mass.cwiseSqrt();
  const Eigen::VectorXd inv_sqrt_mass = sqrt_mass_.cwiseInverse();
  SparseMatrix s = inv_sqrt_mass.asDiagonal() * lap_.stiffness * inv_sqrt_mass.asDiagonal();
  SparseMatrix ds = inv_sqrt_mass.asDiagonal() * lt_w_l * inv_sqrt_mass.asDiagonal();
  ds.prune(0.0);
  t.clear();
  for (int col = 0; col < n; ++col) {
    for (SparseMatrix::InnerIterator it(s, col); it; ++it) {
      t.emplace_back(static_cast<int>(it.row()), n + col, it.value());
      t.emplace_back(n + static_cast<int>(it.row()), col, -it.value());
    }
    for (SparseMatrix::InnerIterator it(ds, col); it; ++it)
      t.emplace_back(n + static_cast<int>(it.row()), n + col, -it.value());
  }
  symmetrized_.resize(2 * n, 2 * n);
  symmetrized_.setFromTriplets(t.begin(), t.end());
}

template <class S>
Eigen::Matrix<S, Eigen::Dynamic, 1> DiscreteGenerator::to_energy_frame(const BasicState<S>& s) const {
  const int n = unknowns();
  Eigen::Matrix<S, Eigen::Dynamic, 1> y(2 * n);
  const Eigen::Matrix<S, Eigen::Dynamic, 1> ku = mul<S>(lap_.stiffness, s.u);
  y.head(n) = ku.cwiseQuotient(sqrt_mass_.cast<S>());
  y.tail(n) = s.v.cwiseProduct(sqrt_mass_.cast<S>());
  return y;
}

template <class S>
BasicState<S> DiscreteGenerator::from_energy_frame(const Eigen::Matrix<S, Eigen::Dynamic, 1>& y) const {
  const int n = unknowns();
  // K is SPD tridiagonal; a sparse Cholesky solve recovers u.
  Eigen::SimplicialLDLT<SparseMatrix> chol(lap_.stiffness);
  BasicState<S> out;
  const Eigen::Matrix<S, Eigen::Dynamic, 1> rhs = y.head(n).cwiseProduct(sqrt_mass_.cast<S>());
  if constexpr (std::is_same_v<S, double>) {
    out.u = chol.solve(rhs);
  } else {
    const Eigen::VectorXd re = chol.solve(Eigen::VectorXd(rhs.real()));
    const Eigen::VectorXd im = chol.solve(Eigen::VectorXd(rhs.imag()));
    out.u = re.cast<S>() + S(0, 1) * im.cast<S>();
  }
  out.v = y.tail(n).cwiseQuotient(sqrt_mass_.cast<S>());
  return out;
}

template <class S>
S DiscreteGenerator::inner(const BasicState<S>& a, const BasicState<S>& b) const {
  // (G u)^T M (G p) = (K u)^T M^{-1} (K p)
  const Eigen::Matrix<S, Eigen::Dynamic, 1> ka = mul<S>(lap_.stiffness, a.u);
  const Eigen::Matrix<S, Eigen::Dynamic, 1> kb = mul<S>(lap_.stiffness, b.u);
  const Eigen::VectorXd inv_mass = lap_.mass.cwiseInverse();
  S acc = 0;
  for (Eigen::Index i = 0; i < ka.size(); ++i) {
    if constexpr (std::is_same_v<S, double>)
      acc += ka[i] * inv_mass[i] * kb[i] + a.v[i] * lap_.mass[i] * b.v[i];
    else
      acc += ka[i] * inv_mass[i] * std::conj(kb[i]) + a.v[i] * lap_.mass[i] * std::conj(b.v[i]);
  }
  return acc;
}

double DiscreteGenerator::dissipation_rate(const State& s) const {
  if (!damped_) return 0.0;
  const Eigen::VectorXd lv = second_diff_ * s.v;
  return (weights_.array() * lv.array().square()).sum();
}

double DiscreteGenerator::dissipation_rate(const ComplexState& s) const {
  if (!damped_) return 0.0;
  const Eigen::VectorXcd lv = second_diff_.cast<Complex>() * s.v;
  return (weights_.array() * lv.array().abs2()).sum();
}

State DiscreteGenerator::apply(const State& s) const {
  if (s.u.size() != unknowns() || s.v.size() != unknowns())
    throw ConfigError("apply_generator: state layout does not match the grid");
  return {s.v, -(stiffness_ * s.u) - damping_ * s.v};
}

ComplexState DiscreteGenerator::apply(const ComplexState& s) const {
  if (s.u.size() != unknowns() || s.v.size() != unknowns())
    throw ConfigError("apply_generator: state layout does not match the grid");
  return {s.v, -(stiffness_.cast<Complex>() * s.u) - damping_.cast<Complex>() * s.v};
}

Eigen::VectorXd DiscreteGenerator::flatten(const State& s) const {
  Eigen::VectorXd x(dimension());
  x << s.u, s.v;
  return x;
}

State DiscreteGenerator::unflatten(const Eigen::VectorXd& x) const {
  const int n = unknowns();
  return {x.head(n), x.tail(n)};
}

template Eigen::VectorXd DiscreteGenerator::to_energy_frame(const State&) const;
template Eigen::VectorXcd DiscreteGenerator::to_energy_frame(const ComplexState&) const;
template State DiscreteGenerator::from_energy_frame(const Eigen::VectorXd&) const;
template ComplexState DiscreteGenerator::from_energy_frame(const Eigen::VectorXcd&) const;
template double DiscreteGenerator::inner(const State&, const State&) const;
template Complex DiscreteGenerator::inner(const ComplexState&, const ComplexState&) const;

State random_state(int unknowns, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  State s = State::zero(unknowns);
  for (int i = 0; i < unknowns; ++i) s.u[i] = normal(rng);
  for (int i = 0; i < unknowns; ++i) s.v[i] = normal(rng);
  return s;
}

AssemblyCheck check_invariants(const DiscreteGenerator& gen, std::uint64_t seed, int samples) {
  AssemblyCheck out;
  const int n = gen.unknowns();
  const auto& lap = gen.second_difference();
  for (int k = 0; k < samples; ++k) {
    const State u = random_state(n, seed + 2 * static_cast<std::uint64_t>(k));
    const State w = random_state(n, seed + 2 * static_cast<std::uint64_t>(k) + 1);
    const double uu = gen.inner(u, u);
    const double diss = gen.inner(gen.apply(u), u) + gen.dissipation_rate(u);
    out.max_dissipation_defect = std::max(out.max_dissipation_defect, std::abs(diss) / uu);

    // Remove the symmetric damping part 2 (L v_u)^T W (L v_w); the rest is skew.
    const Eigen::VectorXd lu = lap * u.v, lw = lap * w.v;
    double sym = 0.0;
    for (int i = 0; i < n; ++i)
      sym += gen.damping_values()[i] * gen.grid().spacing / gen.model().c1 * lu[i] * lw[i];
    const double skew = gen.inner(gen.apply(u), w) + gen.inner(u, gen.apply(w)) + 2.0 * sym;
    const double scale = std::sqrt(uu * gen.inner(w, w));
    out.max_skew_defect = std::max(out.max_skew_defect, std::abs(skew) / scale);
  }
  return out;
}

DiscreteGenerator assemble_generator(const TransmissionModel1D& model, const Grid1D& grid,
                                     std::uint64_t seed, AssemblyCheck* check) {
  DiscreteGenerator gen(model, grid);
  const AssemblyCheck c = check_invariants(gen, seed);
  if (check) *check = c;
  constexpr double tol = 1e-10;
  if (c.max_dissipation_defect > tol || c.max_skew_defect > tol) {
    std::ostringstream os;
    os << "assemble_generator: invariant violated (dissipation defect " << c.max_dissipation_defect
       << ", skew defect " << c.max_skew_defect << ")";
    throw NumericalError(os.str());
  }
  return gen;
}

double energy(const DiscreteGenerator& gen, const State& s) {
  if (s.u.size() != gen.unknowns() || s.v.size() != gen.unknowns())
    throw ConfigError("energy: state layout does not match the grid");
  return gen.energy(s);
}

State apply_generator(const DiscreteGenerator& gen, const State& s) { return gen.apply(s); }

}  // namespace kvplate
