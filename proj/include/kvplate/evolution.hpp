#pragma once

#include <Eigen/SparseLU>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "kvplate/exec.hpp"
#include "kvplate/generator.hpp"

namespace kvplate {

/// Trapezoidal (Cayley) map U_{n+1} = (I - dt/2 A)^{-1} (I + dt/2 A) U_n.
///
/// For the linear system this is the implicit midpoint rule, so
///   E(U_{n+1}) - E(U_n) = -dt * rate((U_n + U_{n+1}) / 2)
/// holds exactly; with a = 0 every step is an isometry of the energy norm.
class CayleyStepper {
public:
  CayleyStepper(const DiscreteGenerator& gen, double dt);

  State step(const State& s) const;
  double dt() const { return dt_; }

private:
  const DiscreteGenerator* gen_;
  double dt_;
  SparseMatrix explicit_part_;
  Eigen::SparseLU<SparseMatrix> implicit_;
};

/// One Cayley step; factorizes on every call. Use CayleyStepper in loops.
State step(const DiscreteGenerator& gen, const State& s, double dt);

struct EnergySample {
  double t = 0.0;
  double energy = 0.0;
  double cumulative_dissipation = 0.0;
  double identity_residual = 0.0;  ///< |E(t) - E(0) + dissipated(t)| / E(0)
};

struct EnergyTrace {
  std::vector<EnergySample> samples;
  double dt = 0.0;
  std::string scheme = "cayley";

  double max_identity_residual() const;
  /// Largest per-step increase E(t_{n+1}) - E(t_n), relative to E(0).
  double max_relative_increase() const;
};

/// Initial data recipes.
struct ModeData {
  int mode = 1;  ///< 1-based index of an undamped eigenmode (u = phi_k, v = 0)
};
struct SmoothData {
  int modes = 8;  ///< random combination of the lowest `modes` undamped modes
  std::uint64_t seed = 1;
};
using InitialData = std::variant<State, ModeData, SmoothData>;

/// Undamped eigenpairs: G phi_k = g_k phi_k, ascending g_k, phi_k
/// orthonormal in M_c. Eigenvalues of A_h for a = 0 are +-i g_k.
struct UndampedModes {
  Eigen::VectorXd frequencies;
  Eigen::MatrixXd shapes;
};
UndampedModes undamped_modes(const DiscreteGenerator& gen);

/// Realizes a recipe as a state; recipes are normalized to E = 1.
State realize(const DiscreteGenerator& gen, const InitialData& init);

/// Runs the Cayley scheme to T and records every `record_every`-th step.
/// Throws ConfigError for T <= 0, dt <= 0 or dt > T.
EnergyTrace simulate(const DiscreteGenerator& gen, const InitialData& init, double T, double dt,
                     int record_every = 1, State* final_state = nullptr);

/// Competing models fitted to the tail half of a trace.
///   log law:     log E = log C - 2k log(log(2 + t))   (C fitted, k fixed)
///   exponential: log E = log C_e - rate * t
/// Residuals are RMS errors in log E.
struct DecayFit {
  int k = 1;
  double log_law_constant = 0.0;
  double log_law_residual = 0.0;
  double exp_constant = 0.0;
  double exp_rate = 0.0;
  double exp_residual = 0.0;
  std::size_t tail_samples = 0;

  bool exponential_preferred() const { return exp_residual < log_law_residual; }
};

/// Throws ConfigError when the trace ends before t = 50 or k < 1, and
/// NumericalError when the tail contains energies below 1e-300.
DecayFit fit_decay(const EnergyTrace& trace, int k);

struct ModeDecay {
  int mode = 0;
  double rate = 0.0;  ///< exponential decay rate of E over the tail half
  double final_energy = 0.0;
  double max_identity_residual = 0.0;
};

/// Independent simulations, one per mode; parallel over modes.
std::vector<ModeDecay> mode_decay_sweep(const DiscreteGenerator& gen, const std::vector<int>& modes,
                                        double T, double dt, Exec exec = Exec::parallel);

}  // namespace kvplate
