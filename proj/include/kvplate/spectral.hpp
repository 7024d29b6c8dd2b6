#pragma once

#include <limits>
#include <vector>

#include "kvplate/exec.hpp"
#include "kvplate/generator.hpp"

namespace kvplate {

inline constexpr int kMaxDenseDimension = 4000;

/// All eigenvalues of A_h (dense eigensolve), sorted by imaginary part and
/// then by real part. Throws ConfigError above kMaxDenseDimension and
/// NumericalError when the solver fails.
std::vector<Complex> spectrum(const DiscreteGenerator& gen);

double distance_to_spectrum(const std::vector<Complex>& eigenvalues, double mu);

/// ||(A_h - i mu)^{-1}|| in the energy norm.
struct ResolventSample {
  double mu = 0.0;
  double norm = 0.0;  ///< +inf when i mu is (numerically) an eigenvalue
  int iterations = 0;     ///< applications of (T^H T)^{-1}
  double residual = 0.0;  ///< ||K x - theta x|| / theta for the Ritz pair
  bool singular = false;
};

struct ResolventOptions {
  int krylov_dimension = 60;
  int max_restarts = 20;
  double tolerance = 1e-10;
  std::uint64_t seed = 0x72657376ULL;
};

/// 1 / sigma_min of T = R (A_h - i mu) R^{-1}: Lanczos on (T^H T)^{-1}
/// using one sparse LU of T per call. Throws NumericalError if the
/// residual stays above 1e-8.
ResolventSample resolvent_norm(const DiscreteGenerator& gen, double mu,
                               const ResolventOptions& opts = {});

/// Smallest line log ||R(i mu)|| <= C_a + C_b |mu| lying above every finite
/// sample, with C_b >= 0. "Smallest" minimizes the line's value at the
/// midpoint of the sampled |mu| range (a linear program in two unknowns,
/// solved exactly over the candidate vertex slopes).
struct GrowthEnvelope {
  double c_a = 0.0;
  double c_b = 0.0;
  std::size_t finite_samples = 0;
  bool valid() const { return finite_samples > 0; }
  double operator()(double mu) const;
};

GrowthEnvelope fit_envelope(const std::vector<ResolventSample>& samples);

struct ResolventSweep {
  std::vector<ResolventSample> samples;
  GrowthEnvelope envelope;
};

ResolventSweep resolvent_sweep(const DiscreteGenerator& gen, const std::vector<double>& mus,
                               Exec exec = Exec::parallel, const ResolventOptions& opts = {});

/// count points from lo to hi, geometric spacing; lo, hi > 0.
std::vector<double> log_spaced(double lo, double hi, int count);

}  // namespace kvplate
