#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "kvplate/errors.hpp"
#include "kvplate/reduction.hpp"
#include "kvplate/spectral.hpp"

using namespace kvplate;

namespace {
TransmissionModel1D uniform() {
  TransmissionModel1D m;
  m.damping.shape = DampingShape::none;
  return m;
}

std::vector<double> upper_frequencies(const std::vector<Complex>& eig) {
  std::vector<double> up;
  for (const auto& z : eig)
    if (z.imag() > 0) up.push_back(z.imag());
  std::sort(up.begin(), up.end());
  return up;
}
}  // namespace

TEST_SUITE("spectral") {
  TEST_CASE("spectrum signs") {
    const TransmissionModel1D damped;
    const auto eig = spectrum(assemble_generator(damped, build_grid(damped, 60)));
    CHECK(eig.size() == 118);
    for (const auto& z : eig) CHECK(z.real() <= 1e-10);
    for (std::size_t i = 1; i < eig.size(); ++i) CHECK(eig[i].imag() >= eig[i - 1].imag());

    auto skew = uniform();
    skew.c2 = 2.0;
    const auto eig2 = spectrum(assemble_generator(skew, build_grid(skew, 60)));
    double max_re = 0.0, max_im = 0.0;
    for (const auto& z : eig2) {
      max_re = std::max(max_re, std::abs(z.real()));
      max_im = std::max(max_im, std::abs(z.imag()));
    }
    CHECK(max_re <= 1e-10 * max_im);
  }

  TEST_CASE("dense size limit") {
    const auto m = uniform();
    CHECK_THROWS_AS(spectrum(assemble_generator(m, build_grid(m, 2010))), ConfigError);
  }

  TEST_CASE("normal case: resolvent is one over the distance") {
    const auto m = uniform();
    const auto gen = assemble_generator(m, build_grid(m, 80));
    const auto eig = spectrum(gen);
    const auto up = upper_frequencies(eig);

    const auto at0 = resolvent_norm(gen, 0.0);
    CHECK(at0.norm == doctest::Approx(1.0 / up[0]).epsilon(1e-8));
    CHECK(at0.norm == doctest::Approx(1.0 / distance_to_spectrum(eig, 0.0)).epsilon(1e-8));

    const double mid = 0.5 * (up[0] + up[1]);
    CHECK(resolvent_norm(gen, mid).norm ==
          doctest::Approx(1.0 / std::min(mid - up[0], up[1] - mid)).epsilon(1e-8));
    CHECK(resolvent_norm(gen, -mid).norm == doctest::Approx(resolvent_norm(gen, mid).norm).epsilon(1e-8));
  }

  TEST_CASE("eigenvalue hit gives the infinite sentinel") {
    const auto m = uniform();
    const auto gen = assemble_generator(m, build_grid(m, 40));
    const auto up = upper_frequencies(spectrum(gen));
    const auto s = resolvent_norm(gen, up[2]);
    CHECK(s.singular);
    CHECK(std::isinf(s.norm));
    const auto sweep = resolvent_sweep(gen, {1.0, up[2]});
    CHECK(std::isinf(sweep.samples[1].norm));
    CHECK(sweep.envelope.finite_samples == 1);
  }

  TEST_CASE("damped lower bound") {
    const TransmissionModel1D m;
    const auto gen = assemble_generator(m, build_grid(m, 60));
    const auto eig = spectrum(gen);
    for (double mu : {0.0, 7.0, 31.0})
      CHECK(resolvent_norm(gen, mu).norm >= (1.0 - 1e-8) / distance_to_spectrum(eig, mu));
  }

  TEST_CASE("envelope") {
    ResolventSample s0;
    s0.mu = 0.0;
    s0.norm = 3.0;
    const auto single = fit_envelope({s0});
    CHECK(single.c_a == doctest::Approx(std::log(3.0)));
    CHECK(single.c_b == 0.0);

    std::vector<ResolventSample> line;
    for (double mu : {1.0, 2.0, 3.0, 4.0}) {
      ResolventSample s;
      s.mu = mu;
      s.norm = std::exp(0.5 + 0.25 * mu);
      line.push_back(s);
    }
    const auto env = fit_envelope(line);
    CHECK(env.c_a == doctest::Approx(0.5));
    CHECK(env.c_b == doctest::Approx(0.25));

    std::vector<ResolventSample> falling = line;
    for (auto& s : falling) s.norm = std::exp(2.0 - s.mu);
    const auto flat = fit_envelope(falling);
    CHECK(flat.c_b == 0.0);
    CHECK(flat.c_a == doctest::Approx(1.0));

    const auto mus = log_spaced(5.0, 400.0, 100);
    CHECK(mus.size() == 100);
    CHECK(mus.front() == doctest::Approx(5.0));
    CHECK(mus.back() == doctest::Approx(400.0));
    CHECK(mus[1] / mus[0] == doctest::Approx(mus[99] / mus[98]));
  }

  TEST_CASE("fd weights") {
    const auto w = fd_weights(0.0, {-1.0, 0.0, 1.0}, 2);
    CHECK(w[0] == doctest::Approx(1.0));
    CHECK(w[1] == doctest::Approx(-2.0));
    CHECK(w[2] == doctest::Approx(1.0));
  }

  TEST_CASE("reduction with zero forcing") {
    const TransmissionModel1D m;
    const auto gen = assemble_generator(m, build_grid(m, 50));
    ForcingPair f{Eigen::VectorXcd::Zero(gen.unknowns()), Eigen::VectorXcd::Zero(gen.unknowns())};
    const auto r = reduction_check(gen, 10.0, f);
    CHECK(r.data_norm == 0.0);
    CHECK(r.w.norm() == 0.0);
    CHECK(r.algebraic_residual == 0.0);
    CHECK(r.consistency_residual == 0.0);
    ForcingPair bad{Eigen::VectorXcd::Zero(3), Eigen::VectorXcd::Zero(3)};
    CHECK_THROWS_AS(reduction_check(gen, 10.0, bad), ConfigError);
  }

  TEST_CASE("reduction identities and order") {
    for (bool damped : {true, false}) {
      TransmissionModel1D m;
      if (!damped) m.damping.shape = DampingShape::none;
      double r[2];
      int i = 0;
      for (int n : {100, 200}) {
        const auto gen = assemble_generator(m, build_grid(m, n));
        const auto rep = reduction_check(gen, 10.0, smooth_forcing(gen.grid(), 7));
        CHECK(rep.solve_residual <= 1e-14 * std::pow(n, 4));
        CHECK(rep.algebraic_residual <= 1e-14 * std::pow(n, 4));
        CHECK(rep.boundary_trace <= 1e-6 * rep.w.cwiseAbs().maxCoeff());
        r[i++] = rep.consistency_residual;
      }
      CHECK(r[0] / r[1] == doctest::Approx(4.0).epsilon(0.1));
    }
  }
}
