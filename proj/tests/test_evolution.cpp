#include <doctest.h>

#include <cmath>

#include "kvplate/errors.hpp"
#include "kvplate/evolution.hpp"

using namespace kvplate;

namespace {
TransmissionModel1D uniform() {
  TransmissionModel1D m;
  m.damping.shape = DampingShape::none;
  return m;
}

EnergyTrace synthetic(double (*e)(double)) {
  EnergyTrace t;
  t.dt = 0.05;
  for (int i = 0; i <= 2000; ++i) t.samples.push_back({0.05 * i, e(0.05 * i), 0.0, 0.0});
  return t;
}
}  // namespace

TEST_SUITE("evolution") {
  TEST_CASE("undamped steps conserve energy") {
    const auto m = uniform();
    const auto gen = assemble_generator(m, build_grid(m, 100));
    const CayleyStepper stepper(gen, 0.01);
    State s = random_state(gen.unknowns(), 4);
    const double e0 = gen.energy(s);
    for (int i = 0; i < 1000; ++i) s = stepper.step(s);
    CHECK(std::abs(gen.energy(s) - e0) <= 1e-9 * e0);
  }

  TEST_CASE("damped steps lose exactly the dissipated energy") {
    const TransmissionModel1D m;
    const auto gen = assemble_generator(m, build_grid(m, 100));
    const double dt = 0.01;
    const CayleyStepper stepper(gen, dt);
    State s = realize(gen, SmoothData{8, 3});
    for (int i = 0; i < 50; ++i) {
      const State next = stepper.step(s);
      const double rate = gen.dissipation_rate(0.5 * (s + next));
      CHECK(rate > 0.0);
      CHECK(gen.energy(next) < gen.energy(s));
      CHECK(gen.energy(s) - gen.energy(next) == doctest::Approx(dt * rate).epsilon(1e-8));
      s = next;
    }
    const State one = step(gen, s, dt);
    CHECK((one - stepper.step(s)).u.norm() <= 1e-12 * s.u.norm());
  }

  TEST_CASE("second order in time") {
    const TransmissionModel1D m;
    const auto gen = assemble_generator(m, build_grid(m, 60));
    const State s0 = realize(gen, ModeData{1});
    const auto run = [&](double dt) {
      State s;
      simulate(gen, s0, 1.0, dt, 1000000, &s);
      return s;
    };
    const State ref = run(1.0 / 5120);
    const State a = run(0.04), b = run(0.02);
    const double e1 = std::sqrt(gen.inner(a - ref, a - ref));
    const double e2 = std::sqrt(gen.inner(b - ref, b - ref));
    CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.1));
  }

  TEST_CASE("trace invariants") {
    const TransmissionModel1D m;
    const auto gen = assemble_generator(m, build_grid(m, 100));

    const auto zero = simulate(gen, State::zero(gen.unknowns()), 1.0, 0.1);
    for (const auto& s : zero.samples) CHECK(s.energy == 0.0);

    const auto u = uniform();
    const auto ugen = assemble_generator(u, build_grid(u, 100));
    const auto free = simulate(ugen, SmoothData{}, 5.0, 0.01);
    for (const auto& s : free.samples) {
      CHECK(s.cumulative_dissipation == 0.0);
      CHECK(s.energy == doctest::Approx(1.0).epsilon(1e-10));
    }

    const auto damped = simulate(gen, ModeData{1}, 50.0, 0.01, 10);
    CHECK(damped.samples.size() == 501);
    CHECK(damped.samples.front().energy == doctest::Approx(1.0));
    CHECK(damped.samples.back().energy < damped.samples.front().energy);
    CHECK(damped.max_identity_residual() <= 1e-6);
    CHECK(damped.max_relative_increase() <= 0.0);
  }

  TEST_CASE("bad run parameters") {
    const TransmissionModel1D m;
    const auto gen = assemble_generator(m, build_grid(m, 20));
    CHECK_THROWS_AS(simulate(gen, ModeData{1}, 0.0, 0.1), ConfigError);
    CHECK_THROWS_AS(simulate(gen, ModeData{1}, 1.0, -0.1), ConfigError);
    CHECK_THROWS_AS(simulate(gen, ModeData{1}, 1.0, 2.0), ConfigError);
    CHECK_THROWS_AS(realize(gen, ModeData{0}), ConfigError);
    CHECK_THROWS_AS(realize(gen, State::zero(3)), ConfigError);
  }

  TEST_CASE("undamped modes are M_c orthonormal") {
    const auto m = uniform();
    const auto gen = assemble_generator(m, build_grid(m, 40));
    const auto modes = undamped_modes(gen);
    const Eigen::MatrixXd gram = modes.shapes.transpose() * gen.laplacian().mass.asDiagonal() * modes.shapes;
    CHECK((gram - Eigen::MatrixXd::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff() <= 1e-10);
    for (int k = 1; k < modes.frequencies.size(); ++k) CHECK(modes.frequencies[k] > modes.frequencies[k - 1]);
  }

  TEST_CASE("decay fits") {
    const auto log1 = fit_decay(synthetic([](double t) { return 4.0 / std::pow(std::log(2.0 + t), 2); }), 1);
    CHECK(log1.log_law_constant == doctest::Approx(4.0).epsilon(1e-10));
    CHECK(log1.log_law_residual <= 1e-6);
    CHECK_FALSE(log1.exponential_preferred());

    const auto log2 = fit_decay(synthetic([](double t) { return 4.0 / std::pow(std::log(2.0 + t), 4); }), 2);
    CHECK(log2.log_law_constant == doctest::Approx(4.0).epsilon(1e-10));

    const auto ex = fit_decay(synthetic([](double t) { return std::exp(-t); }), 1);
    CHECK(ex.exponential_preferred());
    CHECK(ex.exp_rate == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(ex.exp_residual < 1e-3 * ex.log_law_residual);

    EnergyTrace short_trace;
    short_trace.samples.push_back({0.0, 1.0, 0.0, 0.0});
    short_trace.samples.push_back({10.0, 0.5, 0.0, 0.0});
    CHECK_THROWS_AS(fit_decay(short_trace, 1), ConfigError);
    CHECK_THROWS_AS(fit_decay(synthetic([](double) { return 1.0; }), 0), ConfigError);
  }

  TEST_CASE("mode sweep") {
    const TransmissionModel1D m;
    const auto gen = assemble_generator(m, build_grid(m, 60));
    const auto r = mode_decay_sweep(gen, {2, 3}, 50.0, 0.05);
    REQUIRE(r.size() == 2);
    CHECK(r[0].mode == 2);
    CHECK(r[0].rate > 0.0);
    CHECK(r[0].max_identity_residual <= 1e-6);
  }
}
