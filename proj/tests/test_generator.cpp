#include <doctest.h>

#include <cmath>
#include <numbers>

#include "kvplate/generator.hpp"

using namespace kvplate;
using std::numbers::pi;

namespace {
TransmissionModel1D uniform() {
  TransmissionModel1D m;
  m.damping.shape = DampingShape::none;
  return m;
}
}  // namespace

TEST_SUITE("generator") {
  TEST_CASE("skew without damping") {
    const auto m = uniform();
    AssemblyCheck check;
    const auto gen = assemble_generator(m, build_grid(m, 100), 3, &check);
    CHECK_FALSE(gen.damped());
    CHECK(check.max_dissipation_defect <= 1e-12);
    CHECK(check.max_skew_defect <= 1e-12);
    for (std::uint64_t s = 0; s < 5; ++s) {
      const State u = random_state(gen.unknowns(), s);
      CHECK(std::abs(gen.inner(gen.apply(u), u)) <= 1e-12 * gen.inner(u, u));
    }
  }

  TEST_CASE("dissipation identity and sign") {
    const TransmissionModel1D m;
    const auto gen = assemble_generator(m, build_grid(m, 100));
    const auto check = check_invariants(gen, 17);
    CHECK(check.max_dissipation_defect <= 1e-10);

    State s = State::zero(gen.unknowns());
    for (int j = 0; j < gen.unknowns(); ++j) {
      const double x = gen.grid().unknown_x(j);
      s.u[j] = std::sin(pi * x);
      if (std::abs(x - m.damping.center) < m.damping.half_width) s.v[j] = std::cos(40 * x);
    }
    CHECK(gen.inner(gen.apply(s), s) < 0.0);
    CHECK(gen.inner(gen.apply(s), s) == doctest::Approx(-gen.dissipation_rate(s)).epsilon(1e-12));

    s.v.setZero();
    CHECK(gen.dissipation_rate(s) == 0.0);
    CHECK(std::abs(gen.inner(gen.apply(s), s)) <= 1e-12 * gen.inner(s, s));
  }

  TEST_CASE("block structure") {
    const TransmissionModel1D m;
    const auto gen = assemble_generator(m, build_grid(m, 50));
    State s = random_state(gen.unknowns(), 5);
    s.v.setZero();
    const State a = gen.apply(s);
    CHECK(a.u.norm() == 0.0);
    CHECK((a.v + gen.stiffness_block() * s.u).norm() <= 1e-12 * a.v.norm());

    State w = State::zero(gen.unknowns());
    for (int j = 0; j < gen.unknowns(); ++j)
      if (gen.grid().unknown_x(j) < 0.2) w.v[j] = 1.0 + j;
    const State b = gen.apply(w);
    CHECK(b.v.norm() == 0.0);
    CHECK((b.u - w.v).norm() == 0.0);
  }

  TEST_CASE("energy examples") {
    const TransmissionModel1D m;
    const auto gen = assemble_generator(m, build_grid(m, 100));
    CHECK(energy(gen, State::zero(gen.unknowns())) == 0.0);

    State s = State::zero(gen.unknowns());
    for (int j = 0; j < gen.unknowns(); ++j) {
      const auto role = gen.grid().unknown_role(j);
      if (role == NodeRole::omega1) s.v[j] = 1.0;
      if (role == NodeRole::interface) s.v[j] = std::sqrt(0.5);
    }
    CHECK(energy(gen, s) == doctest::Approx(0.2).epsilon(1e-12));

    const auto u = uniform();
    const auto ugen = assemble_generator(u, build_grid(u, 100));
    State sine = State::zero(ugen.unknowns());
    for (int j = 0; j < ugen.unknowns(); ++j) sine.u[j] = std::sin(pi * ugen.grid().unknown_x(j));
    const double exact = std::pow(pi, 4) / 4;
    CHECK(std::abs(ugen.energy(sine) - exact) <= 0.01 * exact);
  }

  TEST_CASE("energy frame is an isometry") {
    TransmissionModel1D m;
    m.c2 = 2.0;
    const auto gen = assemble_generator(m, build_grid(m, 60));
    const State s = random_state(gen.unknowns(), 9);
    const Eigen::VectorXd y = gen.to_energy_frame(s);
    CHECK(y.squaredNorm() == doctest::Approx(gen.inner(s, s)).epsilon(1e-12));
    const State back = gen.from_energy_frame(y);
    CHECK((back - s).u.norm() <= 1e-10 * s.u.norm());
    CHECK((back - s).v.norm() <= 1e-10 * s.v.norm());
    CHECK((gen.unflatten(gen.flatten(s)) - s).u.norm() == 0.0);
  }

  TEST_CASE("linearity") {
    const TransmissionModel1D m;
    const auto gen = assemble_generator(m, build_grid(m, 40));
    const State a = random_state(gen.unknowns(), 1), b = random_state(gen.unknowns(), 2);
    const State lhs = gen.apply(a + 3.0 * b);
    const State rhs = gen.apply(a) + 3.0 * gen.apply(b);
    CHECK((lhs - rhs).u.norm() <= 1e-12 * lhs.u.norm());
    CHECK((lhs - rhs).v.norm() <= 1e-12 * lhs.v.norm());
  }
}
