#include <doctest.h>

#include <cstring>

#include "kvplate/carleman/critical_points.hpp"
#include "kvplate/carleman/ratio1d.hpp"
#include "kvplate/carleman/weights.hpp"
#include "kvplate/errors.hpp"
#include "kvplate/evolution.hpp"
#include "kvplate/spectral.hpp"

using namespace kvplate;

namespace {
bool same(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }
}  // namespace

TEST_SUITE("parallel") {
  TEST_CASE("resolvent sweep") {
    const TransmissionModel1D m;
    const auto gen = assemble_generator(m, build_grid(m, 60));
    const auto mus = log_spaced(5.0, 200.0, 12);
    const auto a = resolvent_sweep(gen, mus, Exec::serial);
    const auto b = resolvent_sweep(gen, mus, Exec::parallel);
    for (std::size_t i = 0; i < mus.size(); ++i) CHECK(same(a.samples[i].norm, b.samples[i].norm));
    CHECK(same(a.envelope.c_a, b.envelope.c_a));
  }

  TEST_CASE("mode sweep") {
    const TransmissionModel1D m;
    const auto gen = assemble_generator(m, build_grid(m, 40));
    const auto a = mode_decay_sweep(gen, {1, 2, 3}, 50.0, 0.1, Exec::serial);
    const auto b = mode_decay_sweep(gen, {1, 2, 3}, 50.0, 0.1, Exec::parallel);
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(same(a[i].rate, b[i].rate));
  }

  TEST_CASE("weights kernels") {
    const auto pair = carleman::build_weight_pair(AnnularDomain2D{});
    carleman::ScanOptions so;
    so.exec = Exec::serial;
    const auto s = carleman::find_critical_points(pair.psi2, pair.domain, so);
    so.exec = Exec::parallel;
    const auto p = carleman::find_critical_points(pair.psi2, pair.domain, so);
    REQUIRE(s.size() == p.size());
    for (std::size_t i = 0; i < s.size(); ++i) CHECK((s[i].x.array() == p[i].x.array()).all());

    carleman::CertifyOptions co;
    co.grid = 80;
    co.exec = Exec::serial;
    const auto cs = carleman::certify_subellipticity(pair, 1, co);
    co.exec = Exec::parallel;
    const auto cp = carleman::certify_subellipticity(pair, 1, co);
    CHECK(same(cs.min_bracket, cp.min_bracket));
    CHECK(cs.lambda_used == cp.lambda_used);
  }

  TEST_CASE("carleman sweep") {
    const auto setup = carleman::make_carleman_setup(TransmissionModel1D{});
    const auto w = carleman::ManufacturedPair::cosine(setup);
    const auto a = carleman::carleman_sweep(setup, {0.1, 0.05, 0.025}, w, Exec::serial);
    const auto b = carleman::carleman_sweep(setup, {0.1, 0.05, 0.025}, w, Exec::parallel);
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(same(a[i].ratio, b[i].ratio));
  }

  TEST_CASE("exceptions reach the caller") {
    CHECK_THROWS_AS(for_each_index(Exec::parallel, 8,
                                   [](std::ptrdiff_t i) {
                                     if (i == 5) throw NumericalError("boom");
                                   }),
                    NumericalError);
  }
}
