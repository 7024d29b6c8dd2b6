#include <doctest.h>

#include "kvplate/errors.hpp"
#include "kvplate/model.hpp"

using namespace kvplate;
using nlohmann::json;

namespace {
json base() {
  return {{"L", 1}, {"a_if", 0.3}, {"b_if", 0.7}, {"c1", 1}, {"c2", 1},
          {"damping", {{"m", 0.5}, {"w", 0.1}, {"a_max", 1}}}};
}
}  // namespace

TEST_SUITE("model") {
  TEST_CASE("reference configuration is valid") {
    const auto m = make_model(base());
    CHECK(m.interface_left == 0.3);
    CHECK(m.interface_right == 0.7);
    CHECK(m.damping.shape == DampingShape::smooth_bump);
    CHECK(m.damping.support_right() == doctest::Approx(0.6));
  }

  TEST_CASE("support reaching the interface is rejected") {
    json j = base();
    j["damping"]["m"] = 0.69;
    j["damping"]["w"] = 0.05;
    CHECK_THROWS_AS(make_model(j), ConfigError);
  }

  TEST_CASE("zero amplitude is rejected for a bump, accepted for none") {
    json j = base();
    j["damping"]["a_max"] = 0;
    CHECK_THROWS_AS(make_model(j), ConfigError);
    j["damping"]["shape"] = "none";
    CHECK_NOTHROW(make_model(j));
  }

  TEST_CASE("bad fields") {
    json j = base();
    j["c1"] = -1;
    CHECK_THROWS_WITH_AS(make_model(j), doctest::Contains("c1"), ConfigError);
    j = base();
    j["colour"] = 3;
    CHECK_THROWS_AS(make_model(j), ConfigError);
    j = base();
    j["a_if"] = 0.8;
    CHECK_THROWS_AS(make_model(j), ConfigError);
    j = base();
    j["damping"]["shape"] = "square";
    CHECK_THROWS_AS(make_model(j), ConfigError);
  }

  TEST_CASE("json round trip") {
    json j = base();
    j["c2"] = 2.5;
    j["damping"]["shape"] = "plateau-bump";
    const auto m = make_model(j);
    const auto back = make_model(to_json(m));
    CHECK(back.c2 == 2.5);
    CHECK(back.damping.shape == DampingShape::plateau_bump);
    CHECK(to_json(back) == to_json(m));
  }

  TEST_CASE("damping values") {
    for (auto shape : {DampingShape::smooth_bump, DampingShape::plateau_bump}) {
      TransmissionModel1D m;
      m.damping.shape = shape;
      const auto& d = m.damping;
      CHECK(eval_damping(m, d.center) == doctest::Approx(d.amplitude));
      CHECK(eval_damping(m, m.interface_left) == 0.0);
      CHECK(eval_damping(m, d.support_left()) == 0.0);
      const double half = eval_damping(m, d.center + d.half_width / 2);
      CHECK(half >= d.amplitude / 2);
      CHECK(half <= d.amplitude);
      for (double s : {0.1, 0.37, 0.8})
        CHECK(eval_damping(m, d.center + s * d.half_width) ==
              doctest::Approx(eval_damping(m, d.center - s * d.half_width)).epsilon(1e-14));
    }
    TransmissionModel1D m;
    CHECK_THROWS_AS(eval_damping(m, 1.5), ConfigError);
    CHECK_THROWS_AS(eval_damping(m, -0.1), ConfigError);
    m.damping.shape = DampingShape::none;
    CHECK(eval_damping(m, 0.5) == 0.0);
  }

  TEST_CASE("plateau shape is flat on the inner half") {
    TransmissionModel1D m;
    m.damping.shape = DampingShape::plateau_bump;
    for (double s : {-0.5, -0.2, 0.0, 0.3, 0.5})
      CHECK(eval_damping(m, m.damping.center + s * m.damping.half_width) == doctest::Approx(1.0));
  }

  TEST_CASE("annular domain") {
    AnnularDomain2D d;
    CHECK(d.contains({-0.5, 0.0}));
    CHECK_FALSE(d.contains({0.3, 0.0}));
    CHECK_FALSE(d.contains({1.1, 0.0}));
    CHECK(d.boundary_distance({-0.5, 0.0}) == doctest::Approx(0.5));
    CHECK(d.hole_normal({0.3, 0.5}).isApprox(Eigen::Vector2d(0, -1)));
    CHECK(d.outer_normal({0.0, 0.5}).isApprox(Eigen::Vector2d(0, 1)));
    d.hole_radius = 0.8;
    CHECK_THROWS_AS(validate(d), ConfigError);
  }
}
