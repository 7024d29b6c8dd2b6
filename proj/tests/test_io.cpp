#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "kvplate/cli.hpp"
#include "kvplate/config.hpp"
#include "kvplate/csv.hpp"
#include "kvplate/errors.hpp"

using namespace kvplate;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {
struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("kvplate-test-" + std::to_string(std::random_device{}()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

void write(const std::string& path, const std::string& text) { std::ofstream(path) << text; }

struct Result {
  int code;
  std::string out, err;
};

Result run_cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}
}  // namespace

TEST_SUITE("config") {
  TEST_CASE("defaults") {
    const auto c = make_run_config(json::object());
    CHECK(c.numerics.n_cells == 200);
    CHECK(c.carleman.h_sweep.size() == 4);
    CHECK(c.weights.lambda_cap == 1024.0);
    CHECK(std::holds_alternative<SmoothData>(initial_data(c)));
  }

  TEST_CASE("round trip") {
    json j = {{"numerics", {{"n_cells", 120}, {"T", 60}}},
              {"initial", {{"kind", "mode"}, {"mode", 3}}},
              {"weights", {{"hole_x", -0.2}, {"grid", 100}}},
              {"seed", 9}};
    const auto c = make_run_config(j);
    CHECK(c.numerics.n_cells == 120);
    CHECK(std::get<ModeData>(initial_data(c)).mode == 3);
    CHECK(c.weights.domain.hole_center.x() == -0.2);
    CHECK(to_json(make_run_config(to_json(c))) == to_json(c));
  }

  TEST_CASE("field errors") {
    CHECK_THROWS_WITH_AS(make_run_config({{"model", {{"c1", -1}}}}), doctest::Contains("c1"), ConfigError);
    CHECK_THROWS_WITH_AS(make_run_config({{"numerics", {{"steps", 3}}}}), doctest::Contains("steps"), ConfigError);
    CHECK_THROWS_AS(make_run_config({{"extra", 1}}), ConfigError);
    CHECK_THROWS_AS(make_run_config({{"numerics", {{"dt", "fast"}}}}), ConfigError);
    CHECK_THROWS_AS(make_run_config({{"carleman", {{"h_sweep", {0.1, 0.3}}}}}), ConfigError);
    CHECK_THROWS_AS(make_run_config({{"carleman", {{"slopes", {1}}}}}), ConfigError);
    CHECK_THROWS_AS(make_run_config({{"initial", {{"kind", "noise"}}}}), ConfigError);
    CHECK_THROWS_AS(make_run_config({{"seed", -2}}), ConfigError);
    CHECK_THROWS_AS(load_run_config("/nonexistent/kv.json"), ConfigError);
  }

  TEST_CASE("file with comments") {
    TempDir dir;
    write(dir.file("c.json"), "{\n  // short run\n  \"numerics\": {\"T\": 2}\n}\n");
    CHECK(load_run_config(dir.file("c.json")).numerics.T == 2.0);
    write(dir.file("bad.json"), "{ \"numerics\": ");
    CHECK_THROWS_AS(load_run_config(dir.file("bad.json")), ConfigError);
  }
}

TEST_SUITE("csv") {
  TEST_CASE("number format") {
    CHECK(format_number(0.1) == "0.1");
    CHECK(format_number(-2.5e-300) == "-2.5e-300");
    CHECK(format_number(1.0 / 0.0) == "inf");
    CHECK(format_number(-1.0 / 0.0) == "-inf");
    CHECK(format_number(std::nan("")) == "nan");
  }

  TEST_CASE("write and read back") {
    TempDir dir;
    {
      std::ofstream f(dir.file("t.csv"));
      CsvWriter w(f, {"a", "b"});
      w.row({1.0, 0.1});
      w.row(std::vector<double>{1.0 / 3.0, 1.0 / 0.0});
      CHECK_THROWS_AS(w.row({1.0}), std::exception);
    }
    const auto t = read_csv(dir.file("t.csv"));
    REQUIRE(t.rows.size() == 2);
    CHECK(t.values("a")[1] == 1.0 / 3.0);
    CHECK(std::isinf(t.values("b")[1]));
    CHECK_THROWS_AS(t.column("c"), ConfigError);

    write(dir.file("ragged.csv"), "a,b\n1,2\n3\n");
    CHECK_THROWS_AS(read_csv(dir.file("ragged.csv")), ConfigError);
    write(dir.file("word.csv"), "a\nseven\n");
    CHECK_THROWS_AS(read_csv(dir.file("word.csv")), ConfigError);
    CHECK_THROWS_AS(read_csv(dir.file("missing.csv")), ConfigError);
  }
}

TEST_SUITE("cli") {
  TEST_CASE("unknown subcommand") {
    const auto r = run_cli({"frobnicate"});
    CHECK(r.code == exit_config);
    CHECK(r.err.find("unknown subcommand") != std::string::npos);
    CHECK(r.err.find("simulate") != std::string::npos);
    CHECK(run_cli({}).code == exit_config);
    CHECK(run_cli({"simulate", "--bogus"}).code == exit_config);
  }

  TEST_CASE("invalid field") {
    TempDir dir;
    write(dir.file("c.json"), R"({"model": {"c1": -1}})");
    const auto r = run_cli({"simulate", "--config", dir.file("c.json")});
    CHECK(r.code == exit_config);
    CHECK(r.err.find("c1") != std::string::npos);
  }

  TEST_CASE("simulate writes a monotone trace") {
    TempDir dir;
    const auto r = run_cli({"simulate", "--T", "2", "--n-cells", "60", "--out", dir.file("trace.csv")});
    REQUIRE(r.code == exit_ok);
    const auto t = read_csv(dir.file("trace.csv"));
    const auto e = t.values("energy");
    CHECK(e.size() == 201);
    for (std::size_t i = 1; i < e.size(); ++i) CHECK(e[i] <= e[i - 1]);
  }

  TEST_CASE("report with a missing section and an empty trace") {
    TempDir dir;
    REQUIRE(run_cli({"simulate", "--T", "60", "--dt", "0.1", "--n-cells", "40", "--out", dir.file("trace.csv")}).code ==
            exit_ok);
    REQUIRE(run_cli({"carleman", "--h-sweep", "0.1,0.05", "--out", dir.file("ratio.csv")}).code == exit_ok);
    const auto r = run_cli({"report", "--trace", dir.file("trace.csv"), "--ratio", dir.file("ratio.csv"), "--sweep",
                            dir.file("sweep.csv"), "--eig", dir.file("eig.csv"), "--weights",
                            dir.file("weights.json"), "--out", dir.file("summary.json")});
    REQUIRE(r.code == exit_ok);
    json s;
    std::ifstream(dir.file("summary.json")) >> s;
    CHECK(s["resolvent"].is_null());
    CHECK(s["energy"].is_object());
    CHECK(s["carleman"].is_object());

    write(dir.file("empty.csv"), "t,energy,cumulative_dissipation,identity_residual\n");
    CHECK(run_cli({"report", "--trace", dir.file("empty.csv"), "--out", dir.file("s2.json")}).code == exit_config);
  }

  TEST_CASE("numerical failure writes a diagnostic") {
    TempDir dir;
    write(dir.file("c.json"), R"({"weights": {"lambda_cap": 2}})");
    const auto r = run_cli({"weights", "--config", dir.file("c.json"), "--out", dir.file("w.json"), "--diagnostic",
                            dir.file("diag.json")});
    CHECK(r.code == exit_numerical);
    REQUIRE(fs::exists(dir.file("diag.json")));
    json d;
    std::ifstream(dir.file("diag.json")) >> d;
    CHECK(d["command"] == "weights");
    CHECK(d["exit_code"] == 2);
  }

  TEST_CASE("carleman rejects h above h0") {
    CHECK(run_cli({"carleman", "--h-sweep", "0.3", "--out", "/dev/null"}).code == exit_config);
  }
}
