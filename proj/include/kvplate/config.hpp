#pragma once

#include <cstdint>
#include <filesystem>
#include <json.hpp>
#include <string>
#include <vector>

#include "kvplate/carleman/ratio1d.hpp"
#include "kvplate/carleman/weights.hpp"
#include "kvplate/evolution.hpp"
#include "kvplate/model.hpp"

namespace kvplate {

struct NumericsSection {
  int n_cells = 200;
  double dt = 0.01;
  double T = 50.0;
  int record_every = 1;
};

/// kind: "smooth" (random mix of the lowest `modes` undamped modes, from the
/// run seed) or "mode" (single undamped mode `mode`).
struct InitialSection {
  std::string kind = "smooth";
  int mode = 1;
  int modes = 8;
};

struct SweepSection {
  double mu_min = 5.0;
  double mu_max = 400.0;
  int points = 100;
};

struct CarlemanSection {
  std::vector<double> h_sweep{0.1, 0.05, 0.025, 0.0125};
  carleman::CarlemanOptions options;
};

struct WeightsSection {
  AnnularDomain2D domain;
  double lambda_cap = 1024.0;
  int grid = 160;
  int boundary_samples = 512;
};

struct OutputSection {
  std::string trace = "trace.csv";
  std::string eig = "eig.csv";
  std::string sweep = "sweep.csv";
  std::string ratio = "ratio.csv";
  std::string weights = "weights.json";
  std::string summary = "summary.json";
};

struct RunConfig {
  TransmissionModel1D model;
  NumericsSection numerics;
  InitialSection initial;
  SweepSection sweep;
  CarlemanSection carleman;
  WeightsSection weights;
  OutputSection output;
  std::uint64_t seed = 1;
};

/// Sections: model, numerics, initial, sweep, carleman, weights, output and
/// the top-level seed. Missing keys keep their defaults; unknown keys and
/// invalid values throw ConfigError naming the field.
RunConfig make_run_config(const nlohmann::json& config);
RunConfig load_run_config(const std::filesystem::path& path);
nlohmann::json to_json(const RunConfig& config);

/// Throws ConfigError on the first invalid field.
void validate(const RunConfig& config);

InitialData initial_data(const RunConfig& config);

}  // namespace kvplate
