#include <CLI11.hpp>
#include <chrono>
#include <cstdio>
#include <cstring>
#include <functional>
#include <string>
#include <vector>

#include "kvplate/carleman/critical_points.hpp"
#include "kvplate/carleman/ratio1d.hpp"
#include "kvplate/carleman/weights.hpp"
#include "kvplate/disc.hpp"
#include "kvplate/evolution.hpp"
#include "kvplate/generator.hpp"
#include "kvplate/spectral.hpp"

using namespace kvplate;

namespace {

double seconds(const std::function<void()>& f) {
  const auto t0 = std::chrono::steady_clock::now();
  f();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

bool same_bits(const std::vector<double>& a, const std::vector<double>& b) {
  return a.size() == b.size() && (a.empty() || std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0);
}

struct Kernel {
  std::string name;
  std::function<std::vector<double>(Exec)> run;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"serial vs parallel timings of the data-parallel kernels"};
  int n_cells = 200, points = 40, repeats = 1;
  app.add_option("--n-cells", n_cells, "grid for the 1-D kernels");
  app.add_option("--points", points, "mu samples in the resolvent sweep");
  app.add_option("--repeats", repeats, "timing repeats (best is reported)");
  CLI11_PARSE(app, argc, argv);

  TransmissionModel1D model;
  const DiscreteGenerator gen = assemble_generator(model, build_grid(model, n_cells));
  const auto mus = log_spaced(5.0, 400.0, points);
  carleman::WeightOptions wo;
  const auto pair = carleman::build_weight_pair(AnnularDomain2D{}, wo);
  const auto setup = carleman::make_carleman_setup(model);
  const auto w = carleman::ManufacturedPair::cosine(setup);

  std::vector<Kernel> kernels{
      {"resolvent_sweep",
       [&](Exec e) {
         std::vector<double> out;
         for (const auto& s : resolvent_sweep(gen, mus, e).samples) out.push_back(s.norm);
         return out;
       }},
      {"mode_decay_sweep",
       [&](Exec e) {
         std::vector<double> out;
         for (const auto& m : mode_decay_sweep(gen, {4, 8, 12, 16}, 50.0, 0.05, e)) out.push_back(m.rate);
         return out;
       }},
      {"critical_point_scan",
       [&](Exec e) {
         carleman::ScanOptions so;
         so.exec = e;
         so.grid = 400;
         std::vector<double> out;
         for (const auto& c : carleman::find_critical_points(pair.psi2, pair.domain, so)) {
           out.push_back(c.x.x());
           out.push_back(c.x.y());
         }
         return out;
       }},
      {"certify_subellipticity",
       [&](Exec e) {
         carleman::CertifyOptions co;
         co.exec = e;
         co.grid = 240;
         const auto c = carleman::certify_subellipticity(pair, 2, co);
         return std::vector<double>{c.lambda_used, c.min_bracket};
       }},
      {"carleman_sweep",
       [&](Exec e) {
         std::vector<double> out;
         for (const auto& t : carleman::carleman_sweep(setup, {0.1, 0.05, 0.025, 0.0125}, w, e))
           out.push_back(t.ratio);
         return out;
       }},
  };

  std::printf("threads %d, n_cells %d, mu points %d\n", hardware_threads(), n_cells, points);
  std::printf("%-24s %12s %12s %9s %s\n", "kernel", "serial_s", "parallel_s", "speedup", "bit_identical");
  bool all_same = true;
  for (const auto& k : kernels) {
    double ts = 1e300, tp = 1e300;
    std::vector<double> rs, rp;
    for (int r = 0; r < repeats; ++r) {
      ts = std::min(ts, seconds([&] { rs = k.run(Exec::serial); }));
      tp = std::min(tp, seconds([&] { rp = k.run(Exec::parallel); }));
    }
    const bool same = same_bits(rs, rp);
    all_same = all_same && same;
    std::printf("%-24s %12.4f %12.4f %9.2f %s\n", k.name.c_str(), ts, tp, ts / tp, same ? "yes" : "NO");
  }
  return all_same ? 0 : 1;
}
