#include "kvplate/disc.hpp"

#include <charconv>
#include <cmath>
#include <ostream>
#include <string>

#include "kvplate/errors.hpp"

namespace kvplate {

namespace {

bool lands_on_node(double position, double length, int cells) {
  const double k = position / length * cells;
  return std::abs(k - std::round(k)) <= 1e-9 * cells;
}

}  // namespace

Grid1D build_grid(const TransmissionModel1D& model, int n_cells) {
  if (n_cells < kMinCells)
    throw ConfigError("n_cells: need at least " + std::to_string(kMinCells) + " cells (got " +
                      std::to_string(n_cells) + ")");
  const double L = model.length;
  const int limit = 100 * n_cells + 10000;
  int cells = n_cells;
  while (cells <= limit && !(lands_on_node(model.interface_left, L, cells) &&
                             lands_on_node(model.interface_right, L, cells)))
    ++cells;
  if (cells > limit)
    throw ConfigError("n_cells: no uniform grid up to " + std::to_string(limit) +
                      " cells puts both interfaces on nodes");

  Grid1D g;
  g.length = L;
  g.requested_cells = n_cells;
  g.n_cells = cells;
  g.spacing = L / cells;
  g.interface_left_node = static_cast<int>(std::lround(model.interface_left / L * cells));
  g.interface_right_node = static_cast<int>(std::lround(model.interface_right / L * cells));
  g.nodes.resize(static_cast<std::size_t>(cells) + 1);
  g.roles.resize(g.nodes.size());
  for (int j = 0; j <= cells; ++j) {
    auto& role = g.roles[static_cast<std::size_t>(j)];
    g.nodes[static_cast<std::size_t>(j)] = L * j / cells;
    if (j == 0 || j == cells)
      role = NodeRole::boundary;
    else if (j == g.interface_left_node || j == g.interface_right_node)
      role = NodeRole::interface;
    else if (j > g.interface_left_node && j < g.interface_right_node)
      role = NodeRole::omega1;
    else
      role = NodeRole::omega2;
  }

  const auto& d = model.damping;
  if (d.active()) {
    const double lo = d.support_left() - g.spacing;
    const double hi = d.support_right() + g.spacing;
    if (lo <= model.interface_left || hi >= model.interface_right)
      throw ConfigError("n_cells: damping support dilated by the grid spacing " +
                        std::to_string(g.spacing) + " reaches an interface; refine the grid");
  }
  return g;
}

TransmissionLaplacian assemble_G(const TransmissionModel1D& model, const Grid1D& grid) {
  const int n = grid.unknowns();
  const double h = grid.spacing;
  const double c_if = 2.0 / (1.0 / model.c1 + 1.0 / model.c2);

  TransmissionLaplacian lap;
  lap.speed.resize(n);
  lap.mass.resize(n);
  for (int i = 0; i < n; ++i) {
    switch (grid.unknown_role(i)) {
      case NodeRole::omega1: lap.speed[i] = model.c1; break;
      case NodeRole::omega2: lap.speed[i] = model.c2; break;
      default: lap.speed[i] = c_if; break;
    }
    lap.mass[i] = h / lap.speed[i];
  }

  std::vector<Eigen::Triplet<double>> k, gt;
  k.reserve(3 * static_cast<std::size_t>(n));
  gt.reserve(3 * static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const double scale = 1.0 / lap.mass[i];
    k.emplace_back(i, i, 2.0 / h);
    gt.emplace_back(i, i, scale * 2.0 / h);
    if (i > 0) {
      k.emplace_back(i, i - 1, -1.0 / h);
      gt.emplace_back(i, i - 1, -scale / h);
    }
    if (i + 1 < n) {
      k.emplace_back(i, i + 1, -1.0 / h);
      gt.emplace_back(i, i + 1, -scale / h);
    }
  }
  lap.stiffness.resize(n, n);
  lap.stiffness.setFromTriplets(k.begin(), k.end());
  lap.G.resize(n, n);
  lap.G.setFromTriplets(gt.begin(), gt.end());
  return lap;
}

SparseMatrix assemble_bilaplacian(const TransmissionModel1D&, const Grid1D& grid,
                                  const TransmissionLaplacian& lap) {
  if (lap.G.rows() != grid.unknowns())
    throw ConfigError("assemble_bilaplacian: Laplacian does not match the grid");
  SparseMatrix b = lap.G * lap.G;
  b.makeCompressed();
  return b;
}

SparseMatrix second_difference(const Grid1D& grid) {
  const int n = grid.unknowns();
  const double inv_h2 = 1.0 / (grid.spacing * grid.spacing);
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(3 * static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    t.emplace_back(i, i, -2.0 * inv_h2);
    if (i > 0) t.emplace_back(i, i - 1, inv_h2);
    if (i + 1 < n) t.emplace_back(i, i + 1, inv_h2);
  }
  SparseMatrix l(n, n);
  l.setFromTriplets(t.begin(), t.end());
  return l;
}

void write_coordinate(std::ostream& os, const SparseMatrix& m) {
  os << "% " << m.rows() << ' ' << m.cols() << ' ' << m.nonZeros() << '\n';
  char buf[64];
  for (int col = 0; col < m.outerSize(); ++col)
    for (SparseMatrix::InnerIterator it(m, col); it; ++it) {
      auto res = std::to_chars(buf, buf + sizeof buf, it.value());
      os << it.row() << ' ' << it.col() << ' ' << std::string_view(buf, res.ptr - buf) << '\n';
    }
}

}  // namespace kvplate
