#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>
#include <iosfwd>
#include <vector>

#include "kvplate/model.hpp"

namespace kvplate {

using SparseMatrix = Eigen::SparseMatrix<double>;

enum class NodeRole { boundary, omega1, omega2, interface };

/// Uniform grid on [0, L] whose nodes include both interface points.
///
/// The Dirichlet nodes 0 and L are eliminated: discrete fields live on the
/// interior nodes 1..n_cells-1, addressed by "unknown index" i = node - 1.
struct Grid1D {
  double length = 0.0;
  int requested_cells = 0;
  int n_cells = 0;
  double spacing = 0.0;
  int interface_left_node = 0;
  int interface_right_node = 0;
  std::vector<double> nodes;
  std::vector<NodeRole> roles;

  int unknowns() const { return n_cells - 1; }
  double unknown_x(int i) const { return nodes[static_cast<std::size_t>(i + 1)]; }
  NodeRole unknown_role(int i) const { return roles[static_cast<std::size_t>(i + 1)]; }
  int interface_left_unknown() const { return interface_left_node - 1; }
  int interface_right_unknown() const { return interface_right_node - 1; }
  bool adjusted() const { return n_cells != requested_cells; }
};

inline constexpr int kMinCells = 10;

/// Smallest grid with at least n_cells cells that puts a_if and b_if on
/// nodes. Throws ConfigError below kMinCells, when no such grid is found, or
/// when the damping support dilated by one spacing touches an interface.
Grid1D build_grid(const TransmissionModel1D& model, int n_cells);

/// Discrete G = -c d^2/dx^2 on the interior unknowns.
///
/// With K the P1 stiffness matrix (1/h)[-1 2 -1] and M_c the lumped mass
/// with weights h/c (interface nodes: h/c_if, c_if the harmonic mean of c1
/// and c2), G = M_c^{-1} K. Hence M_c G = K is symmetric and positive
/// definite by construction.
struct TransmissionLaplacian {
  SparseMatrix G;
  SparseMatrix stiffness;
  Eigen::VectorXd mass;   ///< diagonal of M_c
  Eigen::VectorXd speed;  ///< nodal c used in row scaling
};

TransmissionLaplacian assemble_G(const TransmissionModel1D& model, const Grid1D& grid);

/// Hinged fourth-order block G*G. Its M_c-energy u^T G^T M_c G u equals the
/// discrete ||c d^2u/dx^2||^2 weighted by 1/c.
SparseMatrix assemble_bilaplacian(const TransmissionModel1D& model, const Grid1D& grid,
                                  const TransmissionLaplacian& lap);

/// Plain 3-point second difference (no speed scaling), zero Dirichlet data.
SparseMatrix second_difference(const Grid1D& grid);

/// Writes "row col value" lines (0-based) after a "% rows cols nnz" header.
void write_coordinate(std::ostream& os, const SparseMatrix& m);

}  // namespace kvplate
