#pragma once

// Pointwise Distance Distribution (PDD), Point Packing Coefficient (PPC),
// Pointwise Deviation from Asymptotic (PDA) and its column averages (ADA).

#include "cia/geometry.hpp"
#include "cia/neighbors.hpp"

#include <Eigen/Dense>

#include <optional>
#include <vector>

namespace cia {

/// Weighted rows of sorted neighbor distances. When `collapsed` is false there
/// is exactly one row per motif point, in motif order, each with weight 1/m.
/// When true, rows are merged groups sorted lexicographically.
struct PddMatrix {
  std::vector<double> weights;
  Eigen::MatrixXd rows;
  bool collapsed = false;

  int k() const { return static_cast<int>(rows.cols()); }
  std::size_t size() const { return weights.size(); }
};

/// A PDD with PPC * j^(1/n) subtracted from column j (1-based).
struct PdaMatrix {
  std::vector<double> weights;
  Eigen::MatrixXd rows;
  bool collapsed = false;
  double ppc = 0.0;
  int dim = 0;

  int k() const { return static_cast<int>(rows.cols()); }
  std::size_t size() const { return weights.size(); }
};

/// Volume of the unit ball in R^n.
double unitBallVolume(int n);

/// Builds a PDD from a neighbor table. With no tolerance the result is the
/// uncollapsed per-point matrix; otherwise rows within `collapseTolerance` in
/// Chebyshev distance are grouped by transitive closure, each group keeping
/// its lexicographically smallest row.
PddMatrix pddFromTable(const NeighborTable& table, std::optional<double> collapseTolerance);

PddMatrix pdd(const PeriodicSet& set, int k, std::optional<double> collapseTolerance = 0.0);

double ppc(const PeriodicSet& set);

/// The asymptotic curve PPC * j^(1/n) for j = 1..k.
Eigen::RowVectorXd asymptoticCurve(double ppc, int dim, int k);

PdaMatrix pdaFromPdd(const PddMatrix& pdd, double ppc, int dim);

PdaMatrix pda(const PeriodicSet& set, int k, std::optional<double> collapseTolerance = 0.0);

/// Weighted column means of a PDA.
Eigen::VectorXd columnAverages(const PdaMatrix& pda);

Eigen::VectorXd ada(const PeriodicSet& set, int k);

}  // namespace cia
