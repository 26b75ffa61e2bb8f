#pragma once

// Ground metrics on PDA rows and the exact Earth Mover's Distance between
// geometric blocks with uniform point weights.

#include "cia/invariants.hpp"

#include <Eigen/Dense>

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace cia {

enum class GroundMetric { Rms, Chebyshev };

std::string_view metricName(GroundMetric metric);

/// RMS: sqrt(mean((b - c)^2)). Chebyshev: max |b - c|.
double groundDistance(GroundMetric metric, const Eigen::Ref<const Eigen::RowVectorXd>& b,
                      const Eigen::Ref<const Eigen::RowVectorXd>& c);

struct TransportPlan {
  Eigen::MatrixXd flows;  // m(B) x m(C)
  double cost = 0.0;
};

struct Assignment {
  std::vector<std::size_t> columnOf;  // row i is matched to column columnOf[i]
  double cost = 0.0;
};

/// Hungarian algorithm (shortest augmenting paths with potentials) on a square
/// cost matrix.
Assignment solveAssignment(const Eigen::MatrixXd& cost);

/// Exact transportation problem with uniform marginals 1/rows and 1/cols.
/// Arcs with allowed(i, j) == false never carry flow. Solved as an integer
/// min-cost flow (supplies scaled by rows * cols) with successive shortest
/// paths. Throws InfeasibleLabels if the allowed arcs cannot carry the mass.
TransportPlan solveTransport(const Eigen::MatrixXd& cost,
                             const Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>& allowed);

/// EMD between two blocks of rows of an uncollapsed PDA. When `labels` is
/// nonempty it holds one label per motif point and flow between points of
/// different labels is forbidden.
TransportPlan emdBlocks(const PdaMatrix& pda, std::span<const std::size_t> blockB,
                        std::span<const std::size_t> blockC, GroundMetric metric,
                        std::span<const std::string> labels = {});

}  // namespace cia
