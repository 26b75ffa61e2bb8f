#include "cia/transport.hpp"

#include "cia/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <limits>
#include <map>

namespace cia {

std::string_view metricName(GroundMetric metric) {
  return metric == GroundMetric::Rms ? "rms" : "chebyshev";
}

double groundDistance(GroundMetric metric, const Eigen::Ref<const Eigen::RowVectorXd>& b,
                      const Eigen::Ref<const Eigen::RowVectorXd>& c) {
  if (b.size() != c.size()) {
    throw Error(Errc::DimensionMismatch, "rows of length " + std::to_string(b.size()) + " and " +
                                             std::to_string(c.size()));
  }
  if (b.size() == 0) return 0.0;
  if (metric == GroundMetric::Chebyshev) return (b - c).cwiseAbs().maxCoeff();
  return std::sqrt((b - c).squaredNorm() / static_cast<double>(b.size()));
}

Assignment solveAssignment(const Eigen::MatrixXd& cost) {
  const auto n = static_cast<std::size_t>(cost.rows());
  if (cost.cols() != cost.rows()) throw Error(Errc::DimensionMismatch, "assignment needs a square matrix");
  constexpr double inf = std::numeric_limits<double>::infinity();
  // 1-based arrays; column 0 is a virtual start column.
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<std::size_t> rowOfCol(n + 1, 0), way(n + 1, 0);
  for (std::size_t i = 1; i <= n; ++i) {
    rowOfCol[0] = i;
    std::size_t j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<bool> used(n + 1, false);
    do {
      used[j0] = true;
      const std::size_t i0 = rowOfCol[j0];
      double delta = inf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost(static_cast<Eigen::Index>(i0 - 1), static_cast<Eigen::Index>(j - 1)) -
                           u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          u[rowOfCol[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (rowOfCol[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      rowOfCol[j0] = rowOfCol[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  Assignment out;
  out.columnOf.assign(n, 0);
  for (std::size_t j = 1; j <= n; ++j) out.columnOf[rowOfCol[j] - 1] = j - 1;
  for (std::size_t i = 0; i < n; ++i) {
    out.cost += cost(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(out.columnOf[i]));
  }
  return out;
}

namespace {

struct FlowEdge {
  std::size_t to;
  long long cap;
  double cost;
};

class MinCostFlow {
public:
  explicit MinCostFlow(std::size_t nodes) : adj_(nodes) {}

  std::size_t addEdge(std::size_t from, std::size_t to, long long cap, double cost) {
    const std::size_t id = edges_.size();
    edges_.push_back({to, cap, cost});
    adj_[from].push_back(id);
    edges_.push_back({from, 0, -cost});
    adj_[to].push_back(id + 1);
    return id;
  }

  long long run(std::size_t source, std::size_t sink, long long want) {
    const std::size_t n = adj_.size();
    long long sent = 0;
    constexpr double inf = std::numeric_limits<double>::infinity();
    while (sent < want) {
      // Bellman-Ford queue variant; residual costs may be negative.
      std::vector<double> dist(n, inf);
      std::vector<std::size_t> prevEdge(n, SIZE_MAX);
      std::vector<bool> queued(n, false);
      std::deque<std::size_t> queue{source};
      dist[source] = 0.0;
      queued[source] = true;
      while (!queue.empty()) {
        const std::size_t u = queue.front();
        queue.pop_front();
        queued[u] = false;
        for (std::size_t id : adj_[u]) {
          const FlowEdge& e = edges_[id];
          if (e.cap <= 0) continue;
          const double nd = dist[u] + e.cost;
          if (nd < dist[e.to] - 1e-13) {
            dist[e.to] = nd;
            prevEdge[e.to] = id;
            if (!queued[e.to]) {
              queued[e.to] = true;
              queue.push_back(e.to);
            }
          }
        }
      }
      if (dist[sink] == inf) break;
      long long push = want - sent;
      for (std::size_t v = sink; v != source; v = edges_[prevEdge[v] ^ 1].to) {
        push = std::min(push, edges_[prevEdge[v]].cap);
      }
      for (std::size_t v = sink; v != source; v = edges_[prevEdge[v] ^ 1].to) {
        edges_[prevEdge[v]].cap -= push;
        edges_[prevEdge[v] ^ 1].cap += push;
      }
      sent += push;
    }
    return sent;
  }

  long long flowOn(std::size_t edgeId) const { return edges_[edgeId ^ 1].cap; }

private:
  std::vector<FlowEdge> edges_;
  std::vector<std::vector<std::size_t>> adj_;
};

}  // namespace

TransportPlan solveTransport(const Eigen::MatrixXd& cost,
                             const Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>& allowed) {
  const auto rows = static_cast<std::size_t>(cost.rows());
  const auto cols = static_cast<std::size_t>(cost.cols());
  if (rows == 0 || cols == 0) throw Error(Errc::EmptyBlock, "transport between empty blocks");
  if (allowed.rows() != cost.rows() || allowed.cols() != cost.cols()) {
    throw Error(Errc::DimensionMismatch, "allowed-arc mask shape differs from cost matrix");
  }
  // Row i supplies `cols` units, column j demands `rows` units.
  const auto supply = static_cast<long long>(cols);
  const auto demand = static_cast<long long>(rows);
  const long long total = supply * demand;
  const std::size_t source = rows + cols, sink = source + 1;
  MinCostFlow flow(rows + cols + 2);
  for (std::size_t i = 0; i < rows; ++i) flow.addEdge(source, i, supply, 0.0);
  for (std::size_t j = 0; j < cols; ++j) flow.addEdge(rows + j, sink, demand, 0.0);
  Eigen::Matrix<std::size_t, Eigen::Dynamic, Eigen::Dynamic> arc(rows, cols);
  arc.setConstant(SIZE_MAX);
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) {
      const auto ii = static_cast<Eigen::Index>(i), jj = static_cast<Eigen::Index>(j);
      if (!allowed(ii, jj)) continue;
      arc(ii, jj) = flow.addEdge(i, rows + j, total, cost(ii, jj));
    }
  }
  if (flow.run(source, sink, total) != total) {
    throw Error(Errc::InfeasibleLabels, "allowed arcs cannot carry the full mass");
  }
  TransportPlan plan;
  plan.flows = Eigen::MatrixXd::Zero(cost.rows(), cost.cols());
  for (Eigen::Index i = 0; i < cost.rows(); ++i) {
    for (Eigen::Index j = 0; j < cost.cols(); ++j) {
      if (arc(i, j) == SIZE_MAX) continue;
      const double f = static_cast<double>(flow.flowOn(arc(i, j))) / static_cast<double>(total);
      plan.flows(i, j) = f;
      plan.cost += f * cost(i, j);
    }
  }
  return plan;
}

TransportPlan emdBlocks(const PdaMatrix& pda, std::span<const std::size_t> blockB,
                        std::span<const std::size_t> blockC, GroundMetric metric,
                        std::span<const std::string> labels) {
  if (blockB.empty() || blockC.empty()) throw Error(Errc::EmptyBlock, "EMD needs nonempty blocks");
  if (pda.collapsed) {
    throw Error(Errc::InvalidPartition, "block EMD needs the uncollapsed per-point PDA");
  }
  const bool useLabels = !labels.empty();
  if (useLabels && labels.size() != pda.size()) {
    throw Error(Errc::DimensionMismatch, "one label per PDA row is required");
  }
  for (auto idx : blockB)
    if (idx >= pda.size()) throw Error(Errc::InvalidPartition, "block index out of range");
  for (auto idx : blockC)
    if (idx >= pda.size()) throw Error(Errc::InvalidPartition, "block index out of range");

  const auto mB = static_cast<Eigen::Index>(blockB.size());
  const auto mC = static_cast<Eigen::Index>(blockC.size());
  Eigen::MatrixXd cost(mB, mC);
  for (Eigen::Index i = 0; i < mB; ++i) {
    for (Eigen::Index j = 0; j < mC; ++j) {
      cost(i, j) = groundDistance(metric, pda.rows.row(static_cast<Eigen::Index>(blockB[i])),
                                  pda.rows.row(static_cast<Eigen::Index>(blockC[j])));
    }
  }

  if (useLabels) {
    std::map<std::string, std::pair<long long, long long>> counts;
    for (auto idx : blockB) ++counts[labels[idx]].first;
    for (auto idx : blockC) ++counts[labels[idx]].second;
    for (const auto& [label, c] : counts) {
      if (c.first * mC != c.second * mB) {
        throw Error(Errc::InfeasibleLabels, "label '" + label + "' has unequal mass in the two blocks");
      }
    }
  }

  if (mB != mC) {
    Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> allowed(mB, mC);
    for (Eigen::Index i = 0; i < mB; ++i)
      for (Eigen::Index j = 0; j < mC; ++j)
        allowed(i, j) = !useLabels || labels[blockB[i]] == labels[blockC[j]];
    return solveTransport(cost, allowed);
  }

  // Equal sizes: an optimal plan sits on a permutation vertex. With labels the
  // problem splits into one independent assignment per label.
  std::map<std::string, std::pair<std::vector<Eigen::Index>, std::vector<Eigen::Index>>> groups;
  for (Eigen::Index i = 0; i < mB; ++i) groups[useLabels ? labels[blockB[i]] : ""].first.push_back(i);
  for (Eigen::Index j = 0; j < mC; ++j) groups[useLabels ? labels[blockC[j]] : ""].second.push_back(j);

  TransportPlan plan;
  plan.flows = Eigen::MatrixXd::Zero(mB, mC);
  const double w = 1.0 / static_cast<double>(mB);
  for (const auto& [label, members] : groups) {
    const auto& [rowsIdx, colsIdx] = members;
    const auto g = static_cast<Eigen::Index>(rowsIdx.size());
    Eigen::MatrixXd sub(g, g);
    for (Eigen::Index a = 0; a < g; ++a)
      for (Eigen::Index b = 0; b < g; ++b) sub(a, b) = cost(rowsIdx[a], colsIdx[b]);
    const Assignment assignment = solveAssignment(sub);
    for (Eigen::Index a = 0; a < g; ++a) {
      const Eigen::Index col = colsIdx[assignment.columnOf[static_cast<std::size_t>(a)]];
      plan.flows(rowsIdx[a], col) = w;
      plan.cost += w * cost(rowsIdx[a], col);
    }
  }
  return plan;
}

}  // namespace cia
