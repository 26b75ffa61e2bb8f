#include "cia/invariants.hpp"

#include "cia/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

namespace cia {

namespace {

bool lexLess(const Eigen::RowVectorXd& a, const Eigen::RowVectorXd& b) {
  return std::lexicographical_compare(a.data(), a.data() + a.size(), b.data(), b.data() + b.size());
}

std::size_t findRoot(std::vector<std::size_t>& parent, std::size_t x) {
  while (parent[x] != x) {
    parent[x] = parent[parent[x]];
    x = parent[x];
  }
  return x;
}

}  // namespace

double unitBallVolume(int n) {
  if (n < 1) throw Error(Errc::DimensionMismatch, "dimension must be >= 1");
  return std::pow(std::numbers::pi, n / 2.0) / std::tgamma(n / 2.0 + 1.0);
}

PddMatrix pddFromTable(const NeighborTable& table, std::optional<double> collapseTolerance) {
  const std::size_t m = table.rows();
  PddMatrix out;
  if (!collapseTolerance) {
    out.rows = table.distances;
    out.weights.assign(m, 1.0 / static_cast<double>(m));
    out.collapsed = false;
    return out;
  }
  if (*collapseTolerance < 0) throw Error(Errc::InvalidK, "collapse tolerance must be >= 0");

  std::vector<std::size_t> parent(m);
  std::iota(parent.begin(), parent.end(), 0);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i + 1; j < m; ++j) {
      const double cheb = (table.distances.row(static_cast<Eigen::Index>(i)) -
                           table.distances.row(static_cast<Eigen::Index>(j)))
                              .cwiseAbs()
                              .maxCoeff();
      if (cheb <= *collapseTolerance) parent[findRoot(parent, i)] = findRoot(parent, j);
    }
  }

  struct Group {
    Eigen::RowVectorXd row;
    std::size_t count = 0;
  };
  std::vector<Group> groups;
  std::vector<std::ptrdiff_t> groupOf(m, -1);
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t root = findRoot(parent, i);
    if (groupOf[root] < 0) {
      groupOf[root] = static_cast<std::ptrdiff_t>(groups.size());
      groups.push_back({table.distances.row(static_cast<Eigen::Index>(i)), 0});
    }
    Group& g = groups[static_cast<std::size_t>(groupOf[root])];
    const Eigen::RowVectorXd row = table.distances.row(static_cast<Eigen::Index>(i));
    if (lexLess(row, g.row)) g.row = row;
    ++g.count;
  }
  std::sort(groups.begin(), groups.end(), [](const Group& a, const Group& b) {
    if (lexLess(a.row, b.row)) return true;
    if (lexLess(b.row, a.row)) return false;
    return a.count < b.count;
  });

  out.collapsed = true;
  out.rows.resize(static_cast<Eigen::Index>(groups.size()), table.k());
  for (std::size_t g = 0; g < groups.size(); ++g) {
    out.rows.row(static_cast<Eigen::Index>(g)) = groups[g].row;
    out.weights.push_back(static_cast<double>(groups[g].count) / static_cast<double>(m));
  }
  return out;
}

PddMatrix pdd(const PeriodicSet& set, int k, std::optional<double> collapseTolerance) {
  return pddFromTable(kNearestDistances(set, k), collapseTolerance);
}

double ppc(const PeriodicSet& set) {
  const int n = set.dim();
  return std::pow(cellVolume(set.lattice()) / (static_cast<double>(set.size()) * unitBallVolume(n)),
                  1.0 / n);
}

Eigen::RowVectorXd asymptoticCurve(double ppcValue, int dim, int k) {
  Eigen::RowVectorXd curve(k);
  for (int j = 1; j <= k; ++j) curve[j - 1] = ppcValue * std::pow(static_cast<double>(j), 1.0 / dim);
  return curve;
}

PdaMatrix pdaFromPdd(const PddMatrix& p, double ppcValue, int dim) {
  PdaMatrix out;
  out.weights = p.weights;
  out.collapsed = p.collapsed;
  out.ppc = ppcValue;
  out.dim = dim;
  out.rows = p.rows.rowwise() - asymptoticCurve(ppcValue, dim, p.k());
  return out;
}

PdaMatrix pda(const PeriodicSet& set, int k, std::optional<double> collapseTolerance) {
  return pdaFromPdd(pdd(set, k, collapseTolerance), ppc(set), set.dim());
}

Eigen::VectorXd columnAverages(const PdaMatrix& p) {
  Eigen::VectorXd avg = Eigen::VectorXd::Zero(p.k());
  for (std::size_t i = 0; i < p.size(); ++i) {
    avg += p.weights[i] * p.rows.row(static_cast<Eigen::Index>(i)).transpose();
  }
  return avg;
}

Eigen::VectorXd ada(const PeriodicSet& set, int k) {
  return columnAverages(pda(set, k, std::nullopt));
}

}  // namespace cia
