#include "helpers.hpp"
#include "oracles.hpp"

#include "cia/transport.hpp"

#include <cmath>
#include <random>

using namespace cia;
using testing::vec;

namespace {

PdaMatrix randomPda(std::size_t m, int k, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  PdaMatrix p;
  p.rows.resize(static_cast<Eigen::Index>(m), k);
  for (Eigen::Index i = 0; i < p.rows.rows(); ++i)
    for (int j = 0; j < k; ++j) p.rows(i, j) = u(rng);
  p.weights.assign(m, 1.0 / static_cast<double>(m));
  p.dim = 3;
  return p;
}

std::vector<std::size_t> range(std::size_t from, std::size_t to) {
  std::vector<std::size_t> v;
  for (std::size_t i = from; i < to; ++i) v.push_back(i);
  return v;
}

Eigen::MatrixXd rowsOf(const PdaMatrix& p, const std::vector<std::size_t>& idx) {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(idx.size()), p.rows.cols());
  for (std::size_t r = 0; r < idx.size(); ++r) m.row(static_cast<Eigen::Index>(r)) = p.rows.row(static_cast<Eigen::Index>(idx[r]));
  return m;
}

void checkPlan(const TransportPlan& plan, const PdaMatrix& p, const std::vector<std::size_t>& b,
               const std::vector<std::size_t>& c, GroundMetric metric) {
  double cost = 0;
  for (std::size_t i = 0; i < b.size(); ++i) {
    CHECK(std::abs(plan.flows.row(static_cast<Eigen::Index>(i)).sum() - 1.0 / static_cast<double>(b.size())) < 1e-9);
    for (std::size_t j = 0; j < c.size(); ++j) {
      const double f = plan.flows(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      CHECK(f >= 0.0);
      cost += f * groundDistance(metric, p.rows.row(static_cast<Eigen::Index>(b[i])), p.rows.row(static_cast<Eigen::Index>(c[j])));
    }
  }
  for (std::size_t j = 0; j < c.size(); ++j) {
    CHECK(std::abs(plan.flows.col(static_cast<Eigen::Index>(j)).sum() - 1.0 / static_cast<double>(c.size())) < 1e-9);
  }
  CHECK(std::abs(cost - plan.cost) < 1e-9);
}

}  // namespace

TEST_CASE("ground distances") {
  const Eigen::RowVectorXd b = vec({1, 2}).transpose(), c = vec({2, 4}).transpose();
  CHECK(groundDistance(GroundMetric::Chebyshev, b, c) == doctest::Approx(2.0));
  CHECK(groundDistance(GroundMetric::Rms, b, c) == doctest::Approx(std::sqrt(2.5)));
  CHECK(groundDistance(GroundMetric::Rms, b, b) == 0.0);
  CHECK(groundDistance(GroundMetric::Chebyshev, b, b) == 0.0);
  CHECK_ERRC(groundDistance(GroundMetric::Rms, b, vec({1, 2, 3}).transpose()), Errc::DimensionMismatch);

  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int t = 0; t < 200; ++t) {
    Eigen::RowVectorXd x(7), y(7);
    for (int j = 0; j < 7; ++j) {
      x[j] = u(rng);
      y[j] = x[j] + 0.01 * u(rng);
    }
    CHECK(groundDistance(GroundMetric::Rms, x, y) <= groundDistance(GroundMetric::Chebyshev, x, y) + 1e-15);
    CHECK(groundDistance(GroundMetric::Chebyshev, x, y) <= 0.01 + 1e-15);
  }
}

TEST_CASE("identical and singleton blocks") {
  std::mt19937_64 rng(2);
  const auto p = randomPda(5, 6, rng);
  const auto same = emdBlocks(p, range(0, 3), range(0, 3), GroundMetric::Rms);
  CHECK(same.cost == doctest::Approx(0.0));
  for (Eigen::Index i = 0; i < 3; ++i) CHECK(same.flows(i, i) == doctest::Approx(1.0 / 3));
  const std::vector<std::size_t> a{1}, b{4};
  const auto single = emdBlocks(p, a, b, GroundMetric::Chebyshev);
  CHECK(single.flows(0, 0) == doctest::Approx(1.0));
  CHECK(single.cost == doctest::Approx(groundDistance(GroundMetric::Chebyshev, p.rows.row(1), p.rows.row(4))));
}

TEST_CASE("equal-size blocks match the permutation oracle") {
  std::mt19937_64 rng(3);
  for (int t = 0; t < 100; ++t) {
    const std::size_t m = 1 + t % 6;
    const auto p = randomPda(2 * m, 5, rng);
    const auto b = range(0, m), c = range(m, 2 * m);
    for (auto metric : {GroundMetric::Rms, GroundMetric::Chebyshev}) {
      const auto plan = emdBlocks(p, b, c, metric);
      const double expected = metric == GroundMetric::Rms ? oracle::emd(rowsOf(p, b), rowsOf(p, c), oracle::rms)
                                                          : oracle::emd(rowsOf(p, b), rowsOf(p, c), oracle::chebyshev);
      CHECK(std::abs(plan.cost - expected) < 1e-9);
      checkPlan(plan, p, b, c, metric);
    }
  }
}

TEST_CASE("unequal blocks match the replicated assignment oracle") {
  std::mt19937_64 rng(4);
  const std::vector<std::pair<std::size_t, std::size_t>> sizes{{1, 2}, {2, 3}, {3, 2}, {2, 4}, {4, 2}, {3, 6}, {1, 5}};
  for (int rep = 0; rep < 5; ++rep) {
    for (auto [nb, nc] : sizes) {
      const auto p = randomPda(nb + nc, 4, rng);
      const auto b = range(0, nb), c = range(nb, nb + nc);
      const auto plan = emdBlocks(p, b, c, GroundMetric::Rms);
      CHECK(std::abs(plan.cost - oracle::emd(rowsOf(p, b), rowsOf(p, c), oracle::rms)) < 1e-9);
      checkPlan(plan, p, b, c, GroundMetric::Rms);
    }
  }
}

TEST_CASE("labels forbid cross-label flow") {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 40; ++t) {
    const std::size_t m = 2 + t % 4;
    const auto p = randomPda(2 * m, 4, rng);
    std::vector<std::string> labels(2 * m);
    std::vector<std::string> lb, lc;
    for (std::size_t i = 0; i < m; ++i) {
      labels[i] = i % 2 ? "C" : "O";
      labels[m + (i + 1) % m] = labels[i];
    }
    const auto b = range(0, m), c = range(m, 2 * m);
    for (auto i : b) lb.push_back(labels[i]);
    for (auto i : c) lc.push_back(labels[i]);
    const auto plan = emdBlocks(p, b, c, GroundMetric::Chebyshev, labels);
    CHECK(std::abs(plan.cost - oracle::emd(rowsOf(p, b), rowsOf(p, c), oracle::chebyshev, lb, lc)) < 1e-9);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < m; ++j)
        if (lb[i] != lc[j]) CHECK(plan.flows(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) == 0.0);
  }
  const auto p = randomPda(4, 3, rng);
  const std::vector<std::string> labels{"C", "C", "C", "O"};
  CHECK_ERRC(emdBlocks(p, range(0, 2), range(2, 4), GroundMetric::Rms, labels), Errc::InfeasibleLabels);
}

TEST_CASE("emd is a metric") {
  std::mt19937_64 rng(6);
  for (int t = 0; t < 50; ++t) {
    const auto p = randomPda(9, 4, rng);
    const auto a = range(0, 3), b = range(3, 6), c = range(6, 9);
    for (auto metric : {GroundMetric::Rms, GroundMetric::Chebyshev}) {
      const double ab = emdBlocks(p, a, b, metric).cost, ba = emdBlocks(p, b, a, metric).cost;
      const double bc = emdBlocks(p, b, c, metric).cost, ac = emdBlocks(p, a, c, metric).cost;
      CHECK(std::abs(ab - ba) < 1e-10);
      CHECK(ac <= ab + bc + 1e-9);
    }
  }
}

TEST_CASE("row-wise closeness bounds the emd") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int t = 0; t < 30; ++t) {
    auto p = randomPda(8, 5, rng);
    const double eps = 0.01;
    for (Eigen::Index i = 0; i < 4; ++i)
      for (Eigen::Index j = 0; j < 5; ++j) p.rows(4 + i, j) = p.rows(i, j) + 2 * eps * u(rng);
    CHECK(emdBlocks(p, range(0, 4), range(4, 8), GroundMetric::Chebyshev).cost <= 2 * eps + 1e-12);
    CHECK(emdBlocks(p, range(0, 4), range(4, 8), GroundMetric::Rms).cost <= 2 * eps + 1e-12);
  }
}

TEST_CASE("block errors") {
  std::mt19937_64 rng(8);
  auto p = randomPda(4, 3, rng);
  CHECK_ERRC(emdBlocks(p, {}, range(0, 2), GroundMetric::Rms), Errc::EmptyBlock);
  CHECK_ERRC(emdBlocks(p, range(0, 2), range(3, 5), GroundMetric::Rms), Errc::InvalidPartition);
  p.collapsed = true;
  CHECK_ERRC(emdBlocks(p, range(0, 2), range(2, 4), GroundMetric::Rms), Errc::InvalidPartition);
}

TEST_CASE("assignment solver on a known matrix") {
  Eigen::MatrixXd cost(3, 3);
  cost << 4, 1, 3, 2, 0, 5, 3, 2, 2;
  const auto a = solveAssignment(cost);
  CHECK(a.cost == doctest::Approx(5.0));
  CHECK(a.columnOf == std::vector<std::size_t>{1, 0, 2});
}
