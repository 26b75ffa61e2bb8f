#include "helpers.hpp"
#include "oracles.hpp"

#include "cia/fixtures.hpp"
#include "cia/neighbors.hpp"

#include <cmath>

using namespace cia;
using testing::vec;

TEST_CASE("integer lattices") {
  const auto z1 = kNearestDistances(testing::integerLattice(1), 4);
  CHECK((z1.distances.row(0) - vec({1, 1, 2, 2}).transpose()).cwiseAbs().maxCoeff() < 1e-15);
  const auto z3 = kNearestDistances(testing::integerLattice(3), 6);
  CHECK((z3.distances.array() - 1.0).abs().maxCoeff() < 1e-15);

  const auto b1 = bruteForceNeighbors(testing::integerLattice(1), 4, 3);
  CHECK((b1.distances.row(0) - vec({1, 1, 2, 2}).transpose()).cwiseAbs().maxCoeff() < 1e-15);
  const auto b2 = bruteForceNeighbors(testing::integerLattice(2), 8, 3);
  const double r2 = std::sqrt(2.0);
  CHECK((b2.distances.row(0) - vec({1, 1, 1, 1, r2, r2, r2, r2}).transpose()).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("invalid arguments") {
  CHECK_ERRC(kNearestDistances(testing::integerLattice(2), 0), Errc::InvalidK);
  CHECK_ERRC(bruteForceNeighbors(testing::integerLattice(1), 5, 1), Errc::InsufficientShellRadius);
}

TEST_CASE("triclinic three-point motif against a 9^3 supercell") {
  std::mt19937_64 rng(11);
  const auto s = fixtures::randomPeriodicSet(3, 3, rng);
  const auto table = kNearestDistances(s, 20);
  for (std::size_t i = 0; i < s.size(); ++i) {
    const auto expected = oracle::naiveDistances(s, i, 4, 20);
    for (int j = 0; j < 20; ++j) CHECK(std::abs(table.distances(static_cast<Eigen::Index>(i), j) - expected[static_cast<std::size_t>(j)]) < 1e-10);
  }
}

TEST_CASE("skewed cell agrees with the oracle on the reduced cell") {
  Eigen::MatrixXd b(2, 2);
  b << 1, 0, 37.2, 1;
  const auto s = testing::makeSet(b, {vec({0.0, 0.0}), vec({0.3, 0.5})});
  Eigen::MatrixXi T(2, 2);
  T << 1, 0, -37, 1;
  const auto reduced = transformCell(s, T);
  const auto a = kNearestDistances(s, 30);
  const auto o = bruteForceNeighbors(reduced, 30, 8);
  // Row order may differ only if motif order changed; transformCell keeps it.
  CHECK((a.distances - o.distances).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("table properties") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 40; ++trial) {
    const int dim = 1 + trial % 3;
    const auto s = fixtures::randomPeriodicSet(dim, 1 + trial % 6, rng);
    const auto t = kNearestDistances(s, 12);
    const auto t13 = kNearestDistances(s, 13);
    const double minDist = 2 * packingRadius(s);
    for (Eigen::Index i = 0; i < t.distances.rows(); ++i) {
      CHECK(t.distances(i, 0) >= minDist - 1e-12);
      for (Eigen::Index j = 1; j < 12; ++j) CHECK(t.distances(i, j) >= t.distances(i, j - 1));
    }
    CHECK((t13.distances.leftCols(12) - t.distances).cwiseAbs().maxCoeff() == 0.0);

    // Constant fractional shift: same rows in the same order.
    std::vector<MotifPoint> shifted = s.motif();
    for (auto& p : shifted) p.frac.array() += 0.123;
    const auto u = kNearestDistances(PeriodicSet(s.lattice(), shifted), 12);
    CHECK((u.distances - t.distances).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("perturbing points by epsilon moves every distance by at most two epsilon") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const auto s = fixtures::randomPeriodicSet(3, 4, rng);
    const double eps = 0.3 * packingRadius(s);
    const auto q = perturb(s, eps, rng);
    const auto a = kNearestDistances(s, 25), b = kNearestDistances(q, 25);
    CHECK((a.distances - b.distances).cwiseAbs().maxCoeff() <= 2 * eps + 1e-12);
  }
}

TEST_CASE("contacts and packing radius") {
  const auto z2 = testing::integerLattice(2);
  CHECK(packingRadius(z2) == doctest::Approx(0.5));
  const auto contacts = contactsWithin(z2, 1.0 + 1e-9);
  CHECK(contacts.size() == 4);
  for (const auto& c : contacts) CHECK(c.distance == doctest::Approx(1.0));
}
