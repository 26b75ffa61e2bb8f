#include "helpers.hpp"
#include "oracles.hpp"

#include "cia/asymmetry.hpp"
#include "cia/fixtures.hpp"
#include "cia/neighbors.hpp"

#include <cmath>

using namespace cia;
using testing::vec;

namespace {

/// Two 3-point clusters far apart in a 10 Å cube.
PeriodicSet twoClusters() {
  const Eigen::MatrixXd basis = 10.0 * Eigen::MatrixXd::Identity(3, 3);
  std::vector<Eigen::VectorXd> pts;
  for (double x : {0.10, 0.60}) {
    pts.push_back(vec({x, 0.10, 0.10}));
    pts.push_back(vec({x + 0.1, 0.10, 0.10}));
    pts.push_back(vec({x, 0.22, 0.10}));
  }
  return testing::makeSet(basis, pts);
}

}  // namespace

TEST_CASE("connectivity blocks") {
  const auto p = blocksFromConnectivity(twoClusters(), 2.0);
  REQUIRE(p.size() == 2);
  CHECK(p.provenance == BlockProvenance::FromConnectivity);
  CHECK(p.blocks[0] == std::vector<std::size_t>{0, 1, 2});
  CHECK(p.blocks[1] == std::vector<std::size_t>{3, 4, 5});

  CHECK(blocksFromConnectivity(testing::integerLattice(3, 5.0), 2.0).size() == 1);

  // Bonds of length 1 along a chain that wraps through the cell.
  const auto chain = testing::makeSet(Eigen::Vector3d(2.0, 8.0, 8.0).asDiagonal().toDenseMatrix(),
                                      {vec({0.0, 0.5, 0.5}), vec({0.5, 0.5, 0.5})});
  CHECK_ERRC(blocksFromConnectivity(chain, 1.2), Errc::NotFiniteBlock);
}

TEST_CASE("partition validation") {
  CHECK_ERRC(validatePartition({{{0}, {0}}}, 2), Errc::InvalidPartition);
  CHECK_ERRC(validatePartition({{{0}, {5}}}, 2), Errc::InvalidPartition);
  CHECK_ERRC(validatePartition({{{0}, {}}}, 2), Errc::InvalidPartition);
  CHECK_ERRC(validatePartition({}, 2), Errc::InvalidPartition);
  CHECK_NOTHROW(validatePartition({{{1}}}, 2));
}

TEST_CASE("scaled partitions follow the copy layout") {
  const BlockPartition p{{{0, 2}, {1}}};
  const auto s = scalePartition(p, 3, 2);
  REQUIRE(s.size() == 4);
  CHECK(s.blocks[2] == std::vector<std::size_t>{3, 5});
  CHECK(s.blocks[3] == std::vector<std::size_t>{4});
}

TEST_CASE("single block has no asymmetry") {
  std::mt19937_64 rng(1);
  const auto s = fixtures::randomPeriodicSet(3, 4, rng);
  const auto r = cia::cia(s, {{{0, 1, 2, 3}}}, {20, true});
  CHECK(r.cia == 0.0);
  CHECK(r.ciaInf == 0.0);
  CHECK(r.ciaAvg == 0.0);
  CHECK(r.ciaInfAvg == 0.0);
  CHECK(r.blockCount() == 1);
}

TEST_CASE("two blocks give equal min and mean") {
  std::mt19937_64 rng(2);
  for (int t = 0; t < 10; ++t) {
    const auto fx = fixtures::randomBlockFixture(3, 2, 3, rng);
    const auto r = cia::cia(fx.set, fx.partition, {30, true});
    CHECK(r.cia == doctest::Approx(r.ciaAvg).epsilon(1e-12));
    CHECK(r.ciaInf == doctest::Approx(r.ciaInfAvg).epsilon(1e-12));
    CHECK(r.cia == doctest::Approx(r.emdRms(0, 1)).epsilon(1e-12));
  }
}

TEST_CASE("three or more blocks match the oracle pipeline") {
  std::mt19937_64 rng(3);
  for (int t = 0; t < 12; ++t) {
    const int G = 3 + t % 2;
    const auto fx = fixtures::randomBlockFixture(2 + t % 2, G, 2 + t % 3, rng);
    const auto r = cia::cia(fx.set, fx.partition, {12, true});
    const auto o = oracle::ciaPipeline(fx.set, fx.partition, 12, 8);
    CHECK(std::abs(r.cia - o.cia) < 1e-9);
    CHECK(std::abs(r.ciaInf - o.ciaInf) < 1e-9);
    CHECK(std::abs(r.ciaAvg - o.ciaAvg) < 1e-9);
    CHECK(std::abs(r.ciaInfAvg - o.ciaInfAvg) < 1e-9);
  }
}

TEST_CASE("report from emd matrices") {
  Eigen::MatrixXd e(3, 3);
  e << 0, 1, 3, 1, 0, 2, 3, 2, 0;
  const auto r = reportFromEmd(e, 1.5 * e, 10);
  CHECK(r.cia == 2.0);
  CHECK(r.centerIndex == 1);
  CHECK(r.ciaAvg == doctest::Approx(8.0 / 3));
  CHECK(r.ciaInf == 3.0);

  Eigen::MatrixXd tie(3, 3);
  tie << 0, 1, 1, 1, 0, 1, 1, 1, 0;
  CHECK(reportFromEmd(tie, tie, 10).centerIndex == 0);

  CiaReport bad = reportFromEmd(e, 0.5 * e, 10);
  CHECK_ERRC(checkInequalities(bad), Errc::InternalInvariant);
}

TEST_CASE("perturbation harness") {
  const auto fx = fixtures::cellJumpFixture(0.05);
  const auto zero = perturbationHarness(fx.set, fx.partition, 0.0, 3, 9, {30, true});
  for (const auto& t : zero) {
    CHECK(t.deltaCia == 0.0);
    CHECK(t.deltaCiaAvg == 0.0);
    CHECK(t.pass);
  }
  const double r = packingRadius(fx.set);
  CHECK_ERRC(perturbationHarness(fx.set, fx.partition, r, 1, 9), Errc::EpsilonTooLarge);
  const auto trials = perturbationHarness(fx.set, fx.partition, 0.1 * r, 20, 9, {30, true});
  for (const auto& t : trials) {
    CHECK(t.pass);
    CHECK(t.deltaCia <= 4 * t.epsilon);
  }
}

TEST_CASE("perturbation stays inside the epsilon ball") {
  std::mt19937_64 rng(4);
  const auto s = fixtures::randomPeriodicSet(3, 5, rng);
  const auto q = perturb(s, 0.05, rng);
  for (std::size_t i = 0; i < s.size(); ++i) {
    Eigen::VectorXd d = q.motif()[i].frac - s.motif()[i].frac;
    for (Eigen::Index a = 0; a < d.size(); ++a) d[a] -= std::round(d[a]);
    CHECK(s.lattice().toCartesian(d).norm() <= 0.05 + 1e-12);
  }
  const auto a = trialRng(5, 1), b = trialRng(5, 1), c = trialRng(5, 2);
  CHECK(a == b);
  CHECK_FALSE(a == c);
}

TEST_CASE("cell jump family is continuous") {
  const auto base = fixtures::cellJumpFixture(0.0);
  const auto r0 = cia::cia(base.set, base.partition, {50, true});
  CHECK(r0.cia < 1e-9);
  for (double d : {1e-3, 1e-2, 1e-1}) {
    const auto fx = fixtures::cellJumpFixture(d);
    const auto r = cia::cia(fx.set, fx.partition, {50, true});
    CHECK(r.cia > 0.0);
    CHECK(r.cia <= 4 * d);
    CHECK(r.ciaAvg <= 4 * d);
  }
}

TEST_CASE("labels are enforced between blocks") {
  std::mt19937_64 rng(6);
  auto fx = fixtures::randomBlockFixture(3, 2, 2, rng);
  std::vector<MotifPoint> motif = fx.set.motif();
  motif[0].label = "N";
  motif[1].label = "N";
  const PeriodicSet relabeled(fx.set.lattice(), motif);
  CHECK_ERRC(cia::cia(relabeled, fx.partition, {10, true}), Errc::InfeasibleLabels);
  CHECK_NOTHROW(cia::cia(relabeled, fx.partition, {10, false}));
}
