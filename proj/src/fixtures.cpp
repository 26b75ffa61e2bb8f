#include "cia/fixtures.hpp"

#include "cia/error.hpp"
#include "cia/io.hpp"
#include "cia/neighbors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>

namespace cia::fixtures {

namespace {

constexpr int kMaxAttempts = 1000;

Eigen::MatrixXd moleculeTemplate(int dim, int size, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-0.6, 0.6);
  for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
    Eigen::MatrixXd pts(size, dim);
    for (int i = 0; i < size; ++i)
      for (int a = 0; a < dim; ++a) pts(i, a) = u(rng);
    double closest = std::numeric_limits<double>::infinity();
    for (int i = 0; i < size; ++i)
      for (int j = i + 1; j < size; ++j) closest = std::min(closest, (pts.row(i) - pts.row(j)).norm());
    if (closest > 0.25) return pts;
  }
  throw Error(Errc::InternalInvariant, "could not build a molecule template");
}

std::string templateLabel(int i) { return i % 2 == 0 ? "C" : "O"; }

}  // namespace

Lattice randomLattice(int dim, std::mt19937_64& rng, double scale) {
  std::uniform_real_distribution<double> diag(0.8, 1.6), shear(-0.4, 0.4);
  Eigen::MatrixXd basis = Eigen::MatrixXd::Zero(dim, dim);
  for (int i = 0; i < dim; ++i) {
    basis(i, i) = diag(rng) * scale;
    for (int j = 0; j < i; ++j) basis(i, j) = shear(rng) * scale;
  }
  return Lattice(std::move(basis));
}

Eigen::MatrixXd randomRotation(int dim, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Eigen::MatrixXd a(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) a(i, j) = g(rng);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
  Eigen::MatrixXd q = qr.householderQ();
  return q;
}

Eigen::MatrixXi randomUnimodular(int dim, std::mt19937_64& rng, int steps) {
  Eigen::MatrixXi T = Eigen::MatrixXi::Identity(dim, dim);
  if (dim == 1) {
    T(0, 0) = std::uniform_int_distribution<int>(0, 1)(rng) ? 1 : -1;
    return T;
  }
  std::uniform_int_distribution<int> axis(0, dim - 1), mult(-2, 2), coin(0, 1);
  for (int s = 0; s < steps; ++s) {
    const int i = axis(rng);
    int j = axis(rng);
    while (j == i) j = axis(rng);
    T.row(i) += mult(rng) * T.row(j);
    if (coin(rng)) T.row(i) *= -1;
  }
  return T;
}

PeriodicSet randomPeriodicSet(int dim, int m, std::mt19937_64& rng, double minSeparation) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
    Lattice lattice = randomLattice(dim, rng, std::pow(static_cast<double>(m), 1.0 / dim));
    std::vector<MotifPoint> motif;
    for (int i = 0; i < m; ++i) {
      Eigen::VectorXd f(dim);
      for (int a = 0; a < dim; ++a) f[a] = u(rng);
      motif.push_back({std::move(f), i % 3 == 0 ? "A" : "B", std::nullopt});
    }
    try {
      PeriodicSet set(std::move(lattice), std::move(motif));
      if (2.0 * packingRadius(set) >= minSeparation) return set;
    } catch (const Error&) {
    }
  }
  throw Error(Errc::InternalInvariant, "could not generate a separated random set");
}

BlockFixture randomBlockFixture(int dim, int G, int blockSize, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
    const Eigen::MatrixXd mol = moleculeTemplate(dim, blockSize, rng);
    // Roughly 2 Å per molecule along each axis.
    Lattice lattice = randomLattice(dim, rng, 1.6 * std::pow(static_cast<double>(G), 1.0 / dim));
    std::vector<MotifPoint> motif;
    for (int b = 0; b < G; ++b) {
      const Eigen::MatrixXd R = randomRotation(dim, rng);
      Eigen::VectorXd centerFrac(dim);
      for (int a = 0; a < dim; ++a) centerFrac[a] = u(rng);
      const Eigen::VectorXd center = lattice.toCartesian(centerFrac);
      for (int i = 0; i < blockSize; ++i) {
        const Eigen::VectorXd cart = center + R * mol.row(i).transpose();
        motif.push_back({lattice.toFractional(cart), templateLabel(i), b});
      }
    }
    try {
      PeriodicSet set(lattice, std::move(motif));
      if (packingRadius(set) < 0.1) continue;
      BlockPartition partition = partitionFromBlockIds(set);
      return {std::move(set), std::move(partition)};
    } catch (const Error&) {
    }
  }
  throw Error(Errc::InternalInvariant, "could not generate a block fixture");
}

BlockFixture symmetricBlockFixture(int dim, int G, int blockSize, std::mt19937_64& rng) {
  for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
    const Eigen::MatrixXd mol = moleculeTemplate(dim, blockSize, rng);
    Lattice lattice = randomLattice(dim, rng, 1.8);
    std::vector<MotifPoint> motif;
    for (int i = 0; i < blockSize; ++i) {
      Eigen::VectorXd cart = mol.row(i).transpose();
      motif.push_back({lattice.toFractional(cart), templateLabel(i), 0});
    }
    try {
      PeriodicSet primitive(lattice, std::move(motif));
      if (packingRadius(primitive) < 0.1) continue;
      PeriodicSet set = G >= 2 ? scaleCell(primitive, G, 0) : primitive;
      std::uniform_real_distribution<double> shift(-2.0, 2.0);
      Eigen::VectorXd t(dim);
      for (int a = 0; a < dim; ++a) t[a] = shift(rng);
      set = applyRigidMotion(set, randomRotation(dim, rng), t);
      BlockPartition partition = partitionFromBlockIds(set);
      return {std::move(set), std::move(partition)};
    } catch (const Error&) {
    }
  }
  throw Error(Errc::InternalInvariant, "could not generate a symmetric block fixture");
}

BlockFixture cellJumpFixture(double displacement) {
  Eigen::MatrixXd basis(3, 3);
  basis << 3 * 2.0, 0, 0,
           0, 2.2, 0,
           0, 0, 2.4;
  const Lattice lattice(basis);
  std::vector<MotifPoint> motif;
  for (int b = 0; b < 3; ++b) {
    Eigen::Vector3d center(1.0 + 2.0 * b, 1.1 + (b == 1 ? displacement : 0.0), 1.2);
    for (int arm = 0; arm < 3; ++arm) {
      const double angle = std::numbers::pi / 2 + arm * 2 * std::numbers::pi / 3;
      const Eigen::Vector3d end = center + 0.6 * Eigen::Vector3d(std::cos(angle), std::sin(angle), 0.0);
      motif.push_back({lattice.toFractional(end), "N", b});
    }
  }
  PeriodicSet set(lattice, std::move(motif));
  BlockPartition partition = partitionFromBlockIds(set);
  return {std::move(set), std::move(partition)};
}

SyntheticDatasetInfo writeSyntheticDataset(const std::filesystem::path& dir, std::uint64_t seed,
                                           std::size_t count, std::size_t symmetricCount) {
  std::filesystem::create_directories(dir);
  std::string metadata = "id,energy_kj_mol,density_g_cm3,z_prime\n";
  SyntheticDatasetInfo info;
  for (std::size_t i = 0; i < count; ++i) {
    std::mt19937_64 rng = trialRng(seed, i);
    const bool symmetric = i % 2 == 0 && i / 2 < symmetricCount;
    const int G = symmetric ? 1 + static_cast<int>(i / 2 % 4) : 2 + static_cast<int>(i % 3);
    BlockFixture fx = symmetric ? symmetricBlockFixture(3, G, 3, rng) : randomBlockFixture(3, G, 3, rng);
    char id[32];
    std::snprintf(id, sizeof id, "syn%03zu", i);
    const double energy = -100.0 - static_cast<double>(i);
    const double density = 1.0 + (static_cast<double>(i) + (i % 2 == 0 ? 10.0 : -10.0)) / 100.0;
    StructureRecord record{id, std::move(fx.set), {energy, density, static_cast<double>(G)}};
    writeFile(dir / (std::string(id) + ".json"), writeStructureJson(record));
    metadata += std::string(id) + "," + formatNumber(energy) + "," + formatNumber(density) + "," +
                std::to_string(G) + "\n";
    ++info.count;
    if (symmetric) ++info.symmetricCount;
  }
  writeFile(dir / "metadata.csv", metadata);
  return info;
}

}  // namespace cia::fixtures
