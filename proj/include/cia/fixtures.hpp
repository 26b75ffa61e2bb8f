#pragma once

// Seeded generators of periodic sets with geometric blocks. Shared by the
// verification harness, the synthetic dataset and the test suites.

#include "cia/asymmetry.hpp"
#include "cia/geometry.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <filesystem>
#include <random>

namespace cia::fixtures {

/// Lower-triangular basis with diagonal in [0.8, 1.6]*scale and shear
/// entries in [-0.4, 0.4]*scale.
Lattice randomLattice(int dim, std::mt19937_64& rng, double scale = 1.0);

/// Haar-ish random orthogonal matrix (QR of a Gaussian matrix).
Eigen::MatrixXd randomRotation(int dim, std::mt19937_64& rng);

/// Product of random elementary shears and sign flips; |det| = 1.
Eigen::MatrixXi randomUnimodular(int dim, std::mt19937_64& rng, int steps = 4);

/// m random points; retried until the packing radius is at least minSeparation/2.
PeriodicSet randomPeriodicSet(int dim, int m, std::mt19937_64& rng, double minSeparation = 0.05);

struct BlockFixture {
  PeriodicSet set;
  BlockPartition partition;
};

/// G copies of one labeled template molecule, each with its own random
/// orientation and position. Generically asymmetric.
BlockFixture randomBlockFixture(int dim, int G, int blockSize, std::mt19937_64& rng);

/// G exact translational copies of one molecule (a primitive set scaled G
/// times along axis 0), optionally followed by a random rigid motion. All
/// asymmetries vanish up to rounding.
BlockFixture symmetricBlockFixture(int dim, int G, int blockSize, std::mt19937_64& rng);

/// Three Y-shaped 3-point molecules in a cell tripled along x; the middle one
/// is shifted by `displacement` Å along y. At displacement 0 the primitive
/// cell is three times smaller.
BlockFixture cellJumpFixture(double displacement);

struct SyntheticDatasetInfo {
  std::size_t count = 0;
  std::size_t symmetricCount = 0;
};

/// Writes `count` JSON structures (blocks embedded as point block ids) plus
/// metadata.csv into `dir`. Structures with even index below 2*symmetricCount
/// are exact symmetric fixtures. Energies are -100 - i, densities are
/// 1 + (i + 10*(-1)^i)/100 for structure i.
SyntheticDatasetInfo writeSyntheticDataset(const std::filesystem::path& dir, std::uint64_t seed,
                                           std::size_t count = 50, std::size_t symmetricCount = 20);

}  // namespace cia::fixtures
