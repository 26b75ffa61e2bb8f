#pragma once

// Continuous Invariant-based Asymmetry: min-max and averaged block EMDs
// under the RMS and Chebyshev ground metrics.

#include "cia/geometry.hpp"
#include "cia/invariants.hpp"
#include "cia/transport.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace cia {

enum class BlockProvenance { FromInput, FromConnectivity };

struct BlockPartition {
  std::vector<std::vector<std::size_t>> blocks;
  BlockProvenance provenance = BlockProvenance::FromInput;

  std::size_t size() const { return blocks.size(); }
};

/// Throws InvalidPartition unless blocks are nonempty, in range and pairwise
/// disjoint, and there is at least one block.
void validatePartition(const BlockPartition& partition, std::size_t motifSize);

/// Groups motif points by their block ids, ordered by ascending id.
BlockPartition partitionFromBlockIds(const PeriodicSet& set);

/// Partition of a set produced by scaleCell with `copies` motif copies: copy t
/// of block b becomes block t*G + b.
BlockPartition scalePartition(const BlockPartition& partition, std::size_t motifSize, int copies);

/// Connected components of the motif graph joining points within `cutoff`
/// across periodic images. Throws NotFiniteBlock if a component reaches one of
/// its own translates.
BlockPartition blocksFromConnectivity(const PeriodicSet& set, double cutoff);

struct CiaReport {
  int k = 0;
  double cia = 0.0;
  double ciaInf = 0.0;
  double ciaAvg = 0.0;
  double ciaInfAvg = 0.0;
  Eigen::VectorXd dRms;
  Eigen::VectorXd dInf;
  Eigen::MatrixXd emdRms;
  Eigen::MatrixXd emdInf;
  std::size_t centerIndex = 0;
  std::size_t centerIndexInf = 0;
  std::size_t blocks = 0;

  std::size_t blockCount() const { return blocks; }
};

struct CiaOptions {
  int k = 100;
  bool enforceLabels = true;
};

/// Fills row maxima, their min/mean and argmin from the two EMD matrices.
CiaReport reportFromEmd(Eigen::MatrixXd emdRms, Eigen::MatrixXd emdInf, int k);

/// Checks CIA <= CIA_inf, avg <= avg_inf and CIA <= avg <= 2 CIA within `tol`;
/// throws InternalInvariant on violation.
void checkInequalities(const CiaReport& report, double tol = 1e-9);

CiaReport ciaFromPda(const PdaMatrix& pda, const BlockPartition& partition,
                     std::span<const std::string> labels, int k);

CiaReport cia(const PeriodicSet& set, const BlockPartition& partition, const CiaOptions& options = {});

/// Moves every motif point by an independent uniform random vector in the
/// closed ball of radius epsilon (applied in fractional space so that
/// epsilon == 0 reproduces the input bit for bit).
PeriodicSet perturb(const PeriodicSet& set, double epsilon, std::mt19937_64& rng);

/// Per-trial generator derived from a master seed.
std::mt19937_64 trialRng(std::uint64_t seed, std::uint64_t trial);

struct PerturbationTrial {
  double epsilon = 0.0;
  double deltaCia = 0.0;
  double deltaCiaInf = 0.0;
  double deltaCiaAvg = 0.0;
  double deltaCiaInfAvg = 0.0;
  double bound = 0.0;
  bool pass = false;
};

/// Compares all four asymmetries of `set` against `trials` epsilon-perturbed
/// copies and checks each change against the 4*epsilon Lipschitz bound.
/// Requires 0 <= epsilon < packingRadius(set).
std::vector<PerturbationTrial> perturbationHarness(const PeriodicSet& set,
                                                   const BlockPartition& partition, double epsilon,
                                                   int trials, std::uint64_t seed,
                                                   const CiaOptions& options = {});

}  // namespace cia
