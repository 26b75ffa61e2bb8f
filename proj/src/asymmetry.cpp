#include "cia/asymmetry.hpp"

#include "cia/error.hpp"
#include "cia/neighbors.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <optional>

namespace cia {

void validatePartition(const BlockPartition& partition, std::size_t motifSize) {
  if (partition.blocks.empty()) throw Error(Errc::InvalidPartition, "partition has no blocks");
  std::vector<int> owner(motifSize, -1);
  for (std::size_t b = 0; b < partition.blocks.size(); ++b) {
    if (partition.blocks[b].empty()) {
      throw Error(Errc::InvalidPartition, "block " + std::to_string(b) + " is empty");
    }
    for (std::size_t idx : partition.blocks[b]) {
      if (idx >= motifSize) {
        throw Error(Errc::InvalidPartition, "index " + std::to_string(idx) + " out of range for motif of size " +
                                                std::to_string(motifSize));
      }
      if (owner[idx] >= 0) {
        throw Error(Errc::InvalidPartition, "point " + std::to_string(idx) + " is in blocks " +
                                                std::to_string(owner[idx]) + " and " + std::to_string(b));
      }
      owner[idx] = static_cast<int>(b);
    }
  }
}

BlockPartition partitionFromBlockIds(const PeriodicSet& set) {
  if (!set.hasBlocks()) throw Error(Errc::InvalidPartition, "set carries no block ids");
  std::map<int, std::vector<std::size_t>> byId;
  for (std::size_t i = 0; i < set.size(); ++i) byId[*set.motif()[i].block].push_back(i);
  BlockPartition out;
  for (auto& [id, members] : byId) out.blocks.push_back(std::move(members));
  return out;
}

BlockPartition scalePartition(const BlockPartition& partition, std::size_t motifSize, int copies) {
  BlockPartition out;
  out.provenance = partition.provenance;
  for (int t = 0; t < copies; ++t) {
    for (const auto& block : partition.blocks) {
      std::vector<std::size_t> shifted;
      shifted.reserve(block.size());
      for (std::size_t idx : block) shifted.push_back(static_cast<std::size_t>(t) * motifSize + idx);
      out.blocks.push_back(std::move(shifted));
    }
  }
  return out;
}

BlockPartition blocksFromConnectivity(const PeriodicSet& set, double cutoff) {
  if (!(cutoff > 0)) throw Error(Errc::InvalidPartition, "connectivity cutoff must be positive");
  const std::size_t m = set.size();
  std::vector<std::vector<Contact>> adjacency(m);
  for (auto& c : contactsWithin(set, cutoff)) adjacency[c.from].push_back(std::move(c));

  std::vector<std::optional<Eigen::VectorXi>> shift(m);
  BlockPartition out;
  out.provenance = BlockProvenance::FromConnectivity;
  for (std::size_t start = 0; start < m; ++start) {
    if (shift[start]) continue;
    std::vector<std::size_t> members{start};
    shift[start] = Eigen::VectorXi::Zero(set.dim());
    std::deque<std::size_t> queue{start};
    while (!queue.empty()) {
      const std::size_t u = queue.front();
      queue.pop_front();
      for (const Contact& c : adjacency[u]) {
        const Eigen::VectorXi expected = *shift[u] + c.offset;
        if (!shift[c.to]) {
          shift[c.to] = expected;
          members.push_back(c.to);
          queue.push_back(c.to);
        } else if (*shift[c.to] != expected) {
          throw Error(Errc::NotFiniteBlock, "component containing point " + std::to_string(start) +
                                                " bonds to its own periodic image; supply blocks explicitly");
        }
      }
    }
    std::sort(members.begin(), members.end());
    out.blocks.push_back(std::move(members));
  }
  return out;
}

CiaReport reportFromEmd(Eigen::MatrixXd emdRms, Eigen::MatrixXd emdInf, int k) {
  CiaReport r;
  r.k = k;
  r.blocks = static_cast<std::size_t>(emdRms.rows());
  r.dRms = emdRms.rowwise().maxCoeff();
  r.dInf = emdInf.rowwise().maxCoeff();
  Eigen::Index argmin = 0;
  r.cia = r.dRms.minCoeff(&argmin);  // Eigen returns the first minimum
  r.centerIndex = static_cast<std::size_t>(argmin);
  r.ciaInf = r.dInf.minCoeff(&argmin);
  r.centerIndexInf = static_cast<std::size_t>(argmin);
  r.ciaAvg = r.dRms.mean();
  r.ciaInfAvg = r.dInf.mean();
  r.emdRms = std::move(emdRms);
  r.emdInf = std::move(emdInf);
  return r;
}

void checkInequalities(const CiaReport& r, double tol) {
  auto require = [&](bool ok, const char* what) {
    if (!ok) {
      throw Error(Errc::InternalInvariant,
                  std::string("asymmetry inequality violated: ") + what + " (cia=" + std::to_string(r.cia) +
                      ", cia_inf=" + std::to_string(r.ciaInf) + ", cia_avg=" + std::to_string(r.ciaAvg) +
                      ", cia_inf_avg=" + std::to_string(r.ciaInfAvg) + ")");
    }
  };
  require(r.cia <= r.ciaInf + tol, "CIA <= CIA_inf");
  require(r.ciaAvg <= r.ciaInfAvg + tol, "avg-CIA <= avg-CIA_inf");
  require(r.cia <= r.ciaAvg + tol, "CIA <= avg-CIA");
  require(r.ciaAvg <= 2.0 * r.cia + tol, "avg-CIA <= 2 CIA");
  require(r.ciaInf <= r.ciaInfAvg + tol, "CIA_inf <= avg-CIA_inf");
  require(r.ciaInfAvg <= 2.0 * r.ciaInf + tol, "avg-CIA_inf <= 2 CIA_inf");
}

CiaReport ciaFromPda(const PdaMatrix& pda, const BlockPartition& partition,
                     std::span<const std::string> labels, int k) {
  validatePartition(partition, pda.size());
  const auto G = static_cast<Eigen::Index>(partition.size());
  Eigen::MatrixXd emdRms = Eigen::MatrixXd::Zero(G, G);
  Eigen::MatrixXd emdInf = Eigen::MatrixXd::Zero(G, G);
  for (Eigen::Index i = 0; i < G; ++i) {
    for (Eigen::Index j = i + 1; j < G; ++j) {
      const auto& bi = partition.blocks[static_cast<std::size_t>(i)];
      const auto& bj = partition.blocks[static_cast<std::size_t>(j)];
      emdRms(i, j) = emdRms(j, i) = emdBlocks(pda, bi, bj, GroundMetric::Rms, labels).cost;
      emdInf(i, j) = emdInf(j, i) = emdBlocks(pda, bi, bj, GroundMetric::Chebyshev, labels).cost;
    }
  }
  CiaReport report = reportFromEmd(std::move(emdRms), std::move(emdInf), k);
  checkInequalities(report);
  return report;
}

CiaReport cia(const PeriodicSet& set, const BlockPartition& partition, const CiaOptions& options) {
  validatePartition(partition, set.size());
  const PdaMatrix p = pda(set, options.k, std::nullopt);
  const std::vector<std::string> labels = options.enforceLabels ? set.labels() : std::vector<std::string>{};
  return ciaFromPda(p, partition, labels, options.k);
}

PeriodicSet perturb(const PeriodicSet& set, double epsilon, std::mt19937_64& rng) {
  const int n = set.dim();
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::vector<MotifPoint> motif = set.motif();
  for (auto& p : motif) {
    Eigen::VectorXd v(n);
    do {
      for (int a = 0; a < n; ++a) v[a] = unit(rng);
    } while (v.squaredNorm() > 1.0);
    p.frac += set.lattice().toFractional(epsilon * v);
  }
  return PeriodicSet(set.lattice(), std::move(motif));
}

std::mt19937_64 trialRng(std::uint64_t seed, std::uint64_t trial) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(trial), static_cast<std::uint32_t>(trial >> 32)};
  return std::mt19937_64(seq);
}

std::vector<PerturbationTrial> perturbationHarness(const PeriodicSet& set,
                                                   const BlockPartition& partition, double epsilon,
                                                   int trials, std::uint64_t seed,
                                                   const CiaOptions& options) {
  const double r = packingRadius(set);
  if (!(epsilon >= 0.0) || epsilon >= r) {
    throw Error(Errc::EpsilonTooLarge, "epsilon " + std::to_string(epsilon) +
                                           " must lie in [0, r(S)) with r(S) = " + std::to_string(r));
  }
  const CiaReport base = cia(set, partition, options);
  std::vector<PerturbationTrial> out;
  out.reserve(static_cast<std::size_t>(std::max(trials, 0)));
  for (int t = 0; t < trials; ++t) {
    std::mt19937_64 rng = trialRng(seed, static_cast<std::uint64_t>(t));
    const CiaReport moved = cia(perturb(set, epsilon, rng), partition, options);
    PerturbationTrial trial;
    trial.epsilon = epsilon;
    trial.deltaCia = std::abs(moved.cia - base.cia);
    trial.deltaCiaInf = std::abs(moved.ciaInf - base.ciaInf);
    trial.deltaCiaAvg = std::abs(moved.ciaAvg - base.ciaAvg);
    trial.deltaCiaInfAvg = std::abs(moved.ciaInfAvg - base.ciaInfAvg);
    trial.bound = 4.0 * epsilon;
    trial.pass = trial.deltaCia <= trial.bound && trial.deltaCiaInf <= trial.bound &&
                 trial.deltaCiaAvg <= trial.bound && trial.deltaCiaInfAvg <= trial.bound;
    out.push_back(trial);
  }
  return out;
}

}  // namespace cia
