#include "cia/neighbors.hpp"

#include "cia/error.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

namespace cia {

namespace {

constexpr int kMaxShell = 100000;

// Motif positions re-wrapped into the reduced cell, in Cartesian coordinates.
struct SearchFrame {
  Lattice lattice;
  Eigen::MatrixXd basisT;            // columns are lattice vectors
  std::vector<Eigen::VectorXd> frac;  // wrapped, reduced basis
  std::vector<Eigen::VectorXd> cart;
};

SearchFrame makeFrame(const PeriodicSet& set) {
  ReducedLattice reduced = reduceBasis(set.lattice());
  SearchFrame frame{reduced.lattice, reduced.lattice.basis().transpose(), {}, {}};
  frame.frac.reserve(set.size());
  frame.cart.reserve(set.size());
  for (std::size_t i = 0; i < set.size(); ++i) {
    Eigen::VectorXd f = wrapFractional(frame.lattice.toFractional(set.cartesian(i)));
    frame.cart.push_back(frame.lattice.toCartesian(f));
    frame.frac.push_back(std::move(f));
  }
  return frame;
}

}  // namespace

ReducedLattice reduceBasis(const Lattice& lattice) {
  const int n = lattice.dim();
  Eigen::MatrixXd b = lattice.basis();
  Eigen::MatrixXi T = Eigen::MatrixXi::Identity(n, n);
  for (int iter = 0; iter < 1000; ++iter) {
    bool changed = false;
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        if (i == j) continue;
        const double bj2 = b.row(j).squaredNorm();
        const double mu = std::round(b.row(i).dot(b.row(j)) / bj2);
        if (mu == 0.0) continue;
        Eigen::RowVectorXd candidate = b.row(i) - mu * b.row(j);
        if (candidate.squaredNorm() < b.row(i).squaredNorm() * (1.0 - 1e-12)) {
          b.row(i) = candidate;
          T.row(i) -= static_cast<int>(mu) * T.row(j);
          changed = true;
        }
      }
    }
    if (!changed) break;
  }
  return {Lattice(std::move(b)), std::move(T)};
}

double coveredRadius(const Lattice& lattice, const Eigen::VectorXd& frac, int shell) {
  double r = std::numeric_limits<double>::infinity();
  for (int a = 0; a < lattice.dim(); ++a) {
    const double toFace = std::min(frac[a] + shell, shell + 1.0 - frac[a]);
    r = std::min(r, toFace * lattice.planeSpacings()[a]);
  }
  return r;
}

NeighborTable kNearestDistances(const PeriodicSet& set, int k) {
  if (k < 1) throw Error(Errc::InvalidK, "k must be >= 1, got " + std::to_string(k));
  const SearchFrame frame = makeFrame(set);
  const int n = set.dim();
  const std::size_t m = set.size();

  NeighborTable table;
  table.distances.resize(static_cast<Eigen::Index>(m), k);
  Eigen::VectorXd diff(n);
  for (std::size_t i = 0; i < m; ++i) {
    std::priority_queue<double> best;  // max-heap of the k smallest so far
    const Eigen::VectorXd& p = frame.cart[i];
    int shell = 0;
    for (;; ++shell) {
      if (shell > kMaxShell) throw Error(Errc::InternalInvariant, "neighbor shell expansion diverged");
      forEachShellVector(n, shell, [&](const Eigen::VectorXi& c) {
        const Eigen::VectorXd offset = frame.basisT * c.cast<double>();
        for (std::size_t j = 0; j < m; ++j) {
          if (shell == 0 && j == i) continue;
          diff = frame.cart[j] + offset - p;
          const double d = diff.norm();
          if (static_cast<int>(best.size()) < k) {
            best.push(d);
          } else if (d < best.top()) {
            best.pop();
            best.push(d);
          }
        }
      });
      if (static_cast<int>(best.size()) == k &&
          best.top() <= coveredRadius(frame.lattice, frame.frac[i], shell)) {
        break;
      }
    }
    for (int col = k - 1; col >= 0; --col) {
      table.distances(static_cast<Eigen::Index>(i), col) = best.top();
      best.pop();
    }
  }
  return table;
}

NeighborTable bruteForceNeighbors(const PeriodicSet& set, int k, int shellRadius) {
  if (k < 1) throw Error(Errc::InvalidK, "k must be >= 1, got " + std::to_string(k));
  if (shellRadius < 0) throw Error(Errc::InsufficientShellRadius, "negative shell radius");
  const int n = set.dim();
  const std::size_t m = set.size();
  const Lattice& lattice = set.lattice();

  std::vector<Eigen::VectorXd> translates;
  Eigen::VectorXi c = Eigen::VectorXi::Constant(n, -shellRadius);
  for (;;) {
    translates.push_back(lattice.toCartesian(c.cast<double>()));
    int a = 0;
    for (; a < n; ++a) {
      if (++c[a] <= shellRadius) break;
      c[a] = -shellRadius;
    }
    if (a == n) break;
  }

  NeighborTable table;
  table.distances.resize(static_cast<Eigen::Index>(m), k);
  for (std::size_t i = 0; i < m; ++i) {
    const Eigen::VectorXd p = set.cartesian(i);
    std::vector<double> all;
    all.reserve(translates.size() * m);
    for (const auto& t : translates) {
      const bool origin = t.isZero(0.0);
      for (std::size_t j = 0; j < m; ++j) {
        if (origin && j == i) continue;
        all.push_back((set.cartesian(j) + t - p).norm());
      }
    }
    if (static_cast<int>(all.size()) < k) {
      throw Error(Errc::InsufficientShellRadius, "fewer than k candidates enumerated");
    }
    std::sort(all.begin(), all.end());
    const double kth = all[static_cast<std::size_t>(k - 1)];
    const double covered = coveredRadius(lattice, set.motif()[i].frac, shellRadius);
    if (kth > covered) {
      throw Error(Errc::InsufficientShellRadius,
                  "k-th distance " + std::to_string(kth) + " exceeds covered radius " +
                      std::to_string(covered) + " at shell radius " + std::to_string(shellRadius));
    }
    for (int col = 0; col < k; ++col) table.distances(static_cast<Eigen::Index>(i), col) = all[col];
  }
  return table;
}

std::vector<Contact> contactsWithin(const PeriodicSet& set, double radius) {
  const SearchFrame frame = makeFrame(set);
  const int n = set.dim();
  const std::size_t m = set.size();
  std::vector<Contact> out;
  for (std::size_t i = 0; i < m; ++i) {
    const Eigen::VectorXd& p = frame.cart[i];
    const Eigen::VectorXd origI = set.cartesian(i);
    for (int shell = 0;; ++shell) {
      if (shell > kMaxShell) throw Error(Errc::InternalInvariant, "contact shell expansion diverged");
      forEachShellVector(n, shell, [&](const Eigen::VectorXi& c) {
        const Eigen::VectorXd offset = frame.basisT * c.cast<double>();
        for (std::size_t j = 0; j < m; ++j) {
          if (shell == 0 && j == i) continue;
          const Eigen::VectorXd v = frame.cart[j] + offset - p;
          const double d = v.norm();
          if (d > radius) continue;
          // Re-express the image of j relative to the original cell.
          const Eigen::VectorXd shift = set.lattice().toFractional(origI + v - set.cartesian(j));
          Eigen::VectorXi coeff(n);
          for (int a = 0; a < n; ++a) coeff[a] = static_cast<int>(std::lround(shift[a]));
          out.push_back({i, j, std::move(coeff), d});
        }
      });
      if (coveredRadius(frame.lattice, frame.frac[i], shell) > radius) break;
    }
  }
  return out;
}

double packingRadius(const PeriodicSet& set) {
  return kNearestDistances(set, 1).distances.minCoeff() / 2.0;
}

}  // namespace cia
