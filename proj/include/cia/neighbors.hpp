#pragma once

// Exact k-nearest-neighbor distances from motif points into the full infinite
// periodic set.

#include "cia/geometry.hpp"

#include <Eigen/Dense>

#include <vector>

namespace cia {

/// Row i holds the k smallest distances (ascending, Å) from motif point i to
/// all other points of the infinite set, with multiplicity.
struct NeighborTable {
  Eigen::MatrixXd distances;  // m x k

  int k() const { return static_cast<int>(distances.cols()); }
  std::size_t rows() const { return static_cast<std::size_t>(distances.rows()); }
};

struct ReducedLattice {
  Lattice lattice;
  Eigen::MatrixXi transform;  // reduced basis = transform * original basis
};

/// Pairwise Lagrange-style reduction: repeatedly subtract the nearest-integer
/// multiple of one basis vector from another while that shortens it.
ReducedLattice reduceBasis(const Lattice& lattice);

/// Cartesian radius around a point with fractional coordinates `frac` that is
/// guaranteed to lie inside the union of cells with integer offsets in
/// [-shell, shell]^n.
double coveredRadius(const Lattice& lattice, const Eigen::VectorXd& frac, int shell);

/// Calls fn(c) for every integer vector with max-norm exactly `shell`.
template <class Fn>
void forEachShellVector(int dim, int shell, Fn&& fn);

NeighborTable kNearestDistances(const PeriodicSet& set, int k);

/// Test oracle: exhaustive enumeration of translates with coefficients in
/// [-shellRadius, shellRadius]^n on the unreduced basis. Throws
/// InsufficientShellRadius when the k-th distance is not certified.
NeighborTable bruteForceNeighbors(const PeriodicSet& set, int k, int shellRadius);

struct Contact {
  std::size_t from;
  std::size_t to;
  Eigen::VectorXi offset;  // lattice coefficients (original basis) of the image of `to`
  double distance;
};

/// All pairs (i, image of j) with 0 < distance <= radius.
std::vector<Contact> contactsWithin(const PeriodicSet& set, double radius);

/// Half of the smallest interpoint distance of the infinite set.
double packingRadius(const PeriodicSet& set);

// ---------------------------------------------------------------------------

namespace detail {
template <class Fn>
void shellRecurse(Eigen::VectorXi& c, int axis, int shell, bool onShell, Fn& fn) {
  const int dim = static_cast<int>(c.size());
  if (axis == dim) {
    if (onShell) fn(static_cast<const Eigen::VectorXi&>(c));
    return;
  }
  if (axis == dim - 1 && !onShell) {
    c[axis] = -shell;
    shellRecurse(c, axis + 1, shell, true, fn);
    if (shell > 0) {
      c[axis] = shell;
      shellRecurse(c, axis + 1, shell, true, fn);
    }
    return;
  }
  for (int v = -shell; v <= shell; ++v) {
    c[axis] = v;
    shellRecurse(c, axis + 1, shell, onShell || v == shell || v == -shell, fn);
  }
}
}  // namespace detail

template <class Fn>
void forEachShellVector(int dim, int shell, Fn&& fn) {
  Eigen::VectorXi c = Eigen::VectorXi::Zero(dim);
  detail::shellRecurse(c, 0, shell, false, fn);
}

}  // namespace cia
