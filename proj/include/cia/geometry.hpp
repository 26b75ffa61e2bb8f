#pragma once

// Lattice and unit-cell arithmetic for periodic point sets in R^n.
//
// A periodic set is S = L + M: the lattice L spanned by the basis rows and a
// finite motif M of labeled points given in fractional coordinates of the
// unit cell. Everything here is an immutable value; the free functions return
// new sets describing the same infinite point set in a different cell or
// after an isometry.

#include <Eigen/Dense>

#include <optional>
#include <string>
#include <vector>

namespace cia {

/// Fractional coordinates closer than this to 1.0 wrap to 0.0.
inline constexpr double kWrapSnap = 1e-12;
/// Motif points closer than this (in Å) are rejected as coincident.
inline constexpr double kCoincidenceThreshold = 1e-8;
/// |det(basis)| at or below this is treated as a degenerate lattice.
inline constexpr double kDegenerateDet = 1e-12;

double wrapUnit(double x);
Eigen::VectorXd wrapFractional(const Eigen::VectorXd& frac);

class Lattice {
public:
  /// Rows of `basis` are the lattice vectors in Cartesian coordinates (Å).
  explicit Lattice(Eigen::MatrixXd basis);

  /// Standard crystallographic orthogonalization: a along x, b in the xy-plane.
  /// Angles in degrees.
  static Lattice fromCellParameters(double a, double b, double c, double alpha, double beta,
                                    double gamma);

  int dim() const { return static_cast<int>(basis_.rows()); }
  const Eigen::MatrixXd& basis() const { return basis_; }

  Eigen::VectorXd toCartesian(const Eigen::VectorXd& frac) const;
  Eigen::VectorXd toFractional(const Eigen::VectorXd& cart) const;
  double volume() const { return volume_; }

  /// Distance between consecutive lattice planes x_i = t and x_i = t + 1 for
  /// every fractional axis i.
  const Eigen::VectorXd& planeSpacings() const { return spacings_; }

private:
  Eigen::MatrixXd basis_;
  Eigen::MatrixXd cartToFrac_;
  Eigen::VectorXd spacings_;
  double volume_ = 0.0;
};

struct MotifPoint {
  Eigen::VectorXd frac;
  std::string label;
  std::optional<int> block;
};

class PeriodicSet {
public:
  /// Wraps every fractional coordinate into [0,1) and validates the motif:
  /// nonempty, consistent dimension, block ids on all points or none, and no
  /// two points of the infinite set closer than kCoincidenceThreshold.
  PeriodicSet(Lattice lattice, std::vector<MotifPoint> motif);

  const Lattice& lattice() const { return lattice_; }
  const std::vector<MotifPoint>& motif() const { return motif_; }
  int dim() const { return lattice_.dim(); }
  std::size_t size() const { return motif_.size(); }
  bool hasBlocks() const { return motif_.front().block.has_value(); }

  Eigen::VectorXd cartesian(std::size_t i) const { return lattice_.toCartesian(motif_[i].frac); }
  std::vector<std::string> labels() const;

private:
  Lattice lattice_;
  std::vector<MotifPoint> motif_;
};

double cellVolume(const Lattice& lattice);
Eigen::VectorXd toCartesian(const Lattice& lattice, const Eigen::VectorXd& frac);

/// Re-expresses the set in the cell with basis rows T·basis. Requires |det T| = 1.
/// Motif order is preserved.
PeriodicSet transformCell(const PeriodicSet& set, const Eigen::MatrixXi& T);

/// Multiplies one basis vector (or all of them when `axis` is empty) by c and
/// replicates the motif. Copy t of point i lands at index t*m + i; block ids
/// of copy t are shifted by t*(maxBlockId + 1).
PeriodicSet scaleCell(const PeriodicSet& set, int c, std::optional<int> axis = std::nullopt);

/// Number of motif copies produced by scaleCell with the same arguments.
int scaleCopies(int dim, int c, std::optional<int> axis);

/// x -> R·x + t applied to the whole infinite set. R must be orthogonal.
PeriodicSet applyRigidMotion(const PeriodicSet& set, const Eigen::MatrixXd& rotation,
                             const Eigen::VectorXd& translation);

}  // namespace cia
