#include "cia/geometry.hpp"

#include "cia/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace cia {

double wrapUnit(double x) {
  double w = x - std::floor(x);
  if (w >= 1.0 - kWrapSnap) w = 0.0;
  return w;
}

Eigen::VectorXd wrapFractional(const Eigen::VectorXd& frac) {
  Eigen::VectorXd out(frac.size());
  for (Eigen::Index i = 0; i < frac.size(); ++i) out[i] = wrapUnit(frac[i]);
  return out;
}

Lattice::Lattice(Eigen::MatrixXd basis) : basis_(std::move(basis)) {
  if (basis_.rows() == 0 || basis_.rows() != basis_.cols()) {
    throw Error(Errc::DimensionMismatch, "lattice basis must be a nonempty square matrix");
  }
  const double det = basis_.determinant();
  if (!std::isfinite(det) || std::abs(det) <= kDegenerateDet) {
    throw Error(Errc::DegenerateLattice, "basis determinant " + std::to_string(det));
  }
  volume_ = std::abs(det);
  // cart = basis^T * frac
  cartToFrac_ = basis_.transpose().inverse();
  spacings_.resize(basis_.rows());
  for (Eigen::Index i = 0; i < basis_.rows(); ++i) spacings_[i] = 1.0 / cartToFrac_.row(i).norm();
}

Lattice Lattice::fromCellParameters(double a, double b, double c, double alpha, double beta,
                                    double gamma) {
  if (a <= 0 || b <= 0 || c <= 0) {
    throw Error(Errc::DegenerateLattice, "cell lengths must be positive");
  }
  constexpr double deg = std::numbers::pi / 180.0;
  const double ca = std::cos(alpha * deg), cb = std::cos(beta * deg), cg = std::cos(gamma * deg);
  const double sg = std::sin(gamma * deg);
  if (std::abs(sg) < 1e-12) throw Error(Errc::DegenerateLattice, "gamma is a multiple of 180");
  const double cy = (ca - cb * cg) / sg;
  const double cz2 = 1.0 - cb * cb - cy * cy;
  if (cz2 <= 0) throw Error(Errc::DegenerateLattice, "cell angles do not form a valid cell");
  Eigen::MatrixXd basis(3, 3);
  basis << a, 0, 0,
           b * cg, b * sg, 0,
           c * cb, c * cy, c * std::sqrt(cz2);
  // Tiny cosines of right angles are noise; keep orthogonal cells exact.
  for (Eigen::Index i = 0; i < 3; ++i)
    for (Eigen::Index j = 0; j < 3; ++j)
      if (std::abs(basis(i, j)) < 1e-14 * std::max({a, b, c})) basis(i, j) = 0.0;
  return Lattice(std::move(basis));
}

Eigen::VectorXd Lattice::toCartesian(const Eigen::VectorXd& frac) const {
  return basis_.transpose() * frac;
}

Eigen::VectorXd Lattice::toFractional(const Eigen::VectorXd& cart) const {
  return cartToFrac_ * cart;
}

PeriodicSet::PeriodicSet(Lattice lattice, std::vector<MotifPoint> motif)
    : lattice_(std::move(lattice)), motif_(std::move(motif)) {
  if (motif_.empty()) throw Error(Errc::InvalidSet, "motif is empty");
  const int n = lattice_.dim();
  const bool blocks = motif_.front().block.has_value();
  for (auto& p : motif_) {
    if (p.frac.size() != n) {
      throw Error(Errc::DimensionMismatch, "motif point dimension differs from lattice dimension");
    }
    if (!p.frac.allFinite()) throw Error(Errc::InvalidSet, "non-finite fractional coordinate");
    if (p.block.has_value() != blocks) {
      throw Error(Errc::InvalidSet, "block ids must be given for all points or none");
    }
    if (p.block && *p.block < 0) throw Error(Errc::InvalidSet, "block ids must be nonnegative");
    p.frac = wrapFractional(p.frac);
  }
  // Two points coincide in the infinite set iff their fractional difference is
  // (numerically) an integer vector, so the minimum-image difference suffices.
  for (std::size_t i = 0; i < motif_.size(); ++i) {
    for (std::size_t j = i + 1; j < motif_.size(); ++j) {
      Eigen::VectorXd d = motif_[j].frac - motif_[i].frac;
      for (Eigen::Index a = 0; a < d.size(); ++a) d[a] -= std::round(d[a]);
      if (lattice_.toCartesian(d).norm() < kCoincidenceThreshold) {
        throw Error(Errc::CoincidentPoints,
                    "motif points " + std::to_string(i) + " and " + std::to_string(j) + " coincide");
      }
    }
  }
}

std::vector<std::string> PeriodicSet::labels() const {
  std::vector<std::string> out;
  out.reserve(motif_.size());
  for (const auto& p : motif_) out.push_back(p.label);
  return out;
}

double cellVolume(const Lattice& lattice) { return lattice.volume(); }

Eigen::VectorXd toCartesian(const Lattice& lattice, const Eigen::VectorXd& frac) {
  return lattice.toCartesian(frac);
}

PeriodicSet transformCell(const PeriodicSet& set, const Eigen::MatrixXi& T) {
  const int n = set.dim();
  if (T.rows() != n || T.cols() != n) {
    throw Error(Errc::DimensionMismatch, "transform must be " + std::to_string(n) + "x" +
                                             std::to_string(n));
  }
  const Eigen::MatrixXd Td = T.cast<double>();
  const double det = Td.determinant();
  if (std::abs(std::abs(det) - 1.0) > 1e-9) {
    throw Error(Errc::NotUnimodular, "|det T| = " + std::to_string(std::abs(det)));
  }
  Lattice lattice(Td * set.lattice().basis());
  // basis^T f = (T basis)^T f'  =>  f' = T^{-T} f
  const Eigen::MatrixXd fracMap = Td.transpose().inverse();
  std::vector<MotifPoint> motif = set.motif();
  for (auto& p : motif) p.frac = fracMap * p.frac;
  return PeriodicSet(std::move(lattice), std::move(motif));
}

int scaleCopies(int dim, int c, std::optional<int> axis) {
  if (axis) return c;
  int copies = 1;
  for (int i = 0; i < dim; ++i) copies *= c;
  return copies;
}

PeriodicSet scaleCell(const PeriodicSet& set, int c, std::optional<int> axis) {
  if (c < 2) throw Error(Errc::InvalidScale, "scale factor must be >= 2, got " + std::to_string(c));
  const int n = set.dim();
  if (axis && (*axis < 0 || *axis >= n)) {
    throw Error(Errc::DimensionMismatch, "scale axis out of range");
  }
  Eigen::VectorXd factors = Eigen::VectorXd::Ones(n);
  if (axis) {
    factors[*axis] = c;
  } else {
    factors.setConstant(c);
  }
  Eigen::MatrixXd basis = set.lattice().basis();
  for (int i = 0; i < n; ++i) basis.row(i) *= factors[i];

  int maxBlock = -1;
  for (const auto& p : set.motif()) maxBlock = std::max(maxBlock, p.block.value_or(-1));
  const int blockStride = maxBlock + 1;

  const int copies = scaleCopies(n, c, axis);
  std::vector<MotifPoint> motif;
  motif.reserve(set.size() * copies);
  Eigen::VectorXi shift = Eigen::VectorXi::Zero(n);
  for (int t = 0; t < copies; ++t) {
    for (const auto& p : set.motif()) {
      MotifPoint q = p;
      for (int a = 0; a < n; ++a) q.frac[a] = (p.frac[a] + shift[a]) / factors[a];
      if (q.block) *q.block += t * blockStride;
      motif.push_back(std::move(q));
    }
    // advance the odometer over copy offsets
    for (int a = 0; a < n; ++a) {
      if (factors[a] == 1.0) continue;
      if (++shift[a] < c) break;
      shift[a] = 0;
    }
  }
  return PeriodicSet(Lattice(std::move(basis)), std::move(motif));
}

PeriodicSet applyRigidMotion(const PeriodicSet& set, const Eigen::MatrixXd& rotation,
                             const Eigen::VectorXd& translation) {
  const int n = set.dim();
  if (rotation.rows() != n || rotation.cols() != n || translation.size() != n) {
    throw Error(Errc::DimensionMismatch, "rigid motion dimension differs from set dimension");
  }
  const double err = (rotation.transpose() * rotation - Eigen::MatrixXd::Identity(n, n))
                         .cwiseAbs()
                         .maxCoeff();
  if (err > 1e-10) throw Error(Errc::NotOrthogonal, "R^T R deviates from I by " + std::to_string(err));

  // Lattice vectors rotate as rows: v' = R v.
  Lattice lattice(set.lattice().basis() * rotation.transpose());
  std::vector<MotifPoint> motif = set.motif();
  for (auto& p : motif) {
    const Eigen::VectorXd cart = rotation * set.lattice().toCartesian(p.frac) + translation;
    p.frac = lattice.toFractional(cart);
  }
  return PeriodicSet(std::move(lattice), std::move(motif));
}

}  // namespace cia
