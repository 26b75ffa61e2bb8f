#pragma once

#include "cia/error.hpp"
#include "cia/geometry.hpp"

#include "doctest.h"

#include <Eigen/Dense>

#include <initializer_list>
#include <vector>

namespace testing {

/// Checks that `expr` throws cia::Error with the given code.
#define CHECK_ERRC(expr, errc)                                        \
  do {                                                                \
    bool thrown_ = false;                                             \
    try {                                                             \
      (void)(expr);                                                   \
    } catch (const cia::Error& e_) {                                  \
      thrown_ = true;                                                 \
      CHECK_MESSAGE(e_.code() == (errc), e_.what());                  \
    }                                                                 \
    CHECK_MESSAGE(thrown_, "expected " << cia::errcName(errc));       \
  } while (0)

inline Eigen::VectorXd vec(std::initializer_list<double> values) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (double x : values) v[i++] = x;
  return v;
}

/// Z^n with one point at the origin.
inline cia::PeriodicSet integerLattice(int n, double spacing = 1.0) {
  return cia::PeriodicSet(cia::Lattice(spacing * Eigen::MatrixXd::Identity(n, n)),
                          {{Eigen::VectorXd::Zero(n), "X", std::nullopt}});
}

inline cia::PeriodicSet makeSet(const Eigen::MatrixXd& basis, const std::vector<Eigen::VectorXd>& fracs,
                                const std::vector<int>& blocks = {}) {
  std::vector<cia::MotifPoint> motif;
  for (std::size_t i = 0; i < fracs.size(); ++i) {
    std::optional<int> b;
    if (!blocks.empty()) b = blocks[i];
    motif.push_back({fracs[i], "X", b});
  }
  return cia::PeriodicSet(cia::Lattice(basis), std::move(motif));
}

}  // namespace testing
