#pragma once

// Shared scalar/matrix aliases, tolerance knobs, and the error taxonomy used
// across the library.

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace liespec {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using Index = Eigen::Index;

// Numerical knobs. All rank/cluster/residual decisions in the library go
// through these three values so the CLI can override them uniformly.
struct Tolerances {
  double rank_rel = 1e-10;    // relative singular-value cutoff for rank decisions
  double eig_cluster = 1e-8;  // eigenvalue dedup / point-matching radius
  double residual = 1e-9;     // closure and identity residual bound
};

// Base of every failure the library raises; the CLI maps subclasses onto its
// exit-code contract (input problems, algebraic rejections, numerical failures).
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// --- input / validation problems -------------------------------------------
struct ParseError : Error {
  using Error::Error;
};
struct DimensionError : Error {
  using Error::Error;
};
struct DegenerateBasisError : Error {
  using Error::Error;
};

// --- algebraic rejections ---------------------------------------------------
struct NotClosedError : Error {
  Index i = -1, j = -1;  // offending generator pair (0-based)
  NotClosedError(const std::string& msg, Index i_, Index j_) : Error(msg), i(i_), j(j_) {}
};
struct ClassificationError : Error {
  using Error::Error;
};

// --- numerical / tolerance failures -----------------------------------------
struct SingularError : Error {
  Index rank_found = -1;
  SingularError(const std::string& msg, Index rank) : Error(msg), rank_found(rank) {}
};
struct ToleranceError : Error {
  using Error::Error;
};
struct CharacterError : Error {
  using Error::Error;
};
struct ShapeError : Error {
  using Error::Error;
};
// The homotopy family only exists when every L_p is invertible; callers probe
// membership by catching this.
struct HomotopyNotApplicable : Error {
  std::vector<Index> singular_degrees;
  HomotopyNotApplicable(const std::string& msg, std::vector<Index> degs)
      : Error(msg), singular_degrees(std::move(degs)) {}
};

inline void validate(const Tolerances& tol) {
  if (!(tol.rank_rel > 0) || !(tol.eig_cluster > 0) || !(tol.residual > 0)) {
    throw ParseError("tolerances must all be positive");
  }
}

inline bool all_finite(const CMatrix& m) { return m.allFinite(); }

}  // namespace liespec
