#pragma once

// Deterministic dense complex linear-algebra facade: eigenvalues, numerical
// rank, solves, kernels, norms. Everything upstream goes through here so rank
// and clustering decisions are made in exactly one place.

#include <algorithm>
#include <cmath>
#include <vector>

#include "liespec/types.hpp"

namespace liespec::numkit {

inline bool lex_less(const Complex& a, const Complex& b) {
  if (a.real() != b.real()) return a.real() < b.real();
  return a.imag() < b.imag();
}

// All eigenvalues with algebraic multiplicity, sorted by (re, im).
inline std::vector<Complex> eigenvalues(const CMatrix& m) {
  if (m.rows() != m.cols()) throw DimensionError("eigenvalues: matrix is not square");
  if (m.rows() == 0) return {};
  Eigen::ComplexEigenSolver<CMatrix> es(m, /*computeEigenvectors=*/false);
  if (es.info() != Eigen::Success) throw ToleranceError("eigenvalues: QR iteration failed to converge");
  std::vector<Complex> out(es.eigenvalues().data(), es.eigenvalues().data() + m.rows());
  std::sort(out.begin(), out.end(), lex_less);
  return out;
}

inline std::vector<double> singular_values(const CMatrix& m) {
  if (m.rows() == 0 || m.cols() == 0) return {};
  Eigen::JacobiSVD<CMatrix> svd(m);
  return {svd.singularValues().data(), svd.singularValues().data() + svd.singularValues().size()};
}

// Largest singular value (2-norm); 0 for empty matrices.
inline double operator_norm(const CMatrix& m) {
  auto s = singular_values(m);
  return s.empty() ? 0.0 : s.front();
}

// Count of singular values above rank_rel * sigma_max.
inline Index numerical_rank(const CMatrix& m, const Tolerances& tol) {
  auto s = singular_values(m);
  if (s.empty()) return 0;
  const double cut = tol.rank_rel * s.front();
  return static_cast<Index>(std::count_if(s.begin(), s.end(), [&](double v) { return v > cut; }));
}

// Orthonormal basis of the column span (columns of the result). The rank
// cutoff is rank_rel * max(sigma_max, scale_floor): passing the natural norm
// scale of the vectors' construction as scale_floor keeps a matrix whose
// columns are pure rounding noise (true span {0}) from acquiring rank, which
// a cutoff relative to its own sigma_max cannot detect.
inline CMatrix orth(const CMatrix& m, const Tolerances& tol, double scale_floor = 0.0) {
  if (m.rows() == 0 || m.cols() == 0) return CMatrix(m.rows(), 0);
  Eigen::JacobiSVD<CMatrix> svd(m, Eigen::ComputeThinU);
  const auto& s = svd.singularValues();
  const double cut = tol.rank_rel * std::max(s(0), scale_floor);
  Index r = 0;
  while (r < s.size() && s(r) > cut) ++r;
  return svd.matrixU().leftCols(r);
}

// Orthonormal basis of the right kernel (columns of the result).
inline CMatrix nullspace(const CMatrix& m, const Tolerances& tol) {
  if (m.cols() == 0) return CMatrix(0, 0);
  if (m.rows() == 0) return CMatrix::Identity(m.cols(), m.cols());
  Eigen::JacobiSVD<CMatrix> svd(m, Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  const double cut = tol.rank_rel * s(0);
  Index r = 0;
  while (r < s.size() && s(r) > cut) ++r;
  return svd.matrixV().rightCols(m.cols() - r);
}

// Solve a x = b for square full-rank a; the rank found travels with the error.
inline CMatrix solve_linear(const CMatrix& a, const CMatrix& b, const Tolerances& tol) {
  if (a.rows() != a.cols()) throw DimensionError("solve_linear: coefficient matrix is not square");
  if (a.rows() != b.rows()) throw DimensionError("solve_linear: right-hand side has mismatched rows");
  if (a.rows() == 0) return CMatrix(0, b.cols());
  Eigen::JacobiSVD<CMatrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& s = svd.singularValues();
  const double cut = tol.rank_rel * s(0);
  Index r = 0;
  while (r < s.size() && s(r) > cut) ++r;
  if (r < a.cols()) {
    throw SingularError("solve_linear: matrix numerically singular (rank " + std::to_string(r) +
                            " of " + std::to_string(a.cols()) + ")",
                        r);
  }
  CMatrix x = svd.solve(b);
  const double res = (a * x - b).norm();
  if (res > tol.residual * std::max(b.norm(), 1e-300)) {
    throw ToleranceError("solve_linear: residual " + std::to_string(res) +
                         " exceeds bound; matrix likely ill-conditioned");
  }
  return x;
}

// Least-squares coefficients: argmin ||a c - b||_F columnwise (a need not be square).
inline CMatrix lstsq(const CMatrix& a, const CMatrix& b) {
  Eigen::JacobiSVD<CMatrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  return svd.solve(b);
}

inline CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

// Greedy dedup of a value multiset: sort by (re, im), seed a cluster at the
// first unused value, absorb everything within `radius` of the seed, report
// the cluster mean. Deterministic for a fixed input multiset.
inline std::vector<Complex> cluster_values(std::vector<Complex> vals, double radius) {
  std::sort(vals.begin(), vals.end(), lex_less);
  std::vector<Complex> reps;
  std::vector<bool> used(vals.size(), false);
  for (std::size_t i = 0; i < vals.size(); ++i) {
    if (used[i]) continue;
    Complex sum = 0;
    Index count = 0;
    for (std::size_t j = i; j < vals.size(); ++j) {
      if (!used[j] && std::abs(vals[j] - vals[i]) <= radius) {
        used[j] = true;
        sum += vals[j];
        ++count;
      }
    }
    reps.push_back(sum / double(count));
  }
  std::sort(reps.begin(), reps.end(), lex_less);
  return reps;
}

// Eigenvalues of defective matrices move O(eps^(1/m)) under O(eps)
// perturbation (Hoelder, not Lipschitz), so any radius that compares computed
// eigenvalues of possibly-defective matrices must scale accordingly.
inline double defect_radius(Index dim, double norm_scale) {
  constexpr double kEps = 2.3e-16;
  if (dim <= 0) return 0.0;
  const double base = kEps * std::max(1.0, norm_scale);
  return 4.0 * std::pow(base, 1.0 / double(std::min<Index>(dim, 8)));
}

}  // namespace liespec::numkit
