#pragma once

// Lie algebras of matrices: bracket convention, closure verification,
// structure constants, derived / lower-central series, classification,
// constructive common eigenvectors, and Jordan-Hoelder flags.

#include <string>
#include <utility>
#include <vector>

#include "liespec/numkit.hpp"
#include "liespec/types.hpp"

namespace liespec::liealg {

// The algebra acts through the opposite product, so the bracket on matrices
// is [a, b] = b*a - a*b. This orientation is pinned by the golden instances:
// flipping it negates every structure constant and breaks them.
inline CMatrix commutator(const CMatrix& a, const CMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols() || a.rows() != a.cols()) {
    throw DimensionError("commutator: operands must be square and of equal size");
  }
  return b * a - a * b;
}

struct OperatorFamily {
  Index space_dim = 0;    // d: the representation space is C^d
  Index algebra_dim = 0;  // n: number of basis generators
  std::vector<CMatrix> generators;
  std::vector<std::string> labels;
};

// Tensor c^h_{ij}: [x_j, x_i] = sum_h c^h_{ij} x_h for i < j, stored
// antisymmetrically in (i, j). All indices 0-based here.
struct StructureConstants {
  Index n = 0;
  std::vector<Complex> c;  // flat (h, i, j) row-major

  StructureConstants() = default;
  explicit StructureConstants(Index n_) : n(n_), c(std::size_t(n_ * n_ * n_), Complex(0)) {}

  Complex& at(Index h, Index i, Index j) { return c[std::size_t((h * n + i) * n + j)]; }
  Complex at(Index h, Index i, Index j) const { return c[std::size_t((h * n + i) * n + j)]; }

  // Coefficients of [x_i, x_j] in the basis (valid for every i, j).
  CVector bracket_in_basis(Index i, Index j) const {
    CVector v(n);
    for (Index h = 0; h < n; ++h) v(h) = at(h, j, i);
    return v;
  }

  double max_abs() const {
    double m = 0;
    for (const auto& z : c) m = std::max(m, std::abs(z));
    return m;
  }
};

// Bracket of two coordinate vectors under the tensor.
inline CVector coordinate_bracket(const StructureConstants& sc, const CVector& u, const CVector& v) {
  CVector w = CVector::Zero(sc.n);
  for (Index i = 0; i < sc.n; ++i) {
    if (u(i) == Complex(0)) continue;
    for (Index j = 0; j < sc.n; ++j) {
      if (v(j) == Complex(0)) continue;
      w += (u(i) * v(j)) * sc.bracket_in_basis(i, j);
    }
  }
  return w;
}

// Worst Jacobi cyclic-sum norm over basis triples (should vanish for any
// tensor computed from actual matrices).
inline double jacobi_residual(const StructureConstants& sc) {
  double worst = 0;
  auto e = [&](Index t) {
    CVector v = CVector::Zero(sc.n);
    v(t) = 1;
    return v;
  };
  for (Index i = 0; i < sc.n; ++i)
    for (Index j = i + 1; j < sc.n; ++j)
      for (Index l = j + 1; l < sc.n; ++l) {
        CVector r = coordinate_bracket(sc, e(i), coordinate_bracket(sc, e(j), e(l))) +
                    coordinate_bracket(sc, e(j), coordinate_bracket(sc, e(l), e(i))) +
                    coordinate_bracket(sc, e(l), coordinate_bracket(sc, e(i), e(j)));
        worst = std::max(worst, r.norm());
      }
  return worst;
}

inline CVector vec(const CMatrix& m) {
  return Eigen::Map<const CVector>(m.data(), m.size());
}

inline CMatrix unvec(const CVector& v, Index rows, Index cols) {
  return Eigen::Map<const CMatrix>(v.data(), rows, cols);
}

inline void validate_family(const OperatorFamily& fam, const Tolerances& tol) {
  if (fam.algebra_dim < 1 || Index(fam.generators.size()) != fam.algebra_dim) {
    throw DimensionError("family must contain at least one generator");
  }
  if (Index(fam.labels.size()) != fam.algebra_dim) {
    throw DimensionError("family must carry one label per generator");
  }
  for (Index i = 0; i < fam.algebra_dim; ++i) {
    const CMatrix& g = fam.generators[std::size_t(i)];
    if (g.rows() != fam.space_dim || g.cols() != fam.space_dim) {
      throw DimensionError("generator '" + fam.labels[std::size_t(i)] + "' is " + std::to_string(g.rows()) + "x" +
                           std::to_string(g.cols()) + ", expected " + std::to_string(fam.space_dim) + "x" +
                           std::to_string(fam.space_dim));
    }
    if (!all_finite(g)) {
      throw ParseError("generator '" + fam.labels[std::size_t(i)] + "' contains non-finite entries");
    }
  }
  CMatrix stacked(fam.space_dim * fam.space_dim, fam.algebra_dim);
  for (Index i = 0; i < fam.algebra_dim; ++i) stacked.col(i) = vec(fam.generators[std::size_t(i)]);
  if (numkit::numerical_rank(stacked, tol) != fam.algebra_dim) {
    throw DegenerateBasisError("generators are linearly dependent; the basis defines the dual coordinates, so dependent input is rejected rather than reduced");
  }
}

// Expand every pairwise bracket in the generator span by least squares.
// Residual beyond tolerance means the family is not a Lie algebra basis.
inline StructureConstants verify_closure(const OperatorFamily& fam, const Tolerances& tol) {
  validate_family(fam, tol);
  const Index n = fam.algebra_dim;
  CMatrix stacked(fam.space_dim * fam.space_dim, n);
  for (Index i = 0; i < n; ++i) stacked.col(i) = vec(fam.generators[std::size_t(i)]);
  Eigen::JacobiSVD<CMatrix> svd(stacked, Eigen::ComputeThinU | Eigen::ComputeThinV);

  StructureConstants sc(n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = i + 1; j < n; ++j) {
      // c^._{ij} expands [x_j, x_i]
      const CMatrix w = commutator(fam.generators[std::size_t(j)], fam.generators[std::size_t(i)]);
      const CVector rhs = vec(w);
      CVector coef = svd.solve(rhs);
      const double res = (stacked * coef - rhs).norm();
      if (res > tol.residual * (1.0 + rhs.norm())) {
        throw NotClosedError("bracket of '" + fam.labels[std::size_t(i)] + "' and '" + fam.labels[std::size_t(j)] +
                                 "' falls outside the span (residual " + std::to_string(res) + ")",
                             i, j);
      }
      // A coefficient below the residual tolerance carries no information
      // (e.g. the O(eps) bracket residue of conjugated commuting generators),
      // so store an exact zero: downstream subspace ranks then see true zeros
      // instead of noise whose own sigma_max defeats any relative rank cutoff.
      const double snap = tol.residual * (1.0 + coef.cwiseAbs().maxCoeff());
      for (Index h = 0; h < n; ++h) {
        if (std::abs(coef(h)) <= snap) coef(h) = Complex(0.0);
      }
      for (Index h = 0; h < n; ++h) {
        sc.at(h, i, j) = coef(h);
        sc.at(h, j, i) = -coef(h);
      }
    }
  }
  return sc;
}

enum class SeriesKind { derived, lower_central };

struct SeriesChain {
  SeriesKind kind = SeriesKind::derived;
  std::vector<CMatrix> subspaces;  // orthonormal coordinate bases, descending
  std::vector<Index> dims;
  bool reaches_zero = false;
};

namespace detail {

// Span of brackets between columns of two coordinate subspace bases. The
// inputs are unit columns and the constants are bounded by max_abs(), so a
// product far below that scale is rounding residue of a true zero; it is
// dropped, and the rank cutoff is floored at the same scale so a stack of
// pure residue (true span {0}) cannot acquire rank.
inline CMatrix bracket_span(const StructureConstants& sc, const CMatrix& a, const CMatrix& b, const Tolerances& tol) {
  const double scale = 1.0 + sc.max_abs();
  std::vector<CVector> prods;
  for (Index u = 0; u < a.cols(); ++u)
    for (Index v = 0; v < b.cols(); ++v) {
      CVector w = coordinate_bracket(sc, a.col(u), b.col(v));
      if (w.norm() > tol.residual * scale) prods.push_back(std::move(w));
    }
  CMatrix stacked(sc.n, Index(prods.size()));
  for (Index t = 0; t < Index(prods.size()); ++t) stacked.col(t) = prods[std::size_t(t)];
  return numkit::orth(stacked, tol, scale);
}

inline SeriesChain run_series(const StructureConstants& sc, SeriesKind kind, const Tolerances& tol) {
  SeriesChain chain;
  chain.kind = kind;
  CMatrix full = CMatrix::Identity(sc.n, sc.n);
  chain.subspaces.push_back(full);
  chain.dims.push_back(sc.n);
  CMatrix cur = full;
  while (true) {
    CMatrix next = (kind == SeriesKind::derived) ? bracket_span(sc, cur, cur, tol) : bracket_span(sc, full, cur, tol);
    chain.subspaces.push_back(next);
    chain.dims.push_back(next.cols());
    if (next.cols() == 0 || next.cols() == cur.cols()) break;
    // defensive cap: a genuine chain stalls or hits zero within n steps, so a
    // longer run means rank decisions are oscillating on degenerate input
    if (Index(chain.dims.size()) > sc.n + 2) break;
    cur = next;
  }
  chain.reaches_zero = chain.dims.back() == 0;
  return chain;
}

}  // namespace detail

inline SeriesChain derived_series(const StructureConstants& sc, const Tolerances& tol = Tolerances{}) {
  return detail::run_series(sc, SeriesKind::derived, tol);
}

inline SeriesChain lower_central_series(const StructureConstants& sc, const Tolerances& tol = Tolerances{}) {
  return detail::run_series(sc, SeriesKind::lower_central, tol);
}

enum class AlgebraClass { abelian, nilpotent, solvable, non_solvable };

inline const char* to_string(AlgebraClass c) {
  switch (c) {
    case AlgebraClass::abelian: return "abelian";
    case AlgebraClass::nilpotent: return "nilpotent";
    case AlgebraClass::solvable: return "solvable";
    default: return "non_solvable";
  }
}

// Strongest class that applies; all decisions are subspace-rank based, hence
// invariant under change of basis.
inline AlgebraClass classify(const StructureConstants& sc, const Tolerances& tol = Tolerances{}) {
  const SeriesChain der = derived_series(sc, tol);
  if (der.dims.size() > 1 && der.dims[1] == 0) return AlgebraClass::abelian;
  if (lower_central_series(sc, tol).reaches_zero) return AlgebraClass::nilpotent;
  if (der.reaches_zero) return AlgebraClass::solvable;
  return AlgebraClass::non_solvable;
}

// Scale to unit norm and rotate so the first entry of maximal modulus is a
// positive real; makes eigenvector output reproducible.
inline void normalize_phase(CVector& v) {
  const double nrm = v.norm();
  if (nrm == 0) throw ToleranceError("cannot normalize the zero vector");
  v /= nrm;
  const double mx = v.cwiseAbs().maxCoeff();
  Index idx = 0;
  while (idx < v.size() && std::abs(v(idx)) < mx - 1e-12) ++idx;
  const Complex ph = v(idx) / std::abs(v(idx));
  v /= ph;
}

// Unitary matrix whose first column is the given unit vector (Householder
// reflection with a phase twist); deterministic.
inline CMatrix unitary_completion(const CVector& v) {
  const Index dd = v.size();
  const Complex v0 = v(0);
  const Complex phi = std::abs(v0) > 0 ? v0 / std::abs(v0) : Complex(1);
  CVector vt = v / phi;  // first entry now real nonnegative
  CVector w = vt;
  w(0) -= 1.0;
  CMatrix h = CMatrix::Identity(dd, dd);
  const double wn = w.norm();
  if (wn > 1e-14) {
    w /= wn;
    h -= 2.0 * (w * w.adjoint());
  }
  h.col(0) *= phi;
  return h;
}

namespace detail {

// Constructive Lie's theorem: recurse on a codimension-1 ideal containing the
// derived algebra, intersect its weight spaces, then take an eigenvector of
// the remaining generator restricted there. Deterministic tie-breaking:
// largest eigenspace first, then lexicographically smallest (re, im).
inline CVector rec_common_eig(const std::vector<CMatrix>& mats, Index d, const Tolerances& tol, int depth) {
  if (depth > 256) throw ToleranceError("common eigenvector recursion did not terminate");

  CMatrix stacked(d * d, Index(mats.size()));
  for (Index t = 0; t < Index(mats.size()); ++t) stacked.col(t) = vec(mats[std::size_t(t)]);
  const CMatrix b = numkit::orth(stacked, tol);
  const Index m = b.cols();
  if (m == 0) {
    CVector v = CVector::Zero(d);
    v(0) = 1;
    return v;
  }
  std::vector<CMatrix> basis;
  for (Index t = 0; t < m; ++t) basis.push_back(unvec(b.col(t), d, d));

  // derived span of the current algebra; the basis columns are unit norm, so
  // commutators of a truly commuting pair are pure rounding residue — drop
  // them and floor the rank cutoff at the unit scale
  std::vector<CVector> dv;
  for (Index i = 0; i < m; ++i)
    for (Index j = i + 1; j < m; ++j) {
      CVector w = vec(commutator(basis[std::size_t(i)], basis[std::size_t(j)]));
      if (w.norm() > tol.residual) dv.push_back(std::move(w));
    }
  CMatrix derived(d * d, Index(dv.size()));
  for (Index t = 0; t < Index(dv.size()); ++t) derived.col(t) = dv[std::size_t(t)];
  const CMatrix db = numkit::orth(derived, tol, 1.0);
  if (db.cols() >= m) {
    throw ClassificationError("family is not solvable: derived algebra is not a proper subspace");
  }

  // complete the derived basis to a basis of the span; the last vector added
  // is the extra generator z, everything before it spans a codim-1 ideal
  CMatrix cur = db;
  std::vector<Index> added;
  auto residual_against = [&](const CVector& w, const CMatrix& cols) -> CVector {
    if (cols.cols() == 0) return w;
    return w - cols * (cols.adjoint() * w);
  };
  for (Index i = 0; i < m; ++i) {
    CVector r = residual_against(b.col(i), cur);
    if (r.norm() > 1e-8) {
      cur.conservativeResize(Eigen::NoChange, cur.cols() + 1);
      cur.col(cur.cols() - 1) = r / r.norm();
      added.push_back(i);
    }
  }
  while (cur.cols() < m) {  // fill pass for near-degenerate geometry
    Index best = -1;
    double bestn = -1;
    for (Index i = 0; i < m; ++i) {
      const double rn = residual_against(b.col(i), cur).norm();
      if (rn > bestn) {
        bestn = rn;
        best = i;
      }
    }
    CVector r = residual_against(b.col(best), cur);
    if (!(r.norm() > 1e-14)) {
      throw ToleranceError("codimension-one completion degenerated; consider loosening rank_rel");
    }
    cur.conservativeResize(Eigen::NoChange, cur.cols() + 1);
    cur.col(cur.cols() - 1) = r / r.norm();
    added.push_back(best);
  }
  const CMatrix z = basis[std::size_t(added.back())];
  std::vector<CMatrix> ideal;
  for (Index t = 0; t < db.cols(); ++t) ideal.push_back(unvec(db.col(t), d, d));
  for (std::size_t t = 0; t + 1 < added.size(); ++t) ideal.push_back(basis[std::size_t(added[t])]);

  const CVector v0 = rec_common_eig(ideal, d, tol, depth + 1);

  // joint weight space of the ideal at v0's weights
  CMatrix w_basis = CMatrix::Identity(d, d);
  if (!ideal.empty()) {
    CMatrix shifted(Index(ideal.size()) * d, d);
    for (Index t = 0; t < Index(ideal.size()); ++t) {
      const CMatrix& mm = ideal[std::size_t(t)];
      const Complex lam = (v0.adjoint() * (mm * v0))(0);
      shifted.block(t * d, 0, d, d) = mm - lam * CMatrix::Identity(d, d);
    }
    w_basis = numkit::nullspace(shifted, tol);
    if (w_basis.cols() == 0) {
      throw ToleranceError("joint weight space came out empty; consider loosening rank_rel");
    }
  }

  // eigenvalue of z restricted to the weight space, defect-aware clustering
  const CMatrix mz = w_basis.adjoint() * (z * w_basis);
  const Index md = mz.rows();
  std::vector<Complex> evs = numkit::eigenvalues(mz);
  const double rc = std::max(tol.eig_cluster, numkit::defect_radius(md, numkit::operator_norm(mz)));

  struct Candidate {
    Index dim;
    Complex lam;
    CMatrix space;
  };
  std::vector<Candidate> cands;
  std::vector<bool> used(evs.size(), false);
  for (std::size_t i = 0; i < evs.size(); ++i) {
    if (used[i]) continue;
    Complex sum = 0;
    Index cnt = 0;
    for (std::size_t j = i; j < evs.size(); ++j) {
      if (!used[j] && std::abs(evs[j] - evs[i]) <= rc) {
        used[j] = true;
        sum += evs[j];
        ++cnt;
      }
    }
    const Complex lam = sum / double(cnt);
    const CMatrix a_shift = mz - lam * CMatrix::Identity(md, md);
    CMatrix ns = numkit::nullspace(a_shift, tol);
    if (ns.cols() == 0) {
      // merged cluster of genuinely distinct eigenvalues: fall back to the
      // smallest-singular-value direction; the caller's residual check rules
      Eigen::JacobiSVD<CMatrix> svd(a_shift, Eigen::ComputeFullV);
      ns = svd.matrixV().rightCols(1);
    }
    cands.push_back({ns.cols(), lam, std::move(ns)});
  }
  const Candidate* best = &cands.front();
  for (const auto& c : cands) {
    if (c.dim > best->dim ||
        (c.dim == best->dim && numkit::lex_less(c.lam, best->lam))) {
      best = &c;
    }
  }
  CVector v = w_basis * best->space.col(0);
  normalize_phase(v);
  return v;
}

}  // namespace detail

struct WeightedVector {
  CVector vector;                 // unit norm, phase-normalized
  std::vector<Complex> weights;   // one weight per input matrix
};

inline WeightedVector common_eigenvector(const std::vector<CMatrix>& mats, const StructureConstants& sc,
                                         const Tolerances& tol) {
  if (mats.empty()) throw DimensionError("common_eigenvector: empty family");
  const Index d = mats.front().rows();
  for (const auto& m : mats) {
    if (m.rows() != d || m.cols() != d) throw DimensionError("common_eigenvector: matrices must share one square size");
  }
  if (classify(sc, tol) == AlgebraClass::non_solvable) {
    throw ClassificationError("common_eigenvector requires a solvable family");
  }
  WeightedVector out;
  out.vector = detail::rec_common_eig(mats, d, tol, 0);
  for (const auto& m : mats) {
    const Complex lam = (out.vector.adjoint() * (m * out.vector))(0);
    const double res = (m * out.vector - lam * out.vector).norm();
    if (res > tol.residual * m.norm() * out.vector.norm()) {
      throw ToleranceError("common eigenvector residual " + std::to_string(res) +
                           " exceeds bound; consider loosening rank_rel");
    }
    out.weights.push_back(lam);
  }
  return out;
}

struct JordanHolderFlag {
  CMatrix change_of_basis;  // columns express adapted generators in the input basis
  OperatorFamily adapted;
  StructureConstants adapted_sc;
  std::vector<Index> ideal_dims;  // 0, 1, ..., n
  Index k = 0;                    // L_k = L^2
  bool nilpotent_shape = false;   // adapted constants satisfy the stronger nilpotent shape
};

// Build an adapted basis: a flag of ideals through L^2 (via the adjoint action
// triangularized by repeated common eigenvectors) extended above L^2 by
// original coordinates in input order (every subspace containing L^2 is an
// ideal). The change of basis is unitary by construction.
inline JordanHolderFlag jordan_holder_flag(const OperatorFamily& fam, const StructureConstants& sc,
                                           const Tolerances& tol) {
  const Index n = fam.algebra_dim;
  if (classify(sc, tol) == AlgebraClass::non_solvable) {
    throw ClassificationError("jordan_holder_flag requires a solvable family");
  }

  // L^2 as a coordinate subspace; same noise-floor discipline as the series
  // computation so an abelian family cannot pick up a ghost dimension
  const double bracket_scale = 1.0 + sc.max_abs();
  std::vector<CVector> bvecs;
  for (Index i = 0; i < n; ++i)
    for (Index j = i + 1; j < n; ++j) {
      CVector w = sc.bracket_in_basis(i, j);
      if (w.norm() > tol.residual * bracket_scale) bvecs.push_back(std::move(w));
    }
  CMatrix bstack(n, Index(bvecs.size()));
  for (Index t = 0; t < Index(bvecs.size()); ++t) bstack.col(t) = bvecs[std::size_t(t)];
  const CMatrix l2 = numkit::orth(bstack, tol, bracket_scale);
  const Index k = l2.cols();

  CMatrix chain(n, 0);
  if (k > 0) {
    // adjoint action restricted to L^2
    std::vector<CMatrix> ads;
    for (Index t = 0; t < n; ++t) {
      CMatrix adt(n, n);
      for (Index u = 0; u < n; ++u) adt.col(u) = sc.bracket_in_basis(t, u);
      CMatrix a = l2.adjoint() * (adt * l2);
      const double inv_res = (adt * l2 - l2 * a).norm();
      if (inv_res > std::max(1e-8, tol.residual) * (1.0 + adt.norm())) {
        throw ToleranceError("derived algebra is not invariant under the adjoint action (residual " +
                             std::to_string(inv_res) + "); structure constants inconsistent");
      }
      ads.push_back(std::move(a));
    }
    // simultaneous unitary triangularization: repeated common eigenvector +
    // deflation; accumulated Q turns the columns of l2 into the ideal chain
    CMatrix qacc = CMatrix::Identity(k, k);
    std::vector<CMatrix> cur = ads;
    for (Index dd = k; dd >= 1; --dd) {
      const CVector v = detail::rec_common_eig(cur, dd, tol, 0);
      const CMatrix u = unitary_completion(v);
      CMatrix blk = CMatrix::Identity(k, k);
      blk.block(k - dd, k - dd, dd, dd) = u;
      qacc = qacc * blk;
      std::vector<CMatrix> nxt;
      for (const auto& mmat : cur) nxt.push_back((u.adjoint() * mmat * u).bottomRightCorner(dd - 1, dd - 1));
      cur = std::move(nxt);
    }
    chain = l2 * qacc;
  }

  // completion above L^2 by original coordinates, greedy in input order with a
  // largest-residual fill pass; Gram-Schmidt keeps the full basis unitary.
  // Chain columns get canonical phases so the output basis is reproducible.
  std::vector<CVector> cols;
  for (Index t = 0; t < k; ++t) {
    CVector c = chain.col(t);
    normalize_phase(c);
    cols.push_back(std::move(c));
  }
  auto residual_of = [&](Index t) {
    CVector e = CVector::Zero(n);
    e(t) = 1;
    for (const auto& u : cols) e -= u * (u.adjoint() * e)(0);
    return e;
  };
  auto push_normalized = [&](CVector r) {
    const double rn = r.norm();
    if (!(rn > 1e-14)) throw ToleranceError("flag completion degenerated; adapted basis numerically deficient");
    r /= rn;
    for (const auto& u : cols) r -= u * (u.adjoint() * r)(0);  // re-orthogonalize
    normalize_phase(r);
    cols.push_back(std::move(r));
  };
  for (Index t = 0; t < n && Index(cols.size()) < n; ++t) {
    CVector r = residual_of(t);
    if (r.norm() > 1e-3) push_normalized(r);
  }
  while (Index(cols.size()) < n) {
    Index best = 0;
    double bestn = -1;
    for (Index t = 0; t < n; ++t) {
      const double rn = residual_of(t).norm();
      if (rn > bestn) {
        bestn = rn;
        best = t;
      }
    }
    push_normalized(residual_of(best));
  }
  CMatrix tmat(n, n);
  for (Index t = 0; t < n; ++t) tmat.col(t) = cols[std::size_t(t)];
  if ((tmat.adjoint() * tmat - CMatrix::Identity(n, n)).norm() > 1e-8) {
    throw ToleranceError("adapted change of basis failed to be unitary");
  }

  JordanHolderFlag flag;
  flag.change_of_basis = tmat;
  flag.k = k;
  flag.adapted.space_dim = fam.space_dim;
  flag.adapted.algebra_dim = n;
  for (Index i = 0; i < n; ++i) {
    CMatrix g = CMatrix::Zero(fam.space_dim, fam.space_dim);
    for (Index t = 0; t < n; ++t) g += tmat(t, i) * fam.generators[std::size_t(t)];
    flag.adapted.generators.push_back(std::move(g));
    flag.adapted.labels.push_back("x" + std::to_string(i + 1));
  }
  flag.adapted_sc = verify_closure(flag.adapted, tol);
  for (Index i = 0; i <= n; ++i) flag.ideal_dims.push_back(i);

  // triangular-shape assertion: brackets stay inside the flag
  const double shape_tol = tol.residual * (1.0 + flag.adapted_sc.max_abs());
  for (Index i = 0; i < n; ++i)
    for (Index j = i + 1; j < n; ++j)
      for (Index h = i + 1; h < n; ++h) {
        if (std::abs(flag.adapted_sc.at(h, i, j)) > shape_tol) {
          throw ShapeError("adapted constants violate the flag shape at (h,i,j)=(" + std::to_string(h + 1) + "," +
                           std::to_string(i + 1) + "," + std::to_string(j + 1) + ")");
        }
      }
  double nil = 0;
  for (Index i = 0; i < n; ++i)
    for (Index j = i + 1; j < n; ++j) nil = std::max(nil, std::abs(flag.adapted_sc.at(i, i, j)));
  flag.nilpotent_shape = nil <= shape_tol;
  return flag;
}

}  // namespace liespec::liealg
