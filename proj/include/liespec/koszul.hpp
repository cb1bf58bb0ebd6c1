#pragma once

// The chain complex (E (x) /\L, d(f)): graded exterior basis, boundary maps,
// the derivation theta(x_j), the last-generator operator L_p, the split of
// the boundary along /\<x_n>, and the homotopy family S_p.

#include <algorithm>
#include <string>
#include <utility>
#include <vector>

#include "liespec/liealg.hpp"
#include "liespec/numkit.hpp"
#include "liespec/types.hpp"

namespace liespec::koszul {

// Strictly increasing 1-based index tuple; the empty tuple is the degree-0
// vacuum element. Tuples of equal degree are ordered at the first differing
// slot, which is plain lexicographic order.
struct ExteriorIndex {
  std::vector<int> entries;

  int degree() const { return int(entries.size()); }
  bool operator==(const ExteriorIndex& o) const { return entries == o.entries; }
  bool operator<(const ExteriorIndex& o) const {
    return std::lexicographical_compare(entries.begin(), entries.end(), o.entries.begin(), o.entries.end());
  }
  std::string to_string() const {
    std::string s = "(";
    for (std::size_t t = 0; t < entries.size(); ++t) {
      if (t) s += ",";
      s += std::to_string(entries[t]);
    }
    return s + ")";
  }
};

// Sort a tuple into increasing order carrying the permutation sign; a
// repeated index annihilates the wedge (sign 0).
inline std::pair<ExteriorIndex, int> wedge_normalize(std::vector<int> t) {
  int sign = 1;
  for (std::size_t i = 0; i < t.size(); ++i) {
    for (std::size_t j = 0; j + 1 + i < t.size(); ++j) {
      if (t[j] > t[j + 1]) {
        std::swap(t[j], t[j + 1]);
        sign = -sign;
      }
    }
  }
  for (std::size_t i = 0; i + 1 < t.size(); ++i) {
    if (t[i] == t[i + 1]) return {ExteriorIndex{}, 0};
  }
  return {ExteriorIndex{std::move(t)}, sign};
}

// Flat coordinates within degree p: tuple block major (tuples in order), E
// coordinate minor, so basis element e_t (x) alpha sits at tuple_pos * d + t.
struct GradedBasis {
  Index d = 0;  // dim E
  Index m = 0;  // dim of the wedged algebra
  std::vector<std::vector<ExteriorIndex>> degrees;  // p = 0..m

  Index tuple_count(Index p) const {
    if (p < 0 || p > m) return 0;
    return Index(degrees[std::size_t(p)].size());
  }
  Index block_dim(Index p) const { return d * tuple_count(p); }
  Index total_dim() const {
    Index s = 0;
    for (Index p = 0; p <= m; ++p) s += block_dim(p);
    return s;
  }
  Index degree_offset(Index p) const {
    Index s = 0;
    for (Index q = 0; q < p; ++q) s += block_dim(q);
    return s;
  }
  Index tuple_pos(Index p, const ExteriorIndex& a) const {
    const auto& list = degrees[std::size_t(p)];
    auto it = std::lower_bound(list.begin(), list.end(), a);
    if (it == list.end() || !(*it == a)) return -1;
    return Index(it - list.begin());
  }
};

inline GradedBasis exterior_basis(Index d, Index m) {
  if (d < 1 || m < 0) throw DimensionError("exterior_basis: need d >= 1 and m >= 0");
  GradedBasis b;
  b.d = d;
  b.m = m;
  b.degrees.resize(std::size_t(m) + 1);
  b.degrees[0].push_back(ExteriorIndex{});
  for (Index p = 1; p <= m; ++p) {
    // enumerate strictly increasing p-tuples of 1..m in lexicographic order
    std::vector<int> t(static_cast<std::size_t>(p));
    for (Index i = 0; i < p; ++i) t[std::size_t(i)] = int(i) + 1;
    while (true) {
      b.degrees[std::size_t(p)].push_back(ExteriorIndex{t});
      int i = int(p) - 1;
      while (i >= 0 && t[std::size_t(i)] == int(m) - (int(p) - 1 - i)) --i;
      if (i < 0) break;
      ++t[std::size_t(i)];
      for (int j = i + 1; j < int(p); ++j) t[std::size_t(j)] = t[std::size_t(j - 1)] + 1;
    }
  }
  return b;
}

namespace detail {

// Generators x_1..x_{j-1} must span an ideal invariant under ad(x_j): every
// bracket [x_j, x_i] may only have components below index j.
inline void require_ideal_invariance(const liealg::StructureConstants& sc, Index j, const Tolerances& tol) {
  const double thresh = tol.residual * (1.0 + sc.max_abs());
  for (Index i = 1; i < j; ++i) {
    const CVector co = sc.bracket_in_basis(j - 1, i - 1);
    for (Index h = j - 1; h < sc.n; ++h) {
      if (std::abs(co(h)) > thresh) {
        throw ShapeError("span of the first " + std::to_string(j - 1) +
                         " generators is not invariant under generator " + std::to_string(j) +
                         "; the family is not in flag order");
      }
    }
  }
}

}  // namespace detail

// Matrix of theta(x_j) on /\^p of span(x_1..x_{j-1}) (no E factor), tuple
// basis in order. Block upper triangular with diagonal entries r_alpha.
inline CMatrix theta_wedge(const liealg::StructureConstants& sc, Index j, Index p, const Tolerances& tol) {
  if (j < 1 || j > sc.n) throw DimensionError("theta_wedge: generator index out of range");
  detail::require_ideal_invariance(sc, j, tol);
  const GradedBasis wb = exterior_basis(1, j - 1);
  if (p < 0 || p > j - 1) throw DimensionError("theta_wedge: degree out of range");
  const auto& tuples = wb.degrees[std::size_t(p)];
  const Index nt = Index(tuples.size());
  CMatrix th = CMatrix::Zero(nt, nt);
  for (Index col = 0; col < nt; ++col) {
    const auto& beta = tuples[std::size_t(col)].entries;
    for (std::size_t slot = 0; slot < beta.size(); ++slot) {
      const CVector co = sc.bracket_in_basis(j - 1, Index(beta[slot]) - 1);  // [x_j, x_beta_slot]
      for (Index h = 0; h < sc.n; ++h) {
        if (std::abs(co(h)) < 1e-300) continue;
        std::vector<int> rep = beta;
        rep[slot] = int(h) + 1;
        auto [norm, sgn] = wedge_normalize(std::move(rep));
        if (sgn == 0) continue;
        const Index row = wb.tuple_pos(p, norm);
        if (row < 0) continue;  // components outside 1..j-1 already rejected above
        th(row, col) += double(sgn) * co(h);
      }
    }
  }
  return th;
}

// Per-degree matrices of 1_E (x) theta(x_j) on E (x) /\^p L_{j-1}, p = 0..j-1.
inline std::vector<CMatrix> theta(const liealg::OperatorFamily& adapted, const liealg::StructureConstants& sc,
                                  Index j, const GradedBasis& basis, const Tolerances& tol) {
  if (basis.m != j - 1 || basis.d != adapted.space_dim) {
    throw DimensionError("theta: basis must be the graded basis of E (x) /\\L_{j-1}");
  }
  std::vector<CMatrix> out;
  const CMatrix id = CMatrix::Identity(adapted.space_dim, adapted.space_dim);
  for (Index p = 0; p <= j - 1; ++p) out.push_back(numkit::kron(theta_wedge(sc, j, p, tol), id));
  return out;
}

// f must vanish on every bracket: |f([x_i, x_j])| within residual tolerance.
inline void require_character(const liealg::StructureConstants& sc, const CVector& f, const Tolerances& tol) {
  if (f.size() != sc.n) throw DimensionError("character must have one coordinate per generator");
  const double scale = (1.0 + sc.max_abs()) * (1.0 + (f.size() ? f.cwiseAbs().maxCoeff() : 0.0));
  for (Index i = 0; i < sc.n; ++i)
    for (Index j = i + 1; j < sc.n; ++j) {
      const CVector co = sc.bracket_in_basis(i, j);
      Complex v(0);
      for (Index h = 0; h < sc.n; ++h) v += co(h) * f(h);
      if (std::abs(v) > tol.residual * scale) {
        throw CharacterError("functional does not vanish on the bracket of generators " + std::to_string(i + 1) +
                             " and " + std::to_string(j + 1) + " (value " + std::to_string(std::abs(v)) + ")");
      }
    }
}

struct BoundaryFamily {
  GradedBasis basis;
  CVector character;
  // maps[p] is the boundary out of degree p into degree p-1, for p = 1..m;
  // maps[0] is the empty map out of degree 0.
  std::vector<CMatrix> maps;

  const CMatrix& from_degree(Index p) const { return maps[std::size_t(p)]; }
  // boundary into degree p (i.e. out of p+1); zero-sized when out of range
  CMatrix into_degree(Index p) const {
    if (p + 1 >= Index(maps.size())) return CMatrix::Zero(basis.block_dim(p), 0);
    return maps[std::size_t(p + 1)];
  }
};

// Assemble every d_{p-1}(f) column by column over basis wedges: the first sum
// applies (x_k - f(x_k)) to the E slot with sign (-1)^{k+1} and deletes slot
// k; the second substitutes the expanded bracket [x_k, x_l] into the first
// slot with sign (-1)^{k+l}, then re-sorts with the permutation sign.
inline BoundaryFamily boundary(const liealg::OperatorFamily& adapted, const liealg::StructureConstants& sc,
                               const CVector& f, const Tolerances& tol) {
  const Index n = adapted.algebra_dim;
  const Index d = adapted.space_dim;
  require_character(sc, f, tol);

  BoundaryFamily bf;
  bf.basis = exterior_basis(d, n);
  bf.character = f;
  bf.maps.resize(std::size_t(n) + 1);
  bf.maps[0] = CMatrix::Zero(0, d);

  const CMatrix id = CMatrix::Identity(d, d);
  for (Index p = 1; p <= n; ++p) {
    const auto& src = bf.basis.degrees[std::size_t(p)];
    const auto& tgt = bf.basis.degrees[std::size_t(p - 1)];
    CMatrix dm = CMatrix::Zero(d * Index(tgt.size()), d * Index(src.size()));
    for (Index bs = 0; bs < Index(src.size()); ++bs) {
      const auto& alpha = src[std::size_t(bs)].entries;
      for (std::size_t k = 0; k < alpha.size(); ++k) {
        std::vector<int> rest;
        for (std::size_t t = 0; t < alpha.size(); ++t)
          if (t != k) rest.push_back(alpha[t]);
        const double sgn = (k % 2 == 0) ? 1.0 : -1.0;  // (-1)^{k+1} with 1-based k
        const Index bt = bf.basis.tuple_pos(p - 1, ExteriorIndex{rest});
        dm.block(bt * d, bs * d, d, d) +=
            sgn * (adapted.generators[std::size_t(alpha[k]) - 1] - f(Index(alpha[k]) - 1) * id);
      }
      for (std::size_t k = 0; k < alpha.size(); ++k) {
        for (std::size_t l = k + 1; l < alpha.size(); ++l) {
          std::vector<int> rest;
          for (std::size_t t = 0; t < alpha.size(); ++t)
            if (t != k && t != l) rest.push_back(alpha[t]);
          const double sgn_kl = ((k + l) % 2 == 0) ? 1.0 : -1.0;  // (-1)^{k+l} with 1-based k, l
          const CVector co = sc.bracket_in_basis(Index(alpha[k]) - 1, Index(alpha[l]) - 1);
          for (Index h = 0; h < n; ++h) {
            if (std::abs(co(h)) < 1e-300) continue;
            std::vector<int> tup;
            tup.push_back(int(h) + 1);
            tup.insert(tup.end(), rest.begin(), rest.end());
            auto [norm, s2] = wedge_normalize(std::move(tup));
            if (s2 == 0) continue;
            const Index bt = bf.basis.tuple_pos(p - 1, norm);
            dm.block(bt * d, bs * d, d, d) += (sgn_kl * double(s2)) * co(h) * id;
          }
        }
      }
    }
    bf.maps[std::size_t(p)] = std::move(dm);
  }

  // chain-complex sanity: consecutive maps compose to zero
  for (Index p = 2; p <= n; ++p) {
    const CMatrix& a = bf.maps[std::size_t(p - 1)];
    const CMatrix& b = bf.maps[std::size_t(p)];
    const double res = (a * b).norm() / (1.0 + a.norm() * b.norm());
    if (res > std::max(1e-10, tol.residual)) {
      throw ToleranceError("boundary maps fail d(d(.)) = 0 at degree " + std::to_string(p) + " (relative residual " +
                           std::to_string(res) + ")");
    }
  }
  return bf;
}

// L_p = (x_n - f(x_n)) (x) 1 - 1 (x) theta(x_n) on E (x) /\^p L_{n-1}.
inline CMatrix lp_operator(const liealg::OperatorFamily& adapted, const liealg::StructureConstants& sc,
                           const CVector& f, Index p, const Tolerances& tol) {
  const Index n = adapted.algebra_dim;
  const Index d = adapted.space_dim;
  if (p < 0 || p > n - 1) throw DimensionError("lp_operator: degree out of range 0..n-1");
  const CMatrix th = theta_wedge(sc, n, p, tol);
  const CMatrix shifted = adapted.generators[std::size_t(n) - 1] - f(n - 1) * CMatrix::Identity(d, d);
  return numkit::kron(CMatrix::Identity(th.rows(), th.rows()), shifted) -
         numkit::kron(th, CMatrix::Identity(d, d));
}

// Selection embedding E (x) /\^p L' -> E (x) /\^p L (tuples avoiding m).
inline CMatrix embed_no_last(const GradedBasis& full, Index p) {
  const GradedBasis sub = exterior_basis(full.d, full.m - 1);
  CMatrix e = CMatrix::Zero(full.block_dim(p), sub.block_dim(p));
  for (Index cs = 0; cs < sub.tuple_count(p); ++cs) {
    const Index ct = full.tuple_pos(p, sub.degrees[std::size_t(p)][std::size_t(cs)]);
    e.block(ct * full.d, cs * full.d, full.d, full.d) = CMatrix::Identity(full.d, full.d);
  }
  return e;
}

// Wedge embedding E (x) /\^{p-1} L' -> E (x) /\^p L, a |-> a /\ x_m (the last
// generator appends in final position, so the sign is +1).
inline CMatrix embed_wedge_last(const GradedBasis& full, Index p) {
  const GradedBasis sub = exterior_basis(full.d, full.m - 1);
  CMatrix e = CMatrix::Zero(full.block_dim(p), sub.block_dim(p - 1));
  for (Index cs = 0; cs < sub.tuple_count(p - 1); ++cs) {
    std::vector<int> t = sub.degrees[std::size_t(p - 1)][std::size_t(cs)].entries;
    t.push_back(int(full.m));
    const Index ct = full.tuple_pos(p, ExteriorIndex{t});
    e.block(ct * full.d, cs * full.d, full.d, full.d) = CMatrix::Identity(full.d, full.d);
  }
  return e;
}

struct SplitReport {
  // residuals per degree p = 1..n of the two split identities
  std::vector<double> restriction_residual;  // d(f) restricted to /\L' equals d(f~)
  std::vector<double> wedge_residual;        // d(f)(a /\ x_n) = (-1)^{p+1} L_{p-1}(a) + (d(f~)a) /\ x_n
  double max_residual = 0;
};

// Verify both split identities by assembling each side in the decomposition
// E (x) /\^p L = (E (x) /\^p L') (+) (E (x) /\^{p-1} L') /\ <x_n>.
inline SplitReport split_check(const liealg::OperatorFamily& adapted, const liealg::StructureConstants& sc,
                               const CVector& f, const Tolerances& tol) {
  const Index n = adapted.algebra_dim;
  const BoundaryFamily full = boundary(adapted, sc, f, tol);

  liealg::OperatorFamily subfam;
  subfam.space_dim = adapted.space_dim;
  subfam.algebra_dim = n - 1;
  for (Index t = 0; t + 1 < n; ++t) {
    subfam.generators.push_back(adapted.generators[std::size_t(t)]);
    subfam.labels.push_back(adapted.labels[std::size_t(t)]);
  }
  liealg::StructureConstants subsc(n - 1);
  for (Index h = 0; h + 1 < n; ++h)
    for (Index i = 0; i + 1 < n; ++i)
      for (Index j = 0; j + 1 < n; ++j) subsc.at(h, i, j) = sc.at(h, i, j);
  const CVector ft = f.head(n - 1);
  BoundaryFamily sub;
  if (n >= 2) sub = boundary(subfam, subsc, ft, tol);

  SplitReport rep;
  for (Index p = 1; p <= n; ++p) {
    const CMatrix& dfull = full.maps[std::size_t(p)];
    const CMatrix i0p = embed_no_last(full.basis, p);
    const CMatrix i0m = embed_no_last(full.basis, p - 1);
    double r2 = 0;
    if (p <= n - 1 && n >= 2) {
      r2 = (dfull * i0p - i0m * sub.maps[std::size_t(p)]).norm() / (1.0 + dfull.norm());
    }
    const CMatrix i1p = embed_wedge_last(full.basis, p);
    const double sign = (p % 2 == 0) ? -1.0 : 1.0;  // (-1)^{p+1}
    CMatrix rhs = sign * (i0m * lp_operator(adapted, sc, f, p - 1, tol));
    if (p >= 2 && n >= 2) {
      rhs += embed_wedge_last(full.basis, p - 1) * sub.maps[std::size_t(p - 1)];
    }
    const double r3 = (dfull * i1p - rhs).norm() / (1.0 + dfull.norm());
    rep.restriction_residual.push_back(r2);
    rep.wedge_residual.push_back(r3);
    rep.max_residual = std::max({rep.max_residual, r2, r3});
  }
  return rep;
}

struct HomotopyFamily {
  std::vector<CMatrix> maps;                // S_p for p = 0..n-1
  std::vector<double> identity_residual;    // ||d S + S d - I||_F per degree 0..n
  std::vector<double> intertwine_residual;  // Frobenius residual of the S d L identity per degree 0..n-2
  double max_identity_residual = 0;
  double max_intertwine_residual = 0;
  double accept = 1e-8;
  bool ok = false;
};

// Build S_p = (-1)^p (L_p^{-1} .) /\ x_n on the no-x_n summand (zero on the
// /\<x_n> summand) and verify both the intertwining identity and
// d S + S d = I. Requires every L_p invertible.
inline HomotopyFamily homotopy(const liealg::OperatorFamily& adapted, const liealg::StructureConstants& sc,
                               const CVector& f, const Tolerances& tol, double accept = 1e-8) {
  const Index n = adapted.algebra_dim;
  const BoundaryFamily full = boundary(adapted, sc, f, tol);

  std::vector<CMatrix> lps;
  std::vector<Index> singular;
  for (Index p = 0; p <= n - 1; ++p) {
    CMatrix lp = lp_operator(adapted, sc, f, p, tol);
    if (numkit::numerical_rank(lp, tol) < lp.cols()) singular.push_back(p);
    lps.push_back(std::move(lp));
  }
  if (!singular.empty()) {
    std::string degs;
    for (Index p : singular) degs += (degs.empty() ? "" : ", ") + std::to_string(p);
    throw HomotopyNotApplicable("L_p singular at degree(s) " + degs +
                                    "; f(x_n) appears to lie in the component spectrum",
                                singular);
  }

  HomotopyFamily hf;
  hf.accept = accept;
  for (Index p = 0; p <= n - 1; ++p) {
    const CMatrix proj = embed_no_last(full.basis, p).transpose();
    const CMatrix inv_applied = numkit::solve_linear(lps[std::size_t(p)], proj, tol);
    const double sign = (p % 2 == 0) ? 1.0 : -1.0;
    hf.maps.push_back(sign * (embed_wedge_last(full.basis, p + 1) * inv_applied));
  }

  for (Index p = 0; p <= n; ++p) {
    const Index dim = full.basis.block_dim(p);
    CMatrix acc = CMatrix::Zero(dim, dim);
    if (p <= n - 1) acc += full.maps[std::size_t(p + 1)] * hf.maps[std::size_t(p)];
    if (p >= 1) acc += hf.maps[std::size_t(p - 1)] * full.maps[std::size_t(p)];
    const double r = (acc - CMatrix::Identity(dim, dim)).norm();
    hf.identity_residual.push_back(r);
    hf.max_identity_residual = std::max(hf.max_identity_residual, r);
  }

  if (n >= 2) {
    liealg::OperatorFamily subfam;
    subfam.space_dim = adapted.space_dim;
    subfam.algebra_dim = n - 1;
    for (Index t = 0; t + 1 < n; ++t) {
      subfam.generators.push_back(adapted.generators[std::size_t(t)]);
      subfam.labels.push_back(adapted.labels[std::size_t(t)]);
    }
    liealg::StructureConstants subsc(n - 1);
    for (Index h = 0; h + 1 < n; ++h)
      for (Index i = 0; i + 1 < n; ++i)
        for (Index j = 0; j + 1 < n; ++j) subsc.at(h, i, j) = sc.at(h, i, j);
    const BoundaryFamily sub = boundary(subfam, subsc, f.head(n - 1), tol);
    for (Index p = 0; p <= n - 2; ++p) {
      const CMatrix lhs = hf.maps[std::size_t(p)] * full.maps[std::size_t(p + 1)] *
                          embed_no_last(full.basis, p + 1) * lp_operator(adapted, sc, f, p + 1, tol);
      const double sign = (p % 2 == 0) ? 1.0 : -1.0;
      const CMatrix rhs = sign * (embed_wedge_last(full.basis, p + 1) * sub.maps[std::size_t(p + 1)]);
      const double r = (lhs - rhs).norm();
      hf.intertwine_residual.push_back(r);
      hf.max_intertwine_residual = std::max(hf.max_intertwine_residual, r);
    }
  }
  hf.ok = hf.max_identity_residual <= accept;
  return hf;
}

}  // namespace liespec::koszul
