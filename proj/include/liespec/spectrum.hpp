#pragma once

// The joint spectrum: diagonal weights of theta, per-coordinate component
// spectra, homology dimensions of the chain complex, the character-grid
// search, a deflation oracle for commuting families, and the projection and
// nilpotent-family structure checks.

#include <algorithm>
#include <cstdint>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "liespec/koszul.hpp"
#include "liespec/liealg.hpp"
#include "liespec/numkit.hpp"
#include "liespec/rng.hpp"
#include "liespec/types.hpp"

namespace liespec::spectrum {

struct WeightTable {
  Index j = 0;
  // one entry per exterior tuple over 1..j-1, in basis order
  std::vector<std::pair<koszul::ExteriorIndex, Complex>> entries;
};

// Diagonal weight of theta(x_j) on the wedge spanned by a tuple alpha:
// r_alpha = sum over slots i of the coefficient of x_i in [x_j, x_i].
inline Complex tuple_weight(const liealg::StructureConstants& sc, Index j, const koszul::ExteriorIndex& alpha) {
  Complex r(0);
  for (int e : alpha.entries) r += sc.bracket_in_basis(j - 1, Index(e) - 1)(Index(e) - 1);
  return r;
}

inline WeightTable weights(const liealg::StructureConstants& sc, Index j, const Tolerances& tol) {
  if (j < 1 || j > sc.n) throw DimensionError("weights: generator index out of range");
  koszul::detail::require_ideal_invariance(sc, j, tol);
  WeightTable w;
  w.j = j;
  const koszul::GradedBasis wb = koszul::exterior_basis(1, j - 1);
  for (Index p = 0; p <= j - 1; ++p) {
    for (const auto& alpha : wb.degrees[std::size_t(p)]) {
      w.entries.emplace_back(alpha, tuple_weight(sc, j, alpha));
    }
  }
  return w;
}

// Clustering radius for eigenvalue sets of a dim-by-dim matrix: defective
// eigenvalues carry roundoff fuzz of order eps^(1/multiplicity), far beyond
// eig_cluster, so the radius widens with the dimension. Cluster means cancel
// the fuzz to first order because eigenvalue sums equal traces.
inline double eig_radius(Index dim, double scale, const Tolerances& tol) {
  return std::max(tol.eig_cluster, numkit::defect_radius(dim, scale));
}

// Sp(x_bar_j) on E (x) /\L_{j-1} via the weight formula: the union over
// tuples alpha of Sp(x_j) - r_alpha, clustered. Cross-checked against the
// eigenvalues of the assembled block operators.
inline std::vector<Complex> component_spectrum(const liealg::OperatorFamily& adapted,
                                               const liealg::StructureConstants& sc, Index j,
                                               const Tolerances& tol) {
  if (j < 1 || j > adapted.algebra_dim) throw DimensionError("component_spectrum: generator index out of range");
  const Index d = adapted.space_dim;
  const CMatrix& xj = adapted.generators[std::size_t(j) - 1];
  const std::vector<Complex> base = numkit::eigenvalues(xj);
  const WeightTable wt = weights(sc, j, tol);

  std::vector<Complex> formula;
  for (const auto& [alpha, r] : wt.entries) {
    for (const Complex& lam : base) formula.push_back(lam - r);
  }
  const double rad = eig_radius(d, xj.norm(), tol);
  std::vector<Complex> clustered = numkit::cluster_values(std::move(formula), rad);

  // independent route: eigenvalues of the assembled operators per degree
  std::vector<Complex> assembled;
  Index max_block = 0;
  double max_scale = 0;
  const CMatrix id = CMatrix::Identity(d, d);
  for (Index p = 0; p <= j - 1; ++p) {
    const CMatrix th = koszul::theta_wedge(sc, j, p, tol);
    const CMatrix block =
        numkit::kron(CMatrix::Identity(th.rows(), th.rows()), xj) - numkit::kron(th, id);
    max_block = std::max(max_block, Index(block.rows()));
    max_scale = std::max(max_scale, block.norm());
    for (const Complex& lam : numkit::eigenvalues(block)) assembled.push_back(lam);
  }
  const double xrad = eig_radius(max_block, max_scale, tol);
  double worst = 0;
  for (const Complex& a : assembled) {
    double best = std::numeric_limits<double>::infinity();
    for (const Complex& b : clustered) best = std::min(best, std::abs(a - b));
    worst = std::max(worst, best);
  }
  for (const Complex& b : clustered) {
    double best = std::numeric_limits<double>::infinity();
    for (const Complex& a : assembled) best = std::min(best, std::abs(a - b));
    worst = std::max(worst, best);
  }
  if (worst > xrad) {
    throw ToleranceError("component spectrum cross-check failed for generator " + std::to_string(j) +
                         ": weight formula and assembled operator disagree by " + std::to_string(worst));
  }
  return clustered;
}

// Homology dimensions of (E (x) /\L, d(f)) per degree 0..n via ranks.
inline std::vector<Index> homology_dims(const liealg::OperatorFamily& adapted,
                                        const liealg::StructureConstants& sc, const CVector& f,
                                        const Tolerances& tol) {
  const Index n = adapted.algebra_dim;
  const koszul::BoundaryFamily bf = koszul::boundary(adapted, sc, f, tol);
  std::vector<Index> rank(std::size_t(n) + 2, 0);
  for (Index p = 1; p <= n; ++p) rank[std::size_t(p)] = numkit::numerical_rank(bf.maps[std::size_t(p)], tol);
  std::vector<Index> h;
  long long euler = 0;
  for (Index p = 0; p <= n; ++p) {
    const Index hp = bf.basis.block_dim(p) - rank[std::size_t(p)] - rank[std::size_t(p) + 1];
    if (hp < 0) {
      throw ToleranceError("negative homology dimension at degree " + std::to_string(p) +
                           "; rank threshold is inconsistent, adjust rank_rel");
    }
    euler += (p % 2 == 0 ? 1 : -1) * (long long)hp;
    h.push_back(hp);
  }
  // alternating sum telescopes to d * (1-1)^n for n >= 1
  if (n >= 1 && euler != 0) {
    throw ToleranceError("homology dimensions violate the Euler characteristic identity");
  }
  return h;
}

inline bool is_in_spectrum(const liealg::OperatorFamily& adapted, const liealg::StructureConstants& sc,
                           const CVector& f, const Tolerances& tol) {
  for (Index hp : homology_dims(adapted, sc, f, tol)) {
    if (hp > 0) return true;
  }
  return false;
}

struct SpectrumPoint {
  CVector adapted_coords;
  CVector input_coords;
  std::vector<Index> betti;
};

struct SpectrumResult {
  liealg::JordanHolderFlag flag;
  std::vector<std::vector<Complex>> component_spectra;  // per adapted coordinate j = 1..n
  std::vector<std::vector<Complex>> axes;               // grid axes actually searched
  std::vector<SpectrumPoint> points;                    // sorted by adapted coordinates
  Index candidates_tested = 0;
};

namespace detail {

inline bool coords_lex_less(const CVector& a, const CVector& b) {
  for (Index t = 0; t < a.size(); ++t) {
    if (a(t) != b(t)) return numkit::lex_less(a(t), b(t));
  }
  return false;
}

inline double coords_dist(const CVector& a, const CVector& b) {
  double m = 0;
  for (Index t = 0; t < a.size(); ++t) m = std::max(m, std::abs(a(t) - b(t)));
  return m;
}

}  // namespace detail

// Compute Sp(L, E): adapt the family to a flag, build the candidate grid of
// component-spectrum values per coordinate (coordinates inside the derived
// ideal must carry 0 and are pinned there), and keep the characters whose
// chain complex has nonzero homology.
inline SpectrumResult joint_spectrum(const liealg::OperatorFamily& fam, const Tolerances& tol) {
  const liealg::StructureConstants sc = liealg::verify_closure(fam, tol);
  if (liealg::classify(sc, tol) == liealg::AlgebraClass::non_solvable) {
    throw ClassificationError("joint spectrum requires a solvable family");
  }
  SpectrumResult res;
  res.flag = liealg::jordan_holder_flag(fam, sc, tol);
  const Index n = fam.algebra_dim;
  const liealg::OperatorFamily& ad = res.flag.adapted;
  const liealg::StructureConstants& asc = res.flag.adapted_sc;

  for (Index j = 1; j <= n; ++j) {
    std::vector<Complex> comp = component_spectrum(ad, asc, j, tol);
    res.component_spectra.push_back(comp);
    if (j <= res.flag.k) {
      // coordinate lies in the derived ideal: every character vanishes there,
      // and 0 belongs to the component spectrum (the generator is nilpotent
      // as a bracket of a solvable family). Verify, then pin the axis.
      double mn = std::numeric_limits<double>::infinity();
      for (const Complex& v : comp) mn = std::min(mn, std::abs(v));
      const double rad = eig_radius(ad.space_dim, ad.generators[std::size_t(j) - 1].norm(), tol);
      if (mn > rad) {
        throw ToleranceError("component spectrum of derived-ideal coordinate " + std::to_string(j) +
                             " misses 0 by " + std::to_string(mn));
      }
      res.axes.push_back({Complex(0, 0)});
    } else {
      res.axes.push_back(comp);
    }
  }

  // odometer over the axis product
  std::vector<std::size_t> idx(std::size_t(n), 0);
  std::vector<SpectrumPoint> found;
  for (;;) {
    CVector f(n);
    for (Index j = 0; j < n; ++j) f(j) = res.axes[std::size_t(j)][idx[std::size_t(j)]];
    ++res.candidates_tested;
    std::vector<Index> h = homology_dims(ad, asc, f, tol);
    bool nonzero = false;
    for (Index hp : h) nonzero = nonzero || hp > 0;
    if (nonzero) {
      SpectrumPoint pt;
      pt.adapted_coords = f;
      pt.input_coords = res.flag.change_of_basis.conjugate() * f;
      pt.betti = std::move(h);
      found.push_back(std::move(pt));
    }
    Index j = n - 1;
    while (j >= 0 && ++idx[std::size_t(j)] == res.axes[std::size_t(j)].size()) {
      idx[std::size_t(j)] = 0;
      --j;
    }
    if (j < 0) break;
  }

  std::sort(found.begin(), found.end(),
            [](const SpectrumPoint& a, const SpectrumPoint& b) { return detail::coords_lex_less(a.adapted_coords, b.adapted_coords); });
  for (const auto& pt : found) {
    bool dup = false;
    for (const auto& kept : res.points) {
      dup = dup || detail::coords_dist(kept.adapted_coords, pt.adapted_coords) <= tol.eig_cluster;
    }
    if (!dup) res.points.push_back(pt);
  }
  if (res.points.empty()) {
    throw ToleranceError("joint spectrum came out empty; the spectrum of a solvable family on a nonzero "
                         "space is never empty, so a tolerance is off");
  }
  return res;
}

// Joint eigenvalue tuples of a commuting family by repeated common
// eigenvector extraction and unitary deflation.
inline std::vector<CVector> taylor_oracle(const liealg::OperatorFamily& fam, const Tolerances& tol) {
  liealg::validate_family(fam, tol);
  const Index n = fam.algebra_dim;
  const Index d = fam.space_dim;
  for (Index i = 0; i < n; ++i)
    for (Index j = i + 1; j < n; ++j) {
      const double c = liealg::commutator(fam.generators[std::size_t(i)], fam.generators[std::size_t(j)]).norm();
      if (c > tol.residual * (1.0 + fam.generators[std::size_t(i)].norm() * fam.generators[std::size_t(j)].norm())) {
        throw ClassificationError("oracle requires a commuting family; generators " + fam.labels[std::size_t(i)] +
                                  " and " + fam.labels[std::size_t(j)] + " do not commute");
      }
    }

  std::vector<CMatrix> cur = fam.generators;
  std::vector<CVector> tuples;
  for (Index dim = d; dim >= 1; --dim) {
    const CVector v = liealg::detail::rec_common_eig(cur, dim, tol, 0);
    CVector lam(n);
    for (Index t = 0; t < n; ++t) lam(t) = (v.adjoint() * (cur[std::size_t(t)] * v))(0);
    tuples.push_back(lam);
    const CMatrix u = liealg::unitary_completion(v);
    std::vector<CMatrix> nxt;
    for (const auto& m : cur) nxt.push_back((u.adjoint() * m * u).bottomRightCorner(dim - 1, dim - 1));
    cur = std::move(nxt);
  }

  double scale = 0;
  for (const auto& m : fam.generators) scale = std::max(scale, m.norm());
  const double rad = eig_radius(d, scale, tol);
  std::sort(tuples.begin(), tuples.end(), detail::coords_lex_less);
  std::vector<CVector> out;
  for (const auto& t : tuples) {
    bool dup = false;
    for (const auto& kept : out) dup = dup || detail::coords_dist(kept, t) <= rad;
    if (!dup) out.push_back(t);
  }
  return out;
}

struct ProjectionReport {
  Index j = 0;
  std::vector<CVector> ideal_points;      // Sp of the leading-j subfamily, input coordinates
  std::vector<CVector> projected_points;  // ambient Sp truncated to the first j coordinates
  double match_radius = 0;
  double max_mismatch = 0;
  bool equal = false;
};

// The projection property: truncating Sp(L, E) to an ideal's coordinates
// yields exactly Sp(ideal, E). The leading j generators must span an ideal.
inline ProjectionReport projection_check(const liealg::OperatorFamily& fam, Index j, const Tolerances& tol,
                                         double match_radius = -1.0) {
  if (j < 1 || j > fam.algebra_dim) throw DimensionError("projection_check: prefix length out of range");
  const liealg::StructureConstants sc = liealg::verify_closure(fam, tol);
  const double thresh = tol.residual * (1.0 + sc.max_abs());
  for (Index u = 0; u < fam.algebra_dim; ++u)
    for (Index i = 0; i < j; ++i) {
      const CVector co = sc.bracket_in_basis(u, i);
      for (Index h = j; h < fam.algebra_dim; ++h) {
        if (std::abs(co(h)) > thresh) {
          throw ShapeError("the first " + std::to_string(j) + " generators do not span an ideal");
        }
      }
    }

  ProjectionReport rep;
  rep.j = j;
  rep.match_radius = match_radius >= 0 ? match_radius : tol.eig_cluster;

  const SpectrumResult ambient = joint_spectrum(fam, tol);
  for (const auto& pt : ambient.points) {
    const CVector trunc = pt.input_coords.head(j);
    bool dup = false;
    for (const auto& kept : rep.projected_points) dup = dup || detail::coords_dist(kept, trunc) <= tol.eig_cluster;
    if (!dup) rep.projected_points.push_back(trunc);
  }

  liealg::OperatorFamily sub;
  sub.space_dim = fam.space_dim;
  sub.algebra_dim = j;
  for (Index t = 0; t < j; ++t) {
    sub.generators.push_back(fam.generators[std::size_t(t)]);
    sub.labels.push_back(fam.labels[std::size_t(t)]);
  }
  const SpectrumResult inner = joint_spectrum(sub, tol);
  for (const auto& pt : inner.points) rep.ideal_points.push_back(pt.input_coords);

  for (const auto& a : rep.projected_points) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& b : rep.ideal_points) best = std::min(best, detail::coords_dist(a, b));
    rep.max_mismatch = std::max(rep.max_mismatch, best);
  }
  for (const auto& b : rep.ideal_points) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& a : rep.projected_points) best = std::min(best, detail::coords_dist(a, b));
    rep.max_mismatch = std::max(rep.max_mismatch, best);
  }
  rep.equal = rep.max_mismatch <= rep.match_radius;
  return rep;
}

struct NilpotentBoundReport {
  double max_weight_abs = 0;
  bool weights_zero = false;
  std::vector<std::vector<Complex>> generator_spectra;  // per input generator
  bool inclusion_ok = false;
  double worst_inclusion_dist = 0;
  bool norm_bound_ok = false;
  double worst_norm_excess = 0;  // max of |f(x)| - ||x|| over sampled elements
  Index sampled_elements = 0;
  SpectrumResult result;
};

// For a nilpotent family: all theta weights vanish, the spectrum sits inside
// the product of the coordinate spectra, and |f(x)| <= ||x|| for every point
// f and element x (generators plus random unit-coefficient combinations).
inline NilpotentBoundReport nilpotent_bound_check(const liealg::OperatorFamily& fam, const Tolerances& tol,
                                                  double slack = 1e-8, Index n_random = 20,
                                                  std::uint64_t seed = 0x9E3779B9ULL) {
  const liealg::StructureConstants sc = liealg::verify_closure(fam, tol);
  if (liealg::classify(sc, tol) != liealg::AlgebraClass::nilpotent &&
      liealg::classify(sc, tol) != liealg::AlgebraClass::abelian) {
    throw ClassificationError("nilpotent bound check requires a nilpotent family");
  }
  NilpotentBoundReport rep;
  rep.result = joint_spectrum(fam, tol);
  const Index n = fam.algebra_dim;

  for (Index j = 1; j <= n; ++j) {
    for (const auto& [alpha, r] : weights(rep.result.flag.adapted_sc, j, tol).entries) {
      (void)alpha;
      rep.max_weight_abs = std::max(rep.max_weight_abs, std::abs(r));
    }
  }
  rep.weights_zero = rep.max_weight_abs <= std::max(1e-10, tol.residual);

  rep.inclusion_ok = true;
  for (Index t = 0; t < n; ++t) {
    const CMatrix& g = fam.generators[std::size_t(t)];
    const double rad = eig_radius(fam.space_dim, g.norm(), tol);
    rep.generator_spectra.push_back(numkit::cluster_values(numkit::eigenvalues(g), rad));
    for (const auto& pt : rep.result.points) {
      double best = std::numeric_limits<double>::infinity();
      for (const Complex& v : rep.generator_spectra.back()) best = std::min(best, std::abs(pt.input_coords(t) - v));
      rep.worst_inclusion_dist = std::max(rep.worst_inclusion_dist, best);
      rep.inclusion_ok = rep.inclusion_ok && best <= rad;
    }
  }

  rng::SplitMix rg(seed);
  std::vector<CVector> coeffs;
  for (Index t = 0; t < n; ++t) {
    CVector e = CVector::Zero(n);
    e(t) = 1;
    coeffs.push_back(e);
  }
  for (Index s = 0; s < n_random; ++s) {
    CVector u(n);
    for (Index t = 0; t < n; ++t) u(t) = rg.cbox(1.0);
    coeffs.push_back(u / u.norm());
  }
  rep.norm_bound_ok = true;
  for (const auto& u : coeffs) {
    CMatrix x = CMatrix::Zero(fam.space_dim, fam.space_dim);
    for (Index t = 0; t < n; ++t) x += u(t) * fam.generators[std::size_t(t)];
    const double nx = numkit::operator_norm(x);
    for (const auto& pt : rep.result.points) {
      Complex fx(0);
      for (Index t = 0; t < n; ++t) fx += u(t) * pt.input_coords(t);
      const double excess = std::abs(fx) - nx;
      rep.worst_norm_excess = std::max(rep.worst_norm_excess, excess);
      rep.norm_bound_ok = rep.norm_bound_ok && excess <= slack;
    }
  }
  rep.sampled_elements = Index(coeffs.size());
  return rep;
}

}  // namespace liespec::spectrum
