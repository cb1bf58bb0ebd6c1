#pragma once

// Seeded random instance construction. Every instance is built from an
// explicit normal form (so its expected structure is known), then mixed by an
// invertible change of algebra basis and conjugated by a random unitary. All
// randomness flows through the deterministic splitmix generator, so a (kind,
// d, n, seed) tuple names the same instance on every platform.

#include <cstdint>
#include <string>
#include <vector>

#include "liespec/liealg.hpp"
#include "liespec/numkit.hpp"
#include "liespec/rng.hpp"
#include "liespec/types.hpp"

namespace liespec::gen {

struct GeneratedInstance {
  liealg::OperatorFamily family;
  std::string kind;
  Index d = 0;
  Index n = 0;
  std::uint64_t seed = 0;
  std::string name;
  // known joint eigenvalue tuples in the emitted generator order; filled for
  // the abelian and commuting kinds, where the construction pins them
  std::vector<CVector> expected_joint;
};

namespace detail {

inline CMatrix random_unitary(Index d, rng::SplitMix& rg) {
  CMatrix q(d, d);
  for (Index c = 0; c < d; ++c) {
    for (int attempt = 0;; ++attempt) {
      CVector v(d);
      for (Index r = 0; r < d; ++r) v(r) = rg.cbox(1.0);
      for (Index p = 0; p < c; ++p) v -= q.col(p) * (q.col(p).adjoint() * v)(0);
      if (v.norm() > 1e-3) {
        v /= v.norm();
        for (Index p = 0; p < c; ++p) v -= q.col(p) * (q.col(p).adjoint() * v)(0);
        q.col(c) = v / v.norm();
        break;
      }
      if (attempt > 100) throw Error("random unitary draw failed to orthogonalize");
    }
  }
  return q;
}

// invertible, well-conditioned basis mix: unitary times a diagonal scaling
inline CMatrix random_mix(Index n, rng::SplitMix& rg) {
  CMatrix m = random_unitary(n, rg);
  for (Index c = 0; c < n; ++c) m.col(c) *= rg.uniform(0.7, 1.4);
  return m;
}

// complex values pairwise separated by at least `sep`
inline std::vector<Complex> separated_values(Index count, double box, double sep, rng::SplitMix& rg) {
  for (int attempt = 0; attempt < 500; ++attempt) {
    std::vector<Complex> v;
    for (Index t = 0; t < count; ++t) v.push_back(rg.cbox(box));
    bool ok = true;
    for (Index a = 0; a < count; ++a)
      for (Index b = a + 1; b < count; ++b) ok = ok && std::abs(v[std::size_t(a)] - v[std::size_t(b)]) >= sep;
    if (ok) return v;
  }
  throw Error("failed to draw separated values; box too small for the requested count");
}

inline void mix_and_conjugate(GeneratedInstance& inst, const std::vector<CMatrix>& base, rng::SplitMix& rg) {
  const Index n = inst.n;
  const Index d = inst.d;
  const CMatrix mix = random_mix(n, rg);
  const CMatrix q = random_unitary(d, rg);
  inst.family.space_dim = d;
  inst.family.algebra_dim = n;
  inst.family.generators.clear();
  inst.family.labels.clear();
  for (Index i = 0; i < n; ++i) {
    CMatrix g = CMatrix::Zero(d, d);
    for (Index t = 0; t < n; ++t) g += mix(t, i) * base[std::size_t(t)];
    inst.family.generators.push_back(q.adjoint() * g * q);
    inst.family.labels.push_back("g" + std::to_string(i + 1));
  }
  // expected tuples transform with the same basis mix
  for (auto& tup : inst.expected_joint) {
    CVector out(n);
    for (Index i = 0; i < n; ++i) {
      Complex s(0);
      for (Index t = 0; t < n; ++t) s += mix(t, i) * tup(t);
      out(i) = s;
    }
    tup = out;
  }
}

}  // namespace detail

// kinds: "abelian" (independent simultaneously diagonal generators),
// "commuting" (polynomials of one upper-triangular matrix), "solvable"
// (a diagonal generator acting on elementary last-column matrices), and
// "nilpotent" (a subdiagonal shift acting on last-column matrices).
inline GeneratedInstance generate(const std::string& kind, Index d, Index n, std::uint64_t seed) {
  if (d < 1 || n < 1) throw DimensionError("generate: need d >= 1 and n >= 1");
  GeneratedInstance inst;
  inst.kind = kind;
  inst.d = d;
  inst.n = n;
  inst.seed = seed;
  inst.name = kind + "-d" + std::to_string(d) + "-n" + std::to_string(n) + "-seed" + std::to_string(seed);
  rng::SplitMix rg(seed ^ 0xA5A5A5A5DEADBEEFULL);

  std::vector<CMatrix> base;
  if (kind == "abelian") {
    if (n > d) throw DimensionError("abelian kind requires n <= d");
    for (int attempt = 0;; ++attempt) {
      if (attempt > 200) throw Error("abelian draw failed to separate joint tuples");
      base.clear();
      inst.expected_joint.clear();
      std::vector<std::vector<Complex>> diag(static_cast<std::size_t>(n));
      for (Index t = 0; t < n; ++t) diag[std::size_t(t)] = detail::separated_values(d, 2.5, 0.4, rg);
      for (Index t = 0; t < n; ++t) {
        CMatrix m = CMatrix::Zero(d, d);
        for (Index s = 0; s < d; ++s) m(s, s) = diag[std::size_t(t)][std::size_t(s)];
        base.push_back(m);
      }
      bool ok = true;  // joint tuples must stay apart so the grid resolves them
      for (Index a = 0; a < d; ++a)
        for (Index b = a + 1; b < d; ++b) {
          double dist = 0;
          for (Index t = 0; t < n; ++t)
            dist = std::max(dist, std::abs(diag[std::size_t(t)][std::size_t(a)] - diag[std::size_t(t)][std::size_t(b)]));
          ok = ok && dist >= 0.4;
        }
      if (!ok) continue;
      for (Index s = 0; s < d; ++s) {
        CVector tup(n);
        for (Index t = 0; t < n; ++t) tup(t) = diag[std::size_t(t)][std::size_t(s)];
        inst.expected_joint.push_back(tup);
      }
      break;
    }
  } else if (kind == "commuting") {
    if (n > d) throw DimensionError("commuting kind requires n <= d");
    const std::vector<Complex> u = detail::separated_values(d, 2.0, 0.4, rg);
    CMatrix tri = CMatrix::Zero(d, d);
    for (Index r = 0; r < d; ++r) {
      tri(r, r) = u[std::size_t(r)];
      for (Index c = r + 1; c < d; ++c) tri(r, c) = rg.cbox(0.8);
    }
    for (int attempt = 0;; ++attempt) {
      if (attempt > 200) throw Error("commuting draw failed to separate joint tuples");
      base.clear();
      inst.expected_joint.clear();
      // polynomials c_1 U + ... + c_d U^d of the one triangular matrix
      std::vector<CVector> coef;
      for (Index t = 0; t < n; ++t) {
        CVector c(d);
        for (Index m = 0; m < d; ++m) c(m) = rg.cbox(1.0);
        coef.push_back(c);
      }
      std::vector<CMatrix> powers;
      powers.push_back(tri);
      for (Index m = 1; m < d; ++m) powers.push_back(powers.back() * tri);
      for (Index t = 0; t < n; ++t) {
        CMatrix g = CMatrix::Zero(d, d);
        for (Index m = 0; m < d; ++m) g += coef[std::size_t(t)](m) * powers[std::size_t(m)];
        base.push_back(g);
      }
      for (Index s = 0; s < d; ++s) {
        CVector tup(n);
        for (Index t = 0; t < n; ++t) {
          Complex val(0), pw(1);
          for (Index m = 0; m < d; ++m) {
            pw *= u[std::size_t(s)];
            val += coef[std::size_t(t)](m) * pw;
          }
          tup(t) = val;
        }
        inst.expected_joint.push_back(tup);
      }
      bool ok = true;
      for (Index a = 0; a < d; ++a)
        for (Index b = a + 1; b < d; ++b) {
          double dist = 0;
          for (Index t = 0; t < n; ++t)
            dist = std::max(dist, std::abs(inst.expected_joint[std::size_t(a)](t) - inst.expected_joint[std::size_t(b)](t)));
          ok = ok && dist >= 0.4;
        }
      // the generators must be linearly independent
      CMatrix stacked(d * d, n);
      for (Index t = 0; t < n; ++t) stacked.col(t) = liealg::vec(base[std::size_t(t)]);
      ok = ok && numkit::numerical_rank(stacked, Tolerances{}) == n;
      if (ok) break;
    }
  } else if (kind == "solvable") {
    if (n > d) throw DimensionError("solvable kind requires n <= d");
    const std::vector<Complex> v = detail::separated_values(d, 2.0, 0.4, rg);
    CMatrix dm = CMatrix::Zero(d, d);
    for (Index s = 0; s < d; ++s) dm(s, s) = v[std::size_t(s)];
    for (Index i = 0; i + 1 < n; ++i) {
      CMatrix z = CMatrix::Zero(d, d);
      z(i, d - 1) = 1.0;
      base.push_back(z);
    }
    base.push_back(dm);
  } else if (kind == "nilpotent") {
    const bool ok_dims = (n == 1 && d >= 2) || (n == 2 && d >= 3) || (n >= 3 && n <= d);
    if (!ok_dims) {
      throw DimensionError("nilpotent kind requires d >= 2 for n = 1, d >= 3 for n = 2, and n <= d for n >= 3");
    }
    if (n == 1) {
      CMatrix z = CMatrix::Zero(d, d);
      z(0, 1) = 1.0;
      base.push_back(z);
    } else if (n == 2) {
      for (Index i = 0; i < 2; ++i) {
        CMatrix z = CMatrix::Zero(d, d);
        z(i, d - 1) = 1.0;
        base.push_back(z);
      }
    } else {
      CMatrix a = CMatrix::Zero(d, d);
      for (Index i = 0; i + 2 < n; ++i) a(i + 1, i) = 1.0;
      base.push_back(a);
      for (Index i = 0; i + 1 < n; ++i) {
        CMatrix z = CMatrix::Zero(d, d);
        z(i, d - 1) = 1.0;
        base.push_back(z);
      }
    }
  } else {
    throw ParseError("unknown instance kind '" + kind + "' (want abelian, commuting, solvable, or nilpotent)");
  }

  detail::mix_and_conjugate(inst, base, rg);
  return inst;
}

}  // namespace liespec::gen
