// Lie-algebra layer tests: brackets, closure, series, classification, common
// eigenvectors, and the adapted flag construction.

#include <catch2/catch_amalgamated.hpp>

#include "liespec/corpus.hpp"
#include "liespec/generate.hpp"
#include "liespec/liealg.hpp"
#include "liespec/numkit.hpp"
#include "liespec/types.hpp"

using namespace liespec;

namespace {

liealg::OperatorFamily family_of(std::initializer_list<std::pair<const char*, CMatrix>> gens) {
  liealg::OperatorFamily fam;
  for (const auto& [label, m] : gens) {
    fam.space_dim = m.rows();
    fam.generators.push_back(m);
    fam.labels.push_back(label);
  }
  fam.algebra_dim = Index(fam.generators.size());
  return fam;
}

CMatrix g2_y() {
  CMatrix y(2, 2);
  y << Complex(1), Complex(1), Complex(-1), Complex(-1);
  return y;
}

CMatrix g2_x() {
  CMatrix x(2, 2);
  x << Complex(0.5), Complex(1), Complex(0), Complex(-0.5);
  return x;
}

CMatrix unit(Index d, Index r, Index c) {
  CMatrix m = CMatrix::Zero(d, d);
  m(r, c) = 1.0;
  return m;
}

}  // namespace

TEST_CASE("the bracket is the opposite-order commutator") {
  // the two-dimensional solvable relation [x, y] = y
  CHECK((liealg::commutator(g2_x(), g2_y()) - g2_y()).norm() < 1e-14);
  CHECK(liealg::commutator(g2_x(), g2_x()).norm() == 0.0);
  CHECK_THROWS_AS(liealg::commutator(CMatrix::Zero(2, 2), CMatrix::Zero(3, 3)), DimensionError);
}

TEST_CASE("vec and unvec are mutually inverse") {
  CMatrix m(2, 2);
  m << Complex(1, 2), Complex(3), Complex(4), Complex(5, -1);
  CHECK((liealg::unvec(liealg::vec(m), 2, 2) - m).norm() == 0.0);
}

TEST_CASE("dependent generators are rejected rather than reduced") {
  const auto fam = family_of({{"y", g2_y()}, {"y2", 2.0 * g2_y()}});
  CHECK_THROWS_AS(liealg::validate_family(fam, Tolerances{}), DegenerateBasisError);
}

TEST_CASE("closure produces the expected structure constants") {
  Tolerances tol;
  SECTION("the [x, y] = y pair") {
    const auto fam = family_of({{"y", g2_y()}, {"x", g2_x()}});
    const auto sc = liealg::verify_closure(fam, tol);
    // coefficient of y in [y, x] is -1, so [x, y] = +y
    CHECK(std::abs(sc.bracket_in_basis(1, 0)(0) - Complex(1)) < 1e-12);
    CHECK(std::abs(sc.bracket_in_basis(0, 1)(0) + Complex(1)) < 1e-12);
    CHECK(std::abs(sc.bracket_in_basis(0, 1)(1)) < 1e-12);
    CHECK(liealg::jacobi_residual(sc) < 1e-12);
  }
  SECTION("the Heisenberg triple in order (p, q, z)") {
    const auto inst = corpus::load("heisenberg");
    const auto sc = liealg::verify_closure(inst.family, tol);
    CHECK(std::abs(sc.bracket_in_basis(0, 1)(2) - Complex(1)) < 1e-12);  // [p, q] = z
    CHECK(sc.bracket_in_basis(0, 2).norm() < 1e-12);                     // [p, z] = 0
    CHECK(sc.bracket_in_basis(1, 2).norm() < 1e-12);                     // [q, z] = 0
    CHECK(liealg::jacobi_residual(sc) < 1e-12);
  }
  SECTION("a family that does not close is rejected with the pair named") {
    const auto fam = family_of({{"e", unit(2, 0, 1)}, {"f", unit(2, 1, 0)}});
    CHECK_THROWS_AS(liealg::verify_closure(fam, tol), NotClosedError);
  }
}

TEST_CASE("coordinate bracket matches the tensor") {
  Tolerances tol;
  const auto inst = corpus::load("heisenberg");
  const auto sc = liealg::verify_closure(inst.family, tol);
  CVector u = CVector::Zero(3), v = CVector::Zero(3);
  u(0) = 2.0;  // 2p
  v(1) = 3.0;  // 3q
  const CVector w = liealg::coordinate_bracket(sc, u, v);
  CHECK(std::abs(w(2) - Complex(6)) < 1e-12);  // [2p, 3q] = 6z
}

TEST_CASE("derived and lower central series have the known dimensions") {
  Tolerances tol;
  SECTION("[x, y] = y: derived dies, lower central stalls") {
    const auto sc = liealg::verify_closure(family_of({{"y", g2_y()}, {"x", g2_x()}}), tol);
    CHECK(liealg::derived_series(sc, tol).dims == std::vector<Index>{2, 1, 0});
    const auto lcs = liealg::lower_central_series(sc, tol);
    CHECK(lcs.dims == std::vector<Index>{2, 1, 1});
    CHECK_FALSE(lcs.reaches_zero);
  }
  SECTION("Heisenberg: both series die") {
    const auto sc = liealg::verify_closure(corpus::load("heisenberg").family, tol);
    CHECK(liealg::derived_series(sc, tol).dims == std::vector<Index>{3, 1, 0});
    CHECK(liealg::lower_central_series(sc, tol).dims == std::vector<Index>{3, 1, 0});
  }
}

TEST_CASE("classification distinguishes the four classes") {
  Tolerances tol;
  auto cls = [&](const liealg::OperatorFamily& fam) {
    return liealg::classify(liealg::verify_closure(fam, tol), tol);
  };
  CHECK(cls(family_of({{"y", g2_y()}, {"x", g2_x()}})) == liealg::AlgebraClass::solvable);
  CHECK(cls(corpus::load("heisenberg").family) == liealg::AlgebraClass::nilpotent);
  CHECK(cls(corpus::load("abelian_diag").family) == liealg::AlgebraClass::abelian);
  CHECK(cls(corpus::load("sl2").family) == liealg::AlgebraClass::non_solvable);

  // class is invariant under unitary conjugation
  rng::SplitMix rg(99);
  CMatrix q = CMatrix::Identity(2, 2);
  {
    CVector v(2);
    v << rg.cbox(1.0), rg.cbox(1.0);
    v /= v.norm();
    CVector w = v;
    w(0) -= 1.0;
    w /= w.norm();
    q -= 2.0 * (w * w.adjoint());
  }
  auto fam = family_of({{"y", q.adjoint() * g2_y() * q}, {"x", q.adjoint() * g2_x() * q}});
  CHECK(cls(fam) == liealg::AlgebraClass::solvable);
}

TEST_CASE("phase normalization pins a canonical representative") {
  CVector v(2);
  v << Complex(0), Complex(0, -2);
  liealg::normalize_phase(v);
  CHECK(std::abs(v(0)) < 1e-15);
  CHECK(std::abs(v(1) - Complex(1)) < 1e-15);
}

TEST_CASE("unitary completion embeds the vector as first column") {
  rng::SplitMix rg(5);
  CVector v(4);
  for (Index t = 0; t < 4; ++t) v(t) = rg.cbox(1.0);
  v /= v.norm();
  const CMatrix u = liealg::unitary_completion(v);
  CHECK((u.col(0) - v).norm() < 1e-12);
  CHECK((u.adjoint() * u - CMatrix::Identity(4, 4)).norm() < 1e-12);
}

TEST_CASE("common eigenvector of the solvable pair matches the known direction") {
  Tolerances tol;
  const auto fam = family_of({{"y", g2_y()}, {"x", g2_x()}});
  const auto sc = liealg::verify_closure(fam, tol);
  const auto we = liealg::common_eigenvector(fam.generators, sc, tol);
  CVector expect(2);
  expect << Complex(1 / std::sqrt(2.0)), Complex(-1 / std::sqrt(2.0));
  CHECK((we.vector - expect).norm() < 1e-7);
  REQUIRE(we.weights.size() == 2);
  CHECK(std::abs(we.weights[0]) < 1e-7);
  CHECK(std::abs(we.weights[1] - Complex(-0.5)) < 1e-7);
  for (std::size_t t = 0; t < 2; ++t) {
    const CMatrix& m = fam.generators[t];
    CHECK((m * we.vector - we.weights[t] * we.vector).norm() <= tol.residual * m.norm());
  }
}

TEST_CASE("common eigenvector of a diagonal pair lands on a shared axis") {
  Tolerances tol;
  CMatrix a = CMatrix::Zero(2, 2), b = CMatrix::Zero(2, 2);
  a(0, 0) = 1;
  a(1, 1) = 2;
  b(0, 0) = 3;
  b(1, 1) = 4;
  const auto fam = family_of({{"a", a}, {"b", b}});
  const auto sc = liealg::verify_closure(fam, tol);
  const auto we = liealg::common_eigenvector(fam.generators, sc, tol);
  const bool first = std::abs(we.weights[0] - Complex(1)) < 1e-9 && std::abs(we.weights[1] - Complex(3)) < 1e-9;
  const bool second = std::abs(we.weights[0] - Complex(2)) < 1e-9 && std::abs(we.weights[1] - Complex(4)) < 1e-9;
  CHECK((first || second));
}

TEST_CASE("common eigenvector refuses non-solvable families") {
  Tolerances tol;
  const auto inst = corpus::load("sl2");
  const auto sc = liealg::verify_closure(inst.family, tol);
  CHECK_THROWS_AS(liealg::common_eigenvector(inst.family.generators, sc, tol), ClassificationError);
}

TEST_CASE("the adapted flag of the already-adapted pair is the identity") {
  Tolerances tol;
  const auto fam = family_of({{"y", g2_y()}, {"x", g2_x()}});
  const auto sc = liealg::verify_closure(fam, tol);
  const auto flag = liealg::jordan_holder_flag(fam, sc, tol);
  CHECK(flag.k == 1);
  CHECK((flag.change_of_basis - CMatrix::Identity(2, 2)).norm() < 1e-9);
  CHECK(flag.ideal_dims == std::vector<Index>{0, 1, 2});
  CHECK_FALSE(flag.nilpotent_shape);
}

TEST_CASE("the flag pulls the bracket image to the front on shuffled input") {
  Tolerances tol;
  // Heisenberg entered as (q, z, p): the derived span {z} must come first
  const auto h = corpus::load("heisenberg").family;
  const auto fam = family_of({{"q", h.generators[1]}, {"z", h.generators[2]}, {"p", h.generators[0]}});
  const auto sc = liealg::verify_closure(fam, tol);
  const auto flag = liealg::jordan_holder_flag(fam, sc, tol);
  CHECK(flag.k == 1);
  CHECK(std::abs(flag.change_of_basis(1, 0)) > 1.0 - 1e-9);  // first adapted generator is z
  CHECK(flag.nilpotent_shape);
  CHECK((flag.change_of_basis.adjoint() * flag.change_of_basis - CMatrix::Identity(3, 3)).norm() < 1e-9);
}

TEST_CASE("the flag adapts randomly mixed solvable families") {
  Tolerances tol;
  const auto inst = gen::generate("solvable", 4, 3, 7);
  const auto sc = liealg::verify_closure(inst.family, tol);
  const auto flag = liealg::jordan_holder_flag(inst.family, sc, tol);
  CHECK(flag.k == 2);
  CHECK((flag.change_of_basis.adjoint() * flag.change_of_basis - CMatrix::Identity(3, 3)).norm() < 1e-8);
  // adapted generators really are the basis change applied to the input
  for (Index i = 0; i < 3; ++i) {
    CMatrix g = CMatrix::Zero(4, 4);
    for (Index t = 0; t < 3; ++t) g += flag.change_of_basis(t, i) * inst.family.generators[std::size_t(t)];
    CHECK((g - flag.adapted.generators[std::size_t(i)]).norm() < 1e-10);
  }
  CHECK_FALSE(flag.nilpotent_shape);
}

TEST_CASE("generated instances are deterministic in the seed") {
  const auto a = gen::generate("solvable", 4, 3, 123);
  const auto b = gen::generate("solvable", 4, 3, 123);
  REQUIRE(a.family.generators.size() == b.family.generators.size());
  for (std::size_t t = 0; t < a.family.generators.size(); ++t) {
    CHECK((a.family.generators[t] - b.family.generators[t]).norm() == 0.0);
  }
  const auto c = gen::generate("solvable", 4, 3, 124);
  CHECK((a.family.generators[0] - c.family.generators[0]).norm() > 1e-6);
}

TEST_CASE("generated kinds classify as requested") {
  Tolerances tol;
  auto cls = [&](const liealg::OperatorFamily& fam) {
    return liealg::classify(liealg::verify_closure(fam, tol), tol);
  };
  CHECK(cls(gen::generate("abelian", 3, 2, 11).family) == liealg::AlgebraClass::abelian);
  CHECK(cls(gen::generate("commuting", 4, 2, 12).family) == liealg::AlgebraClass::abelian);
  CHECK(cls(gen::generate("nilpotent", 4, 3, 13).family) == liealg::AlgebraClass::nilpotent);
  CHECK(cls(gen::generate("solvable", 4, 3, 14).family) == liealg::AlgebraClass::solvable);
  CHECK(gen::generate("abelian", 3, 2, 15).expected_joint.size() == 3);
  CHECK_THROWS_AS(gen::generate("abelian", 2, 3, 16), DimensionError);
  CHECK_THROWS_AS(gen::generate("unknown", 3, 2, 17), ParseError);
}
