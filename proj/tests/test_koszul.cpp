// Chain-complex layer tests: exterior bookkeeping, the derivation matrices,
// boundary assembly with frozen block goldens, split identities, homotopy.

#include <catch2/catch_amalgamated.hpp>

#include "liespec/corpus.hpp"
#include "liespec/koszul.hpp"
#include "liespec/liealg.hpp"
#include "liespec/types.hpp"

using namespace liespec;

namespace {

liealg::OperatorFamily pair_family(const CMatrix& first, const CMatrix& second, const char* l1, const char* l2) {
  liealg::OperatorFamily fam;
  fam.space_dim = first.rows();
  fam.algebra_dim = 2;
  fam.generators = {first, second};
  fam.labels = {l1, l2};
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

}  // namespace

TEST_CASE("exterior basis enumerates strictly increasing tuples in order") {
  const auto b = koszul::exterior_basis(2, 3);
  CHECK(b.tuple_count(0) == 1);
  CHECK(b.tuple_count(1) == 3);
  CHECK(b.tuple_count(2) == 3);
  CHECK(b.tuple_count(3) == 1);
  CHECK(b.block_dim(2) == 6);
  CHECK(b.total_dim() == 16);
  CHECK(b.degree_offset(2) == 8);
  const auto& deg2 = b.degrees[2];
  REQUIRE(deg2.size() == 3);
  CHECK(deg2[0].entries == std::vector<int>{1, 2});
  CHECK(deg2[1].entries == std::vector<int>{1, 3});
  CHECK(deg2[2].entries == std::vector<int>{2, 3});
  CHECK(b.tuple_pos(2, koszul::ExteriorIndex{{1, 3}}) == 1);
  CHECK(b.tuple_pos(2, koszul::ExteriorIndex{{1, 4}}) == -1);
  CHECK(deg2[0].to_string() == "(1,2)");
}

TEST_CASE("wedge normalization sorts with the permutation sign") {
  auto [a, sa] = koszul::wedge_normalize({2, 1});
  CHECK(sa == -1);
  CHECK(a.entries == std::vector<int>{1, 2});
  auto [b, sb] = koszul::wedge_normalize({1, 1});
  CHECK(sb == 0);
  auto [c, sc_] = koszul::wedge_normalize({3, 1, 2});
  CHECK(sc_ == 1);
  CHECK(c.entries == std::vector<int>{1, 2, 3});
}

TEST_CASE("the derivation matrix on the leading ideal") {
  Tolerances tol;
  const auto fam = pair_family(g2_y(), g2_x(), "y", "x");
  const auto sc = liealg::verify_closure(fam, tol);
  SECTION("degree one is the weight of the bracket action") {
    const CMatrix th = koszul::theta_wedge(sc, 2, 1, tol);
    REQUIRE(th.rows() == 1);
    CHECK(std::abs(th(0, 0) - Complex(1)) < 1e-12);  // [x, y] = 1 * y
  }
  SECTION("degree zero is the empty action") {
    const CMatrix th = koszul::theta_wedge(sc, 2, 0, tol);
    REQUIRE(th.rows() == 1);
    CHECK(std::abs(th(0, 0)) == 0.0);
  }
  SECTION("tensoring with the identity of E") {
    const auto ths = koszul::theta(fam, sc, 2, koszul::exterior_basis(2, 1), tol);
    REQUIRE(ths.size() == 2);
    CHECK(ths[0].norm() == 0.0);
    CHECK((ths[1] - CMatrix::Identity(2, 2)).norm() < 1e-12);
  }
  SECTION("a family out of flag order is rejected") {
    const auto bad = pair_family(g2_x(), g2_y(), "x", "y");
    const auto bsc = liealg::verify_closure(bad, tol);
    CHECK_THROWS_AS(koszul::theta_wedge(bsc, 2, 1, tol), ShapeError);
  }
}

TEST_CASE("character admissibility is enforced") {
  Tolerances tol;
  const auto fam = pair_family(g2_y(), g2_x(), "y", "x");
  const auto sc = liealg::verify_closure(fam, tol);
  CVector bad(2);
  bad << Complex(0.3), Complex(0.0);
  CHECK_THROWS_AS(koszul::require_character(sc, bad, tol), CharacterError);
  CVector good(2);
  good << Complex(0.0), Complex(1.7, 0.4);
  CHECK_NOTHROW(koszul::require_character(sc, good, tol));
  CHECK_THROWS_AS(koszul::require_character(sc, CVector::Zero(3), tol), DimensionError);
}

TEST_CASE("boundary maps of the solvable pair match hand-expanded blocks") {
  Tolerances tol;
  const auto fam = pair_family(g2_y(), g2_x(), "y", "x");
  const auto sc = liealg::verify_closure(fam, tol);
  CVector f(2);
  f << Complex(0.0), Complex(0.5);
  const auto bf = koszul::boundary(fam, sc, f, tol);
  REQUIRE(bf.maps.size() == 3);
  REQUIRE(bf.maps[1].rows() == 2);
  REQUIRE(bf.maps[1].cols() == 4);
  REQUIRE(bf.maps[2].rows() == 4);
  REQUIRE(bf.maps[2].cols() == 2);

  const CMatrix id = CMatrix::Identity(2, 2);
  // degree one: [ y | x - 0.5 ]
  CHECK((bf.maps[1].block(0, 0, 2, 2) - g2_y()).norm() < 1e-12);
  CHECK((bf.maps[1].block(0, 2, 2, 2) - (g2_x() - 0.5 * id)).norm() < 1e-12);
  // degree two: top block -(x - 0.5) + 1 from the bracket term, bottom block y
  CHECK((bf.maps[2].block(0, 0, 2, 2) - (-g2_x() + 1.5 * id)).norm() < 1e-12);
  CHECK((bf.maps[2].block(2, 0, 2, 2) - g2_y()).norm() < 1e-12);
  // consecutive maps compose to zero
  CHECK((bf.maps[1] * bf.maps[2]).norm() < 1e-12);
  CHECK(bf.from_degree(2).cols() == 2);
  CHECK(bf.into_degree(2).cols() == 0);
  CHECK((bf.into_degree(0) - bf.maps[1]).norm() == 0.0);
}

TEST_CASE("the last-generator operator in both degrees") {
  Tolerances tol;
  const auto fam = pair_family(g2_y(), g2_x(), "y", "x");
  const auto sc = liealg::verify_closure(fam, tol);
  CVector f(2);
  f << Complex(0.0), Complex(0.25);
  const CMatrix id = CMatrix::Identity(2, 2);
  CHECK((koszul::lp_operator(fam, sc, f, 0, tol) - (g2_x() - 0.25 * id)).norm() < 1e-12);
  CHECK((koszul::lp_operator(fam, sc, f, 1, tol) - (g2_x() - 1.25 * id)).norm() < 1e-12);
  CHECK_THROWS_AS(koszul::lp_operator(fam, sc, f, 2, tol), DimensionError);
}

TEST_CASE("selection and wedge embeddings are isometric and land where expected") {
  const auto full = koszul::exterior_basis(2, 2);
  const CMatrix e0 = koszul::embed_no_last(full, 1);
  REQUIRE(e0.rows() == 4);
  REQUIRE(e0.cols() == 2);
  CHECK((e0.topRows(2) - CMatrix::Identity(2, 2)).norm() == 0.0);
  CHECK(e0.bottomRows(2).norm() == 0.0);
  const CMatrix e1 = koszul::embed_wedge_last(full, 1);
  REQUIRE(e1.rows() == 4);
  REQUIRE(e1.cols() == 2);
  CHECK(e1.topRows(2).norm() == 0.0);
  CHECK((e1.bottomRows(2) - CMatrix::Identity(2, 2)).norm() == 0.0);
  const CMatrix e2 = koszul::embed_wedge_last(full, 2);
  CHECK((e2 - CMatrix::Identity(2, 2)).norm() == 0.0);
  CHECK(((e0.adjoint() * e0) - CMatrix::Identity(2, 2)).norm() == 0.0);
  CHECK((e0.adjoint() * e1).norm() == 0.0);
}

TEST_CASE("split identities hold across the embedded corpus") {
  Tolerances tol;
  for (const char* name : {"g2", "heisenberg", "abelian_diag", "commuting_diag"}) {
    const auto inst = corpus::load(name);
    const auto sc = liealg::verify_closure(inst.family, tol);
    const auto flag = liealg::jordan_holder_flag(inst.family, sc, tol);
    const auto asc = liealg::verify_closure(flag.adapted, tol);
    CVector f = CVector::Zero(flag.adapted.algebra_dim);
    for (Index t = flag.k; t < flag.adapted.algebra_dim; ++t) f(t) = Complex(0.37 * double(t + 1), 0.11);
    const auto rep = koszul::split_check(flag.adapted, asc, f, tol);
    INFO(name);
    CHECK(rep.max_residual < 1e-10);
  }
}

TEST_CASE("homotopy inverts the complex away from the component spectrum") {
  Tolerances tol;
  const auto fam = pair_family(g2_y(), g2_x(), "y", "x");
  const auto sc = liealg::verify_closure(fam, tol);
  SECTION("far from the spectrum the residuals vanish") {
    CVector f(2);
    f << Complex(0.0), Complex(5.0);
    const auto hf = koszul::homotopy(fam, sc, f, tol);
    REQUIRE(hf.maps.size() == 2);
    CHECK(hf.ok);
    CHECK(hf.max_identity_residual < 1e-10);
    CHECK(hf.max_intertwine_residual < 1e-10);
    REQUIRE(hf.identity_residual.size() == 3);
    REQUIRE(hf.intertwine_residual.size() == 1);
  }
  SECTION("on the component spectrum the family is refused") {
    CVector f(2);
    f << Complex(0.0), Complex(0.5);
    try {
      koszul::homotopy(fam, sc, f, tol);
      FAIL("expected the homotopy to be refused");
    } catch (const HomotopyNotApplicable& e) {
      CHECK_FALSE(e.singular_degrees.empty());
    }
  }
}

TEST_CASE("homotopy for a single operator reduces to the resolvent") {
  Tolerances tol;
  liealg::OperatorFamily fam;
  fam.space_dim = 2;
  fam.algebra_dim = 1;
  CMatrix a = CMatrix::Zero(2, 2);
  a(0, 0) = 1;
  a(1, 1) = 2;
  fam.generators = {a};
  fam.labels = {"a"};
  const auto sc = liealg::verify_closure(fam, tol);
  CVector far(1), on(1);
  far << Complex(3.0);
  on << Complex(1.0);
  const auto hf = koszul::homotopy(fam, sc, far, tol);
  CHECK(hf.ok);
  CHECK(hf.max_identity_residual < 1e-12);
  CHECK_THROWS_AS(koszul::homotopy(fam, sc, on, tol), HomotopyNotApplicable);
}
