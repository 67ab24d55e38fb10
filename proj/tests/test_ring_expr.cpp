#include <random>

#include "doctest.h"

#include "algact/error.hpp"
#include "algact/ring_expr.hpp"

using namespace algact;

namespace {

Element pt(int x, int y = 0) {
  Element e;
  e.c[0] = x;
  e.c[1] = y;
  return e;
}

}  // namespace

TEST_SUITE("ring_expr") {
  TEST_CASE("literal translations") {
    const GroupSpec z1 = GroupSpec::free_abelian(1), z2 = GroupSpec::free_abelian(2);
    const RingElement f = parse_ring_expr("2 - u1", z1);
    CHECK(f.coeff(pt(0)) == 2.0);
    CHECK(f.coeff(pt(1)) == -1.0);

    const RingElement h = parse_ring_expr("4 - u1 - u1^-1 - u2 - u2^-1", z2);
    CHECK(h.size() == 5);
    CHECK(h.coeff(pt(0, 0)) == 4.0);
    CHECK(h.coeff(pt(-1, 0)) == -1.0);
    CHECK(h.coeff(pt(0, -1)) == -1.0);

    const RingElement m = parse_ring_expr("u1*u2 - 3*u1^2", z2);
    CHECK(m.size() == 2);
    CHECK(m.coeff(pt(1, 1)) == 1.0);
    CHECK(m.coeff(pt(2, 0)) == -3.0);

    CHECK(parse_ring_expr("(2,-1) + 1/2*e", z2).coeff(pt(2, -1)) == 1.0);
    CHECK(parse_ring_expr("1.5e-1*u1", z1).coeff(pt(1)) == doctest::Approx(0.15));
  }

  TEST_CASE("exact coefficients") {
    const GroupSpec z1 = GroupSpec::free_abelian(1);
    const ExactRingElement a = parse_ring_expr_exact("1/3 - 0.25*u1 + 007/010*u1^2", z1);
    CHECK(a.coeff(pt(0)) == Rational(1, 3));
    CHECK(a.coeff(pt(1)) == Rational(-1, 4));
    CHECK(a.coeff(pt(2)) == Rational(7, 10));
    CHECK(parse_rational("-12.5e-1") == Rational(-5, 4));
  }

  TEST_CASE("finite group names") {
    const GroupSpec s3 = GroupSpec::builtin("S3");
    const RingElement a = parse_ring_expr("(12) - 2*(123)", s3);
    CHECK(a.coeff(*s3.find_name("(12)")) == 1.0);
    CHECK(a.coeff(*s3.find_name("(123)")) == -2.0);
    const GroupSpec d4 = GroupSpec::builtin("D4");
    CHECK(parse_ring_expr("r*s", d4) == RingElement::delta(d4, d4.multiply(*d4.find_name("r"), *d4.find_name("s"))));
    const GroupSpec z6 = GroupSpec::builtin("Z/6");
    CHECK(parse_ring_expr("u1^7", z6) == RingElement::delta(z6, Element::index(1)));
  }

  TEST_CASE("matrices") {
    const GroupSpec z1 = GroupSpec::free_abelian(1);
    const RingMatrix m = parse_ring_matrix("[2 - u1, 0; u1^-1, 1]", z1);
    CHECK(m.rows() == 2);
    CHECK(m.cols() == 2);
    CHECK(m.at(1, 0).coeff(pt(-1)) == 1.0);
    CHECK(m.at(0, 1).is_zero());
    CHECK_THROWS_AS(parse_ring_matrix("1, 2; 3", z1), ParseError);
  }

  TEST_CASE("format then parse round-trips") {
    std::mt19937 rng(11);
    const GroupSpec z2 = GroupSpec::free_abelian(2);
    std::uniform_int_distribution<int> c(-3, 3);
    std::uniform_real_distribution<double> v(-5, 5);
    for (int i = 0; i < 50; ++i) {
      RingElement a(z2);
      for (int t = 0; t < 4; ++t) a.add(pt(c(rng), c(rng)), v(rng));
      CHECK(parse_ring_expr(format_ring_expr(a), z2) == a);
    }
    const GroupSpec s4 = GroupSpec::builtin("S4");
    RingElement b(s4);
    for (int g = 0; g < 24; g += 5) b.set(Element::index(g), g - 7.5);
    CHECK(parse_ring_expr(format_ring_expr(b), s4) == b);
    const GroupSpec c8 = GroupSpec::builtin("(Z/2)^3");
    RingElement d(c8);
    for (int g = 0; g < 8; ++g) d.set(Element::index(g), g + 1);
    CHECK(parse_ring_expr(format_ring_expr(d), c8) == d);
  }

  TEST_CASE("syntax errors carry the offending position") {
    const GroupSpec z1 = GroupSpec::free_abelian(1);
    try {
      parse_ring_expr("2 -- u1", z1);
      FAIL("no error");
    } catch (const ParseError& e) {
      CHECK(e.position() == 3);
      CHECK(e.caret() == "2 -- u1\n   ^");
    }
    CHECK_THROWS_AS(parse_ring_expr("u2", z1), ParseError);
    CHECK_THROWS_AS(parse_ring_expr("2 u1", z1), ParseError);
    CHECK_THROWS_AS(parse_ring_expr("1/0", z1), ParseError);
    CHECK_THROWS_AS(parse_ring_expr("(99)", GroupSpec::builtin("S3")), ParseError);
  }
}
