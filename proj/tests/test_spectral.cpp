#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include <Eigen/Dense>

#include "doctest.h"

#include "algact/ring_expr.hpp"
#include "algact/spectral.hpp"

using namespace algact;

namespace {

constexpr double kPi = std::numbers::pi;
const GroupSpec kZ1 = GroupSpec::free_abelian(1);
const GroupSpec kZ2 = GroupSpec::free_abelian(2);

Element pt(int x, int y = 0) {
  Element e;
  e.c[0] = x;
  e.c[1] = y;
  return e;
}

RingMatrix mat(const char* text, const GroupSpec& spec = kZ1) { return parse_ring_matrix(text, spec); }

VectorOverG delta_vec(const GroupSpec& spec, int n = 1) {
  VectorOverG v(spec, n);
  v[0] = RingElement::delta(spec, spec.identity());
  return v;
}

VectorOverG vec_of(const RingElement& a) {
  VectorOverG v(a.spec(), 1);
  v[0] = a;
  return v;
}

// Trigonometric polynomial evaluated term by term.
std::complex<double> symbol_at(const RingElement& f, double t1, double t2 = 0.0) {
  std::complex<double> s = 0.0;
  for (const auto& [g, c] : f.terms()) s += c * std::exp(std::complex<double>(0, 2 * kPi * (g.c[0] * t1 + g.c[1] * t2)));
  return s;
}

double vec_diff(const VectorOverG& a, const VectorOverG& b) {
  VectorOverG d = a;
  d -= b;
  return l2_norm(d);
}

}  // namespace

TEST_SUITE("spectral") {
  TEST_CASE("symbols against direct evaluation") {
    const RingMatrix f = mat("2 - u1");
    const SymbolGrid g = build_symbol(f, 64);
    REQUIRE(g.points() == 64);
    double lo = 10, hi = 0;
    for (std::size_t p = 0; p < g.points(); ++p) {
      const double t = g.multi_index(p)[0] / 64.0;
      CHECK(std::abs(g.values[p](0, 0) - (2.0 - std::exp(std::complex<double>(0, 2 * kPi * t)))) < 1e-13);
      lo = std::min(lo, std::abs(g.values[p](0, 0)));
      hi = std::max(hi, std::abs(g.values[p](0, 0)));
    }
    CHECK(lo == doctest::Approx(1.0));
    CHECK(hi == doctest::Approx(3.0));

    const SymbolGrid one = build_symbol(mat("1"), 16);
    for (const auto& v : one.values) CHECK(std::abs(v(0, 0) - 1.0) < 1e-15);

    const SymbolGrid h = build_symbol(mat("4 - u1 - u1^-1 - u2 - u2^-1", kZ2), 32);
    int zeros = 0;
    for (std::size_t p = 0; p < h.points(); ++p) {
      const auto ix = h.multi_index(p);
      const double want = 4 - 2 * std::cos(2 * kPi * ix[0] / 32.0) - 2 * std::cos(2 * kPi * ix[1] / 32.0);
      CHECK(std::abs(h.values[p](0, 0) - want) < 1e-12);
      zeros += std::abs(h.values[p](0, 0)) < 1e-12;
    }
    CHECK(zeros == 1);
    CHECK_THROWS_AS(build_symbol(mat("u1^9"), 16), DomainError);
  }

  TEST_CASE("convolution theorem on random pairs") {
    std::mt19937 rng(21);
    std::uniform_int_distribution<int> c(-2, 2);
    for (int trial = 0; trial < 5; ++trial) {
      RingMatrix a(kZ2, 2, 2), b(kZ2, 2, 2);
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
          for (int t = 0; t < 3; ++t) {
            a.at(i, j).add(pt(c(rng), c(rng)), c(rng));
            b.at(i, j).add(pt(c(rng), c(rng)), c(rng));
          }
      const SymbolGrid sa = build_symbol(a, 16), sb = build_symbol(b, 16), sab = build_symbol(mat_product(a, b), 16);
      for (std::size_t p = 0; p < sa.points(); ++p) CHECK((sa.values[p] * sb.values[p] - sab.values[p]).norm() < 1e-10);
    }
  }

  TEST_CASE("injectivity reports") {
    const auto a = injectivity_report(mat("2 - u1"), 2048);
    CHECK(a.min_singular == doctest::Approx(1.0));
    CHECK(a.zero_fraction == 0.0);
    CHECK(a.injective);
    const auto b = injectivity_report(mat("1 - u1"), 2048);
    CHECK(b.min_singular < 1e-9);
    CHECK(b.zero_fraction < 1e-3);
    CHECK(b.zero_fraction_refined <= b.zero_fraction);
    CHECK(b.injective);
    const auto z = injectivity_report(mat("0"), 64);
    CHECK_FALSE(z.injective);
    const auto fin = injectivity_report(parse_ring_matrix("1 - u1", GroupSpec::builtin("Z/6")), 0);
    CHECK(fin.kernel_dim == 1);
    CHECK_FALSE(fin.injective);
  }

  TEST_CASE("formal inverse of 2 - u1 is the geometric series") {
    const FormalInverse fi = l2_formal_inverse(mat("2 - u1"), 2048, 512);
    for (int n = -20; n <= 60; ++n) {
      const double want = n >= 0 ? std::ldexp(1.0, -(n + 1)) : 0.0;
      CHECK(std::abs(fi.xi.at(0, 0).coeff(pt(n)) - want) < 1e-14);
    }
    CHECK(fi.residual < 1e-12);
    const FormalInverse id = l2_formal_inverse(mat("1"), 64);
    CHECK(l2_norm(id.xi - mat("1")) < 1e-14);
    CHECK_THROWS_AS(l2_formal_inverse(mat("1 - u1"), 2048), DomainError);
  }

  TEST_CASE("formal inverse of 3 - u1 - u1^-1 decays like r^|n|") {
    const double r = (3 - std::sqrt(5.0)) / 2, c = 1 / std::sqrt(5.0);
    const FormalInverse fi = l2_formal_inverse(mat("3 - u1 - u1^-1"), 2048, 64);
    for (int n = -30; n <= 30; ++n) CHECK(std::abs(fi.xi.at(0, 0).coeff(pt(n)) - c * std::pow(r, std::abs(n))) < 1e-12);
    CHECK(fi.residual < 1e-12);
    const FormalInverse auto_w = l2_formal_inverse(mat("3 - u1 - u1^-1"), 2048);
    CHECK(auto_w.truncation_mass <= kWindowMassFraction);
    CHECK(std::abs(auto_w.xi.at(0, 0).coeff(pt(auto_w.window)) - c * std::pow(r, auto_w.window)) < 1e-12);
    CHECK(auto_w.xi.at(0, 0).coeff(pt(auto_w.window + 1)) == 0.0);
  }

  TEST_CASE("approximate inverses of 2 - u1 are exact for k >= 2") {
    const SpectralCalculus calc(mat("2 - u1"), 2048);
    for (double k : {2.0, 4.0, 64.0, 256.0}) {
      const ApproxInverse ai = calc.approximate_inverse(k, 512);
      CHECK(ai.residual_left < 1e-8);
      CHECK(ai.residual_left_truncated < 1e-8);
      CHECK(ai.op_norm_bound <= 1 + 1e-6);
    }
  }

  TEST_CASE("approximate inverses of 1 - u1 follow 1/(pi k)") {
    const SpectralCalculus calc(mat("1 - u1"), 2048);
    double prev = 1e9;
    for (double k = 4; k <= 256; k *= 2) {
      const ApproxInverse ai = calc.approximate_inverse(k, std::nullopt, false);
      // Grid quadrature of the indicator {2 |sin pi theta| < 1/k}.
      int below = 0;
      for (int j = 0; j < 2048; ++j) below += 2 * std::abs(std::sin(kPi * j / 2048.0)) < 1 / k * (1 - 1e-12);
      CHECK(ai.residual_left * ai.residual_left == doctest::Approx(below / 2048.0).epsilon(1e-9));
      CHECK(std::abs(ai.residual_left * ai.residual_left * kPi * k - 1) <= 0.2);
      CHECK(ai.op_norm_bound <= 1 + 1e-6);
      CHECK(ai.residual_left <= prev + 1e-6);
      prev = ai.residual_left;
    }
  }

  TEST_CASE("finite backend: exact inverse of 2 - u1 on Z/8 by direct solve") {
    const GroupSpec z8 = GroupSpec::builtin("Z/8");
    const RingMatrix f = parse_ring_matrix("2 - u1", z8);
    // Circulant system (f * x)(g) = delta_0(g).
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(8, 8);
    for (int g = 0; g < 8; ++g) {
      A(g, g) += 2;
      A((g + 1) % 8, g) -= 1;
    }
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(8);
    rhs(0) = 1;
    const Eigen::VectorXd x = A.fullPivLu().solve(rhs);
    const SpectralCalculus calc(f, 0);
    CHECK(calc.min_singular() == doctest::Approx(1.0));
    const ApproxInverse ai = calc.approximate_inverse(1.0);
    for (int g = 0; g < 8; ++g) CHECK(std::abs(ai.xi.at(0, 0).coeff(Element::index(g)) - x(g)) < 1e-12);
    CHECK(ai.residual_left < 1e-12);
  }

  TEST_CASE("finite backend agrees with the Z backend on Z/L") {
    const int L = 16;
    const GroupSpec zl = GroupSpec::builtin("Z/16");
    for (const char* text : {"2 - u1", "1 - u1", "3 - u1 - u1^-1"}) {
      CAPTURE(text);
      const SpectralCalculus a(mat(text), L), b(parse_ring_matrix(text, zl), 0);
      for (double k : {2.0, 4.0}) {
        const ApproxInverse x = a.approximate_inverse(k, 7, false), y = b.approximate_inverse(k);
        for (int n = -7; n <= 7; ++n)
          CHECK(std::abs(x.xi.at(0, 0).coeff(pt(n)) - y.xi.at(0, 0).coeff(Element::index((n + L) % L))) < 1e-10);
      }
    }
  }

  TEST_CASE("explicit windows that drop too much mass") {
    const SpectralCalculus calc(mat("1 - u1"), 2048);
    CHECK_THROWS_AS(calc.approximate_inverse(64, 2), WindowTooSmall);
    const ApproxInverse ai = calc.approximate_inverse(64, 2, false);
    CHECK(ai.truncation_mass > kWindowMassFraction);
  }

  TEST_CASE("membership norms") {
    const SpectralCalculus harm(mat("1 - u1"), 2048);
    const auto rows = membership_divergence(harm, delta_vec(kZ1), {4, 16, 64, 256});
    for (const auto& r : rows) {
      double want = 0.0;
      for (int j = 0; j < 2048; ++j) {
        const double a = 2 * std::abs(std::sin(kPi * j / 2048.0));
        if (a >= 1 / r.k * (1 - 1e-12)) want += 1 / (a * a);
      }
      CHECK(r.norm == doctest::Approx(std::sqrt(want / 2048.0)).epsilon(1e-9));
    }
    CHECK(rows.back().norm / rows.front().norm > 5);

    const SpectralCalculus inv(mat("2 - u1"), 2048);
    CHECK(membership_divergence(inv, delta_vec(kZ1), {256}).front().norm == doctest::Approx(1 / std::sqrt(3.0)));
    CHECK(membership_divergence(inv, vec_of(parse_ring_expr("2 - u1", kZ1)), {256}).front().norm ==
          doctest::Approx(1.0));
  }

  TEST_CASE("apply agrees with the windowed inverse and with Parseval") {
    const SpectralCalculus calc(mat("3 - u1 - u1^-1"), 2048);
    const VectorOverG a = vec_of(parse_ring_expr("u1^2 - 2*u1^-3 + 5", kZ1));
    const ApproxInverse ai = calc.approximate_inverse(100, 200);
    CHECK(vec_diff(calc.apply(100, a), right_apply(ai.xi, a)) < 1e-10);
    CHECK(calc.apply_norm(100, a) == doctest::Approx(l2_norm(calc.apply(100, a, 0.0))).epsilon(1e-12));
  }

  TEST_CASE("ideal-test limits: r(f) r(xi_k) and r(xi_k) r(f) tend to the identity") {
    const RingMatrix f = mat("1 - u1");
    const SpectralCalculus calc(f, 2048);
    std::mt19937 rng(5);
    std::uniform_int_distribution<int> c(-3, 3);
    for (int trial = 0; trial < 3; ++trial) {
      RingElement z(kZ1);
      for (int t = 0; t < 4; ++t) z.add(pt(c(rng)), c(rng));
      const VectorOverG zeta = vec_of(z);
      double prev_r = 1e9, prev_l = 1e9;
      for (double k = 2; k <= 256; k *= 2) {
        const double right = vec_diff(calc.apply(k, right_apply(f, zeta), 0.0), zeta);
        const double left = vec_diff(right_apply(f, calc.apply(k, zeta, 0.0)), zeta);
        CHECK(right <= prev_r + 1e-6);
        CHECK(left <= prev_l + 1e-6);
        prev_r = right;
        prev_l = left;
      }
      CHECK(prev_r < 0.25 * l2_norm(zeta));
    }
  }

  TEST_CASE("matrix-valued f: pseudo-inverse of a rank-deficient symbol") {
    const RingMatrix f = mat("[1, 1]");
    const SpectralCalculus calc(f, 64);
    const ApproxInverse ai = calc.approximate_inverse(std::numeric_limits<double>::infinity());
    REQUIRE(ai.xi.rows() == 2);
    REQUIRE(ai.xi.cols() == 1);
    CHECK(ai.xi.at(0, 0).coeff(pt(0)) == doctest::Approx(0.5));
    CHECK(ai.xi.at(1, 0).coeff(pt(0)) == doctest::Approx(0.5));
    CHECK(ai.residual_right < 1e-12);
  }
}
