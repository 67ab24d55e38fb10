#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "doctest.h"

#include "algact/ring_expr.hpp"
#include "algact/parallel.hpp"
#include "algact/spectral.hpp"
#include "algact/theta.hpp"

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

VectorOverG vec(const char* text, const GroupSpec& spec = kZ1) { return as_vector(parse_ring_matrix(text, spec)); }

// Dyadic coefficients in [-2, 2] on a small box.
RingMatrix random_dyadic(const GroupSpec& spec, std::mt19937& rng, int m, int k) {
  std::uniform_int_distribution<int> c(-2, 2), num(-16, 16);
  RingMatrix xi(spec, m, k);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < k; ++j)
      for (int t = 0; t < 3; ++t) {
        Element g;
        for (int d = 0; d < spec.rank(); ++d) g.c[d] = c(rng);
        xi.at(i, j).add(g, num(rng) / 8.0);
      }
  return xi;
}

InputField integer_field(const GroupSpec& spec, std::mt19937& rng, int radius, int k) {
  std::uniform_int_distribution<int> v(-3, 3);
  InputField x;
  for (const auto& h : enumerate_ball(spec, radius)) {
    std::vector<double> vals(k);
    for (double& a : vals) a = v(rng);
    x.emplace(h, std::move(vals));
  }
  return x;
}

}  // namespace

TEST_SUITE("theta") {
  TEST_CASE("psi on simple inputs") {
    const ThetaPlan id(RingMatrix::identity(kZ1, 1), BaseMeasure::uniform_int(1), {pt(0)});
    CHECK(psi_eval(id, {{pt(0), {5.0}}}) == std::vector<double>{5.0});
    const ThetaPlan half(parse_ring_matrix("1/2", kZ1), BaseMeasure::uniform_int(1), {pt(0)});
    CHECK(psi_eval(half, {{pt(0), {3.0}}}) == std::vector<double>{1.5});
    CHECK_THROWS_AS(psi_eval(half, {{pt(4), {3.0}}}), DomainError);
  }

  TEST_CASE("psi matches the dense convolution at the identity") {
    std::mt19937 rng(31);
    for (int trial = 0; trial < 20; ++trial) {
      const RingMatrix xi = random_dyadic(kZ2, rng, 2, 3);
      const ThetaPlan plan(xi, parse_measure("uniformint(2)^3"), {pt(0, 0)});
      std::uniform_real_distribution<double> u(-1, 1);
      InputField x;
      for (const auto& h : plan.input_support()) x.emplace(h, std::vector<double>{u(rng), u(rng), u(rng)});
      const auto got = psi_eval(plan, x);
      for (int l = 0; l < 2; ++l) {
        double want = 0.0;
        for (int j = 0; j < 3; ++j)
          for (const auto& [s, c] : xi.at(l, j).terms()) want += x.at(s)[j] * c;
        CHECK(std::abs(got[l] - want) < 1e-12);
      }
    }
  }

  TEST_CASE("integer xi with integer draws gives zero") {
    const ThetaPlan plan(RingMatrix::identity(kZ1, 1), BaseMeasure::uniform_int(3), enumerate_ball(kZ1, 3));
    const SampleBatch b = theta_sample(plan, 500, 1);
    for (double v : b.values) CHECK(v == 0.0);
  }

  TEST_CASE("xi = 1/2 with uniformint(1): values 0 and 1/2 with frequencies 1/3 and 2/3") {
    const ThetaPlan plan(parse_ring_matrix("1/2", kZ1), BaseMeasure::uniform_int(1), {pt(0)});
    const std::size_t n = 30000;
    const SampleBatch b = theta_sample(plan, n, 3);
    std::size_t halves = 0;
    for (double v : b.values) {
      CHECK((v == 0.0 || v == 0.5));
      halves += v == 0.5;
    }
    const double p = static_cast<double>(halves) / n;
    CHECK(std::abs(p - 2.0 / 3.0) <= 3 * std::sqrt(2.0 / 9.0 / n));
    const Estimate e = empirical_fourier(b, vec("1"));
    CHECK(std::abs(e.value - (-1.0 / 3.0)) <= 3 * e.stderr_);
  }

  TEST_CASE("empirical transform: alpha = 0 and conjugate symmetry") {
    std::mt19937 rng(32);
    const RingMatrix xi = random_dyadic(kZ1, rng, 1, 1);
    const ThetaPlan plan(xi, parse_measure("gauss(0.3)"), enumerate_ball(kZ1, 2));
    const SampleBatch b = theta_sample(plan, 2000, 4);
    const Estimate zero = empirical_fourier(b, VectorOverG(kZ1, 1));
    CHECK(zero.value == std::complex<double>(1.0, 0.0));
    CHECK(zero.stderr_ == 0.0);
    const Estimate a = empirical_fourier(b, vec("2*u1 - u1^-2")), na = empirical_fourier(b, vec("-2*u1 + u1^-2"));
    CHECK(a.value.real() == na.value.real());
    CHECK(a.value.imag() == -na.value.imag());
    CHECK_THROWS_AS(empirical_fourier(b, vec("u1^5")), DomainError);
  }

  TEST_CASE("product formula examples") {
    const BaseMeasure u1 = BaseMeasure::uniform_int(1);
    CHECK(std::abs(product_formula(RingMatrix::identity(kZ1, 1), vec("3 - u1^4"), u1, 1e-12).value - 1.0) < 1e-15);
    CHECK(std::abs(product_formula(parse_ring_matrix("1/2", kZ1), vec("1"), u1, 1e-12).value + 1.0 / 3.0) < 1e-15);

    const FormalInverse fi = l2_formal_inverse(parse_ring_matrix("2 - u1", kZ1), 2048, 60);
    const ProductValue pv = product_formula(fi.xi, vec("1"), u1, 0.0);
    std::complex<double> want = 1.0;
    for (int n = 0; n < 200; ++n) want *= (1 + 2 * std::cos(2 * kPi * std::ldexp(1.0, -(n + 1)))) / 3;
    CHECK(std::abs(pv.value - want) < 1e-12);

    const ThetaPlan plan(fi.xi, u1, {pt(0)});
    const SampleBatch b = theta_sample(plan, 100000, 7);
    const Estimate e = empirical_fourier(b, vec("1"));
    CHECK(std::abs(e.value - pv.value) <= 3 * e.stderr_);
  }

  TEST_CASE("product tail bound dominates the dropped factors") {
    const BaseMeasure g = parse_measure("geom2");
    VectorOverG beta(kZ1, 1);
    for (int n = 0; n < 40; ++n) beta[0].set(pt(n), std::pow(0.7, n) * 0.3);
    const ProductValue full = product_over(beta, g, 0.0);
    for (double tol : {1e-2, 1e-4, 1e-8}) {
      const ProductValue part = product_over(beta, g, tol);
      CHECK(part.tail_bound < tol);
      CHECK(std::abs(part.value - full.value) <= part.tail_bound + 1e-15);
    }
  }

  TEST_CASE("image support: truncated inverse against its annihilator") {
    const FormalInverse fi = l2_formal_inverse(parse_ring_matrix("2 - u1", kZ1), 2048, 40);
    const ThetaPlan plan(fi.xi, BaseMeasure::uniform_int(1), enumerate_ball(kZ1, 2));
    const SampleBatch b = theta_sample(plan, 2000, 9);
    double tail = 0.0;
    const VectorOverG image = right_apply(fi.xi, vec("2 - u1"));
    for (const auto& [g, c] : image[0].terms()) tail += std::abs(c - (g == pt(0) ? 1.0 : 0.0));
    CHECK(image_support_check(b, {vec("2 - u1")}) <= tail + 1e-12);
    CHECK(image_support_check(b, {VectorOverG(kZ1, 1)}) == 0.0);
    CHECK(image_support_check(b, {vec("1")}) > 0.4);
  }

  TEST_CASE("additivity: Theta of a sum equals the sum of Thetas per sample") {
    std::mt19937 rng(33);
    for (int trial = 0; trial < 5; ++trial) {
      const RingMatrix a = random_dyadic(kZ2, rng, 2, 2), b = random_dyadic(kZ2, rng, 2, 2);
      const auto window = enumerate_ball(kZ2, 1);
      const BaseMeasure nu = parse_measure("uniformint(3)^2");
      const SampleBatch sa = theta_sample(ThetaPlan(a, nu, window), 300, 11);
      const SampleBatch sb = theta_sample(ThetaPlan(b, nu, window), 300, 11);
      const SampleBatch sab = theta_sample(ThetaPlan(a + b, nu, window), 300, 11);
      std::size_t bad = 0;
      for (std::size_t i = 0; i < sab.values.size(); ++i) {
        double s = sa.values[i] + sb.values[i];
        s -= std::floor(s);
        bad += s != sab.values[i];
      }
      CHECK(bad == 0);
    }
  }

  TEST_CASE("left-shift equivariance and the right-shift identity") {
    std::mt19937 rng(34);
    for (int trial = 0; trial < 5; ++trial) {
      const RingMatrix xi = random_dyadic(kZ2, rng, 2, 2);
      const InputField x = integer_field(kZ2, rng, 9, 2);
      const auto window = enumerate_ball(kZ2, 2);
      const Element g = pt(1, -2);

      // (g x)(h) = x(g^-1 h) and (g Theta)(w) = Theta(g^-1 w).
      InputField gx;
      for (const auto& [h, v] : x) gx.emplace(kZ2.multiply(g, h), v);
      std::vector<Element> shifted;
      for (const auto& w : window) shifted.push_back(kZ2.multiply(kZ2.inverse(g), w));
      CHECK(theta_eval(xi, window, gx) == theta_eval(xi, shifted, x));

      // (rho(g) x)(h) = x(h g).
      InputField rx;
      for (const auto& [h, v] : x) rx.emplace(kZ2.multiply(h, kZ2.inverse(g)), v);
      RingMatrix moved(kZ2, 2, 2);
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) moved.at(i, j) = translate_right(xi.at(i, j), kZ2.inverse(g));
      CHECK(theta_eval(xi, window, rx) == theta_eval(moved, window, x));
    }
  }

  TEST_CASE("equivariance on a non-abelian group") {
    const GroupSpec s3 = GroupSpec::builtin("S3");
    std::mt19937 rng(35);
    RingMatrix xi(s3, 1, 1);
    for (int g = 0; g < 6; ++g) xi.at(0, 0).set(Element::index(g), (static_cast<int>(rng() % 9) - 4) / 4.0);
    InputField x;
    for (int h = 0; h < 6; ++h) x.emplace(Element::index(h), std::vector<double>{double(rng() % 5)});
    const std::vector<Element> window{s3.identity()};
    for (int gi = 0; gi < 6; ++gi) {
      const Element g = Element::index(gi);
      InputField rx;
      for (const auto& [h, v] : x) rx.emplace(s3.multiply(h, s3.inverse(g)), v);
      RingMatrix moved(s3, 1, 1);
      moved.at(0, 0) = translate_right(xi.at(0, 0), s3.inverse(g));
      CHECK(theta_eval(xi, window, rx) == theta_eval(moved, window, x));
    }
  }

  TEST_CASE("l2 Lipschitz bound for psi over shared draws") {
    std::mt19937 rng(36);
    const BaseMeasure nu = parse_measure("gauss(0.4)^2");
    for (int trial = 0; trial < 5; ++trial) {
      const RingMatrix a = random_dyadic(kZ1, rng, 1, 2);
      const RingMatrix d = (1.0 / 64) * random_dyadic(kZ1, rng, 1, 2);
      const ThetaPlan pa(a, nu, {pt(0)}), pb(a + d, nu, {pt(0)});
      const std::size_t n = 4000;
      double acc = 0.0;
      for (std::size_t s = 0; s < n; ++s) {
        const auto draw = [&](const ThetaPlan& p) { return draw_inputs(p, 5, 0, static_cast<std::uint32_t>(s)); };
        const double diff = psi_eval(pb, draw(pb))[0] - psi_eval(pa, draw(pa))[0];
        acc += diff * diff;
      }
      // Per-coordinate variance is half the total second moment.
      const double exact = l2_norm(d) * std::sqrt(nu.second_moment() / 2);
      CHECK(std::sqrt(acc / n) <= exact * 1.1);
      CHECK(std::sqrt(acc / n) >= exact * 0.9);
      CHECK(std::sqrt(acc / n) <= l2_norm(d) * std::sqrt(2 * nu.second_moment()) * (1 + 1e-3));
    }
  }

  TEST_CASE("product is Lipschitz in xi") {
    const BaseMeasure nu = parse_measure("geom2");
    const RingMatrix base = parse_ring_matrix("0.3 + 0.2*u1", kZ1);
    const RingMatrix dir = parse_ring_matrix("1 - u1^2", kZ1);
    const VectorOverG a = vec("1 + u1");
    double l1 = 0.0;
    const VectorOverG moved = right_apply(dir, a);
    for (const auto& [g, c] : moved[0].terms()) l1 += std::abs(c);
    const auto v0 = product_formula(base, a, nu, 0.0).value;
    for (int i = 0; i < 12; ++i) {
      const double eps = std::ldexp(1.0, -i);
      const double d = std::abs(product_formula(base + eps * dir, a, nu, 0.0).value - v0);
      CHECK(d <= 2 * kPi * std::sqrt(nu.second_moment()) * eps * l1 + 1e-14);
    }
  }

  TEST_CASE("samples do not depend on the thread count") {
    const FormalInverse fi = l2_formal_inverse(parse_ring_matrix("3 - u1 - u1^-1", kZ1), 2048);
    const ThetaPlan plan(fi.xi, parse_measure("conv(geom2,gauss(0.1))"), enumerate_ball(kZ1, 3));
    set_thread_count(1);
    const SampleBatch one = theta_sample(plan, 3000, 17);
    set_thread_count(8);
    const SampleBatch eight = theta_sample(plan, 3000, 17);
    set_thread_count(0);
    CHECK(one.values == eight.values);
  }
}
