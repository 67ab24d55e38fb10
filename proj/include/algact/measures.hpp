#pragma once

#include <complex>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "algact/random.hpp"

namespace algact {

// A probability law on R^k (or Z^k) with a closed-form Fourier transform
// nu^(t) = E exp(2 pi i <t, X>), a sampler and moment metadata.
class BaseMeasure {
 public:
  enum class Kind { UniformInt, GeometricSym, Gaussian, Convolution, DiscreteExplicit };

  // Product of k copies of the uniform law on {-n, ..., n}. n = 0 is the
  // point mass at 0.
  static BaseMeasure uniform_int(int n, int dim = 1);
  // Product of k copies of l -> 2^-|l| / 3 on Z.
  static BaseMeasure geometric_sym(int dim = 1);
  // Centered Gaussian with transform exp(-delta |t|^2); per-coordinate
  // variance delta / (2 pi^2).
  static BaseMeasure gaussian(double delta, int dim = 1);
  static BaseMeasure dirac(int dim = 1) { return uniform_int(0, dim); }
  // Product of k copies of a finite law on R given as (value, probability).
  static BaseMeasure discrete(std::vector<std::pair<double, double>> atoms, int dim = 1);
  static BaseMeasure convolution(const BaseMeasure& a, const BaseMeasure& b);

  Kind kind() const;
  int dim() const;

  std::complex<double> fourier(std::span<const double> t) const;
  // 1 - nu^(t), evaluated without cancellation for small t.
  std::complex<double> one_minus_fourier(std::span<const double> t) const;

  // Writes one draw into out (size dim()).
  void sample(SiteStream& stream, std::span<double> out) const;

  const std::vector<double>& mean() const;
  // E |X|_2^2.
  double second_moment() const;
  bool integer_valued() const;
  bool is_point_mass_at_zero() const;

  // Round-trippable spec string, e.g. "conv(geom2^1,gauss(0.05)^1)".
  std::string describe() const;

 private:
  struct Node;
  explicit BaseMeasure(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

// Spec strings: "uniformint(n)^k", "geom2^k", "gauss(delta)^k", "dirac^k",
// "discrete(v:p,v:p,...)^k" and "conv(a,b)". The exponent defaults to 1.
BaseMeasure parse_measure(std::string_view text);

// C with |1 - nu^(t)| <= C |t|^2 for all t, namely 2 pi^2 E|X|^2. Throws
// DomainError unless nu has mean zero.
double fourier_quadratic_bound(const BaseMeasure& nu);

struct NonExtendRow {
  int n = 0;
  double t = 0.0;
  double set_size = 0.0;        // |E_n|
  double fourier_term = 0.0;    // |1 - nu^(t_n e_j)| |E_n|
  double fourier_partial = 0.0;
  double p_term = 0.0;          // |t_n|^p |E_n|
  double p_partial = 0.0;
};

struct NonExtendReport {
  int coordinate = 0;  // 0-based j
  double p = 0.0;
  std::vector<NonExtendRow> rows;
};

// For n = 1..terms finds t_n with |t_n| < 2^(-n/p), |1 - nu^(t_n e_j)| >=
// 2^n |t_n|^p and |1 - nu^(t_n e_j)| < 1/2 by halving, sets
// |E_n| = ceil(2^-n / |t_n|^p) and tabulates both partial sums. Throws
// DomainError for p <= 2, for the point mass at 0, and when no coordinate
// yields a witness at machine precision.
NonExtendReport nonextendability_witness(const BaseMeasure& nu, double p, int terms);

}  // namespace algact
