#pragma once

#include <complex>
#include <cstdint>
#include <map>
#include <vector>

#include "algact/groupring.hpp"
#include "algact/measures.hpp"

namespace algact {

// Values x(h) in R^k at finitely many sites.
using InputField = std::map<Element, std::vector<double>>;

// Theta_xi(x)(g)(l) = sum_j sum_s x(g s)(j) xi_lj(s), i.e. q(r(xi*) x),
// evaluated on a finite window W. The input support is W . supp(xi).
class ThetaPlan {
 public:
  ThetaPlan(RingMatrix xi, BaseMeasure nu, std::vector<Element> window, double eps_trunc = 0.0);

  const RingMatrix& xi() const { return xi_; }
  const BaseMeasure& nu() const { return nu_; }
  const std::vector<Element>& window() const { return window_; }
  const std::vector<Element>& input_support() const { return input_; }
  double eps_trunc() const { return eps_trunc_; }
  int m() const { return xi_.rows(); }
  int k() const { return xi_.cols(); }

  // Raw (unreduced) values for a draw laid out as input_support() x k;
  // out has window().size() x m entries.
  void evaluate(const double* inputs, double* out) const;

 private:
  struct Term {
    std::size_t input;
    int j;
    double coeff;
  };
  RingMatrix xi_;
  BaseMeasure nu_;
  std::vector<Element> window_;
  double eps_trunc_;
  std::vector<Element> input_;
  std::vector<std::vector<Term>> terms_;  // per (window index, l)
};

// Psi_xi(x) = (r(xi*) x)(1). Throws DomainError if x has a site outside the
// plan's input support.
std::vector<double> psi_eval(const ThetaPlan& plan, const InputField& x);

// Theta_xi(x) on `window`, reduced mod 1; row-major (window index, l). Every
// site in window . supp(xi) must be present in x.
std::vector<double> theta_eval(const RingMatrix& xi, const std::vector<Element>& window, const InputField& x);

// The i.i.d. nu-draws used for sample `sample` of theta_sample.
InputField draw_inputs(const ThetaPlan& plan, std::uint64_t seed, std::uint64_t task, std::uint32_t sample);

struct SampleBatch {
  std::vector<Element> window;
  int m = 0;
  std::size_t samples = 0;
  std::uint64_t seed = 0;
  std::uint64_t task = 0;
  std::vector<double> values;  // samples x window x m, each in [0, 1)

  double at(std::size_t s, std::size_t w, int l) const {
    return values[(s * window.size() + w) * m + l];
  }
};

SampleBatch theta_sample(const ThetaPlan& plan, std::size_t samples, std::uint64_t seed, std::uint64_t task = 0);

struct Estimate {
  std::complex<double> value;
  double stderr_ = 0.0;
};

// Mean of exp(2 pi i <theta_s, alpha>) with standard error sd / sqrt(N).
// alpha has m components supported in the batch window.
Estimate empirical_fourier(const SampleBatch& batch, const VectorOverG& alpha);

struct ProductValue {
  std::complex<double> value;
  double tail_bound = 0.0;
  std::size_t factors = 0;
};

// prod_g nu^((r(xi) alpha)(g)), multiplied over growing max-norm balls until
// C sum_{g outside} |beta(g)|^2 < tol with C = 2 pi^2 E|X|^2.
ProductValue product_formula(const RingMatrix& xi, const VectorOverG& alpha, const BaseMeasure& nu, double tol);

// Same product for an already computed beta with k components.
ProductValue product_over(const VectorOverG& beta, const BaseMeasure& nu, double tol);

// Largest distance to Z of <theta_s, alpha> over samples and alphas.
double image_support_check(const SampleBatch& batch, const std::vector<VectorOverG>& alphas);

}  // namespace algact
