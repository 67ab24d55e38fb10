#include "algact/theta.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

#include "algact/parallel.hpp"

namespace algact {

namespace {

double mod1(double v) {
  double r = v - std::floor(v);
  return r >= 1.0 ? 0.0 : r;
}

// Pairing coefficients (window index, l, alpha value) for alpha.
std::vector<std::tuple<std::size_t, int, double>> pairing_terms(const SampleBatch& batch, const VectorOverG& alpha) {
  if (alpha.components() != batch.m) throw DimensionMismatch("alpha needs one component per row of xi");
  std::map<Element, std::size_t> index;
  for (std::size_t w = 0; w < batch.window.size(); ++w) index.emplace(batch.window[w], w);
  std::vector<std::tuple<std::size_t, int, double>> out;
  for (int l = 0; l < alpha.components(); ++l)
    for (const auto& [g, c] : alpha[l].terms()) {
      auto it = index.find(g);
      if (it == index.end()) throw DomainError("alpha is supported outside the sampled window");
      out.emplace_back(it->second, l, c);
    }
  return out;
}

double pairing(const SampleBatch& batch, std::size_t s, const std::vector<std::tuple<std::size_t, int, double>>& terms) {
  double p = 0.0;
  for (const auto& [w, l, c] : terms) p += c * batch.at(s, w, l);
  return p;
}

}  // namespace

ThetaPlan::ThetaPlan(RingMatrix xi, BaseMeasure nu, std::vector<Element> window, double eps_trunc)
    : xi_(std::move(xi)), nu_(std::move(nu)), window_(std::move(window)), eps_trunc_(eps_trunc) {
  if (nu_.dim() != xi_.cols()) throw DimensionMismatch("nu must live on R^k for xi of size m x k");
  if (eps_trunc_ < 0.0) throw DomainError("truncation budget must be nonnegative");
  const GroupSpec& spec = xi_.spec();
  for (const auto& w : window_)
    if (!spec.contains(w)) throw BackendMismatch("window element does not belong to " + spec.id());
  std::set<Element> support;
  for (const auto& w : window_)
    for (int l = 0; l < m(); ++l)
      for (int j = 0; j < k(); ++j)
        for (const auto& [s, c] : xi_.at(l, j).terms()) support.insert(spec.multiply(w, s));
  input_.assign(support.begin(), support.end());
  std::map<Element, std::size_t> index;
  for (std::size_t i = 0; i < input_.size(); ++i) index.emplace(input_[i], i);
  terms_.resize(window_.size() * m());
  for (std::size_t w = 0; w < window_.size(); ++w)
    for (int l = 0; l < m(); ++l) {
      auto& list = terms_[w * m() + l];
      for (int j = 0; j < k(); ++j)
        for (const auto& [s, c] : xi_.at(l, j).terms())
          list.push_back({index.at(spec.multiply(window_[w], s)), j, c});
    }
}

void ThetaPlan::evaluate(const double* inputs, double* out) const {
  const int kk = k();
  for (std::size_t t = 0; t < terms_.size(); ++t) {
    double v = 0.0;
    for (const auto& term : terms_[t]) v += inputs[term.input * kk + term.j] * term.coeff;
    out[t] = v;
  }
}

std::vector<double> psi_eval(const ThetaPlan& plan, const InputField& x) {
  const auto& support = plan.input_support();
  for (const auto& [h, v] : x) {
    if (!std::binary_search(support.begin(), support.end(), h)) {
      throw DomainError("input is supported outside the plan's input support");
    }
    if (static_cast<int>(v.size()) != plan.k()) throw DimensionMismatch("input values need k components");
  }
  std::vector<double> out(plan.m(), 0.0);
  for (int l = 0; l < plan.m(); ++l)
    for (int j = 0; j < plan.k(); ++j)
      for (const auto& [s, c] : plan.xi().at(l, j).terms()) {
        auto it = x.find(s);
        if (it != x.end()) out[l] += it->second[j] * c;
      }
  return out;
}

std::vector<double> theta_eval(const RingMatrix& xi, const std::vector<Element>& window, const InputField& x) {
  const GroupSpec& spec = xi.spec();
  const int m = xi.rows(), k = xi.cols();
  std::vector<double> out(window.size() * m, 0.0);
  for (std::size_t w = 0; w < window.size(); ++w)
    for (int l = 0; l < m; ++l) {
      double v = 0.0;
      for (int j = 0; j < k; ++j)
        for (const auto& [s, c] : xi.at(l, j).terms()) {
          auto it = x.find(spec.multiply(window[w], s));
          if (it == x.end()) throw DomainError("input field misses a site of window . supp(xi)");
          v += it->second.at(j) * c;
        }
      out[w * m + l] = mod1(v);
    }
  return out;
}

InputField draw_inputs(const ThetaPlan& plan, std::uint64_t seed, std::uint64_t task, std::uint32_t sample) {
  const StreamKey key = StreamKey::derive(seed, task);
  const GroupSpec& spec = plan.xi().spec();
  InputField x;
  for (const auto& h : plan.input_support()) {
    SiteStream stream(key, sample, site_id(spec, h));
    std::vector<double> v(plan.k());
    plan.nu().sample(stream, v);
    x.emplace(h, std::move(v));
  }
  return x;
}

SampleBatch theta_sample(const ThetaPlan& plan, std::size_t samples, std::uint64_t seed, std::uint64_t task) {
  if (samples == 0) throw DomainError("theta_sample needs at least one sample");
  if (samples > 0xffffffffULL) throw DomainError("too many samples for one stream");
  SampleBatch batch;
  batch.window = plan.window();
  batch.m = plan.m();
  batch.samples = samples;
  batch.seed = seed;
  batch.task = task;
  const std::size_t per = plan.window().size() * plan.m();
  batch.values.resize(samples * per);
  const StreamKey key = StreamKey::derive(seed, task);
  const GroupSpec& spec = plan.xi().spec();
  std::vector<std::uint64_t> sites;
  for (const auto& h : plan.input_support()) sites.push_back(site_id(spec, h));
  const int k = plan.k();
  parallel_for(samples, [&](std::size_t s) {
    std::vector<double> inputs(sites.size() * k);
    for (std::size_t i = 0; i < sites.size(); ++i) {
      SiteStream stream(key, static_cast<std::uint32_t>(s), sites[i]);
      plan.nu().sample(stream, std::span<double>(inputs.data() + i * k, k));
    }
    double* out = batch.values.data() + s * per;
    plan.evaluate(inputs.data(), out);
    for (std::size_t t = 0; t < per; ++t) out[t] = mod1(out[t]);
  });
  return batch;
}

Estimate empirical_fourier(const SampleBatch& batch, const VectorOverG& alpha) {
  const auto terms = pairing_terms(batch, alpha);
  const std::size_t n = batch.samples;
  std::vector<std::complex<double>> z(n);
  parallel_for(n, [&](std::size_t s) {
    const double p = 2.0 * std::numbers::pi * pairing(batch, s, terms);
    z[s] = {std::cos(p), std::sin(p)};
  });
  std::complex<double> sum = 0.0;
  for (const auto& v : z) sum += v;
  const std::complex<double> mean = sum / static_cast<double>(n);
  double var = 0.0;
  for (const auto& v : z) var += std::norm(v - mean);
  Estimate est;
  est.value = mean;
  est.stderr_ = n > 1 ? std::sqrt(var / static_cast<double>(n - 1) / static_cast<double>(n)) : 0.0;
  return est;
}

ProductValue product_over(const VectorOverG& beta, const BaseMeasure& nu, double tol) {
  if (beta.components() != nu.dim()) throw DimensionMismatch("beta needs one component per dimension of nu");
  const double C = fourier_quadratic_bound(nu);
  const GroupSpec& spec = beta.spec();
  std::map<Element, std::vector<double>> points;
  for (int j = 0; j < beta.components(); ++j)
    for (const auto& [g, c] : beta[j].terms()) {
      auto& v = points[g];
      v.resize(beta.components(), 0.0);
      v[j] = c;
    }
  std::vector<std::pair<int, Element>> order;
  double tail = 0.0;
  for (const auto& [g, v] : points) {
    order.emplace_back(max_norm(spec, g), g);
    for (double x : v) tail += x * x;
  }
  std::sort(order.begin(), order.end());
  ProductValue out;
  out.value = 1.0;
  std::size_t i = 0;
  while (i < order.size() && !(C * tail < tol && tol > 0.0)) {
    const int radius = order[i].first;
    while (i < order.size() && order[i].first == radius) {
      const auto& v = points.at(order[i].second);
      out.value *= nu.fourier(v);
      for (double x : v) tail -= x * x;
      ++out.factors;
      ++i;
    }
  }
  out.tail_bound = i < order.size() ? C * std::max(0.0, tail) : 0.0;
  return out;
}

ProductValue product_formula(const RingMatrix& xi, const VectorOverG& alpha, const BaseMeasure& nu, double tol) {
  return product_over(right_apply(xi, alpha), nu, tol);
}

double image_support_check(const SampleBatch& batch, const std::vector<VectorOverG>& alphas) {
  double worst = 0.0;
  for (const auto& alpha : alphas) {
    const auto terms = pairing_terms(batch, alpha);
    std::vector<double> dev(batch.samples);
    parallel_for(batch.samples, [&](std::size_t s) { dev[s] = frac_distance(pairing(batch, s, terms)); });
    for (double d : dev) worst = std::max(worst, d);
  }
  return worst;
}

}  // namespace algact
