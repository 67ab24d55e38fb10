#include "algact/annihilator.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <numbers>

#include "algact/theta.hpp"

namespace algact {

namespace {

void require_integral(const VectorOverG& alpha) {
  if (!is_integral(alpha)) throw DomainError("alpha must have integer coefficients");
}

double l1_of_rounded(const VectorOverG& v) {
  double s = 0.0;
  for (int l = 0; l < v.components(); ++l)
    for (const auto& [g, c] : v[l].terms()) s += std::abs(std::nearbyint(c));
  return s;
}

VectorOverG rounded(const VectorOverG& v) {
  VectorOverG out(v.spec(), v.components());
  for (int l = 0; l < v.components(); ++l)
    for (const auto& [g, c] : v[l].terms()) out[l].set(g, std::nearbyint(c));
  return out;
}

}  // namespace

AnnihilatorResult annihilator_test(const RingMatrix& xi, const VectorOverG& alpha, double tol, double budget) {
  require_integral(alpha);
  AnnihilatorResult out{false, 0.0, tol + budget, right_apply(star(xi), alpha)};
  out.max_frac_deviation = max_frac_deviation(out.image);
  out.is_member = out.max_frac_deviation <= out.threshold;
  return out;
}

ExactAnnihilatorResult annihilator_test_exact(const ExactRingMatrix& xi, const ExactVector& alpha) {
  for (int l = 0; l < alpha.components(); ++l)
    for (const auto& [g, c] : alpha[l].terms())
      if (denominator(c) != 1) throw DomainError("alpha must have integer coefficients");
  const ExactVector image = right_apply(star(xi), alpha);
  ExactAnnihilatorResult out;
  out.max_frac_deviation = max_frac_deviation(image);
  out.is_member = out.max_frac_deviation == 0;
  return out;
}

std::string to_string(Membership m) {
  switch (m) {
    case Membership::InIdeal:
      return "in-ideal";
    case Membership::InL2Only:
      return "off-ideal-l2";
    case Membership::Divergent:
      return "off-ideal-divergent";
    case Membership::Inconclusive:
      return "inconclusive";
  }
  return "inconclusive";
}

MembershipResult ideal_membership(const SpectralCalculus& calc, const VectorOverG& alpha,
                                  const std::vector<double>& k_list) {
  require_integral(alpha);
  MembershipResult out;
  out.alpha_norm = l2_norm(alpha);
  if (alpha.is_zero()) {
    out.verdict = Membership::InIdeal;
    out.limit = VectorOverG(alpha.spec(), calc.f().rows());
    out.reason = "alpha = 0";
    for (double k : k_list) out.rows.push_back({k, 0.0});
    return out;
  }
  out.rows = membership_divergence(calc, alpha, k_list);
  const std::size_t n = out.rows.size();
  if (n == 0) {
    out.reason = "empty k list";
    return out;
  }
  const double last = out.rows.back().norm;
  if (last > kDivergenceFactor * out.alpha_norm) {
    out.verdict = Membership::Divergent;
    out.reason = "norm exceeds 1e3 |alpha|_2";
    return out;
  }
  if (n >= 3) {
    const double r1 = out.rows[n - 2].norm / out.rows[n - 3].norm;
    const double r2 = out.rows[n - 1].norm / out.rows[n - 2].norm;
    if (r1 >= kGrowthRatio && r2 >= kGrowthRatio) {
      out.verdict = Membership::Divergent;
      out.reason = "norm grows by at least 1.2x over each of the last two doublings";
      return out;
    }
    const double c1 = std::abs(out.rows[n - 2].norm - out.rows[n - 3].norm) / out.rows[n - 2].norm;
    const double c2 = std::abs(out.rows[n - 1].norm - out.rows[n - 2].norm) / out.rows[n - 1].norm;
    if (c1 < kStableChange && c2 < kStableChange) {
      const double k = out.rows.back().k;
      VectorOverG beta = calc.apply(k, alpha);
      const ApproxInverse ai = calc.approximate_inverse(k, std::nullopt, false);
      out.frac_deviation = max_frac_deviation(beta);
      out.integrality_tol =
          1e-6 + std::sqrt(static_cast<double>(alpha.components())) * l1_of_rounded(beta) * ai.residual_right;
      if (out.frac_deviation <= out.integrality_tol) {
        out.verdict = Membership::InIdeal;
        out.reason = "norms stable, limit integral";
        out.limit = rounded(beta);
      } else {
        out.verdict = Membership::InL2Only;
        out.reason = "norms stable, limit not integral";
        out.limit = std::move(beta);
      }
      return out;
    }
  }
  out.reason = "norms neither stable within 1% nor divergent";
  return out;
}

WitnessValue witness_fourier(const SpectralCalculus& calc, const BaseMeasure& eta, double delta, double k,
                             const VectorOverG& alpha, double tol) {
  if (!(delta > 0.0)) throw DomainError("delta must be positive");
  if (eta.dim() != calc.f().rows()) throw DimensionMismatch("eta must live on R^m for f of size m x n");
  const VectorOverG beta = calc.apply(k, alpha, 0.0);
  const ProductValue p = product_over(beta, eta, tol);
  WitnessValue out;
  out.beta_norm_sq = l2_norm(beta) * l2_norm(beta);
  out.value = std::exp(-delta * out.beta_norm_sq) * p.value;
  out.tail_bound = p.tail_bound;
  return out;
}

WitnessReport claims_report(const SpectralCalculus& calc, const BaseMeasure& eta,
                            const std::vector<VectorOverG>& alphas, const std::vector<double>& k_list,
                            const std::vector<double>& delta_list, double tol) {
  if (eta.dim() != calc.f().rows()) throw DimensionMismatch("eta must live on R^m for f of size m x n");
  for (double d : delta_list)
    if (!(d > 0.0)) throw DomainError("delta must be positive");
  WitnessReport report;
  const double k_max = k_list.empty() ? 0.0 : k_list.back();
  for (std::size_t a = 0; a < alphas.size(); ++a) {
    const VectorOverG& alpha = alphas[a];
    ClaimsAlpha entry{alpha, ideal_membership(calc, alpha, k_list), "", false, 0.0, 0.0};
    const Membership v = entry.membership.verdict;
    entry.claim = v == Membership::InIdeal ? "claim1" : v == Membership::Inconclusive ? "inconclusive" : "claim2";
    const double limit_sq =
        entry.membership.limit ? l2_norm(*entry.membership.limit) * l2_norm(*entry.membership.limit) : 0.0;
    double max_abs_last = 0.0, max_err_last = 0.0;
    bool claim1_ok = true;
    for (double k : k_list) {
      const VectorOverG beta = calc.apply(k, alpha, 0.0);
      const ProductValue p = product_over(beta, eta, tol);
      const double nsq = l2_norm(beta) * l2_norm(beta);
      for (double delta : delta_list) {
        ClaimsRow row;
        row.alpha_index = a;
        row.k = k;
        row.delta = delta;
        row.value = std::exp(-delta * nsq) * p.value;
        row.tail_bound = p.tail_bound;
        row.expected = v == Membership::InIdeal ? std::exp(-delta * limit_sq)
                                                : std::numeric_limits<double>::quiet_NaN();
        if (k == k_max) {
          max_abs_last = std::max(max_abs_last, std::abs(row.value));
          if (v == Membership::InIdeal) {
            const double err = std::abs(row.value - row.expected);
            max_err_last = std::max(max_err_last, err);
            if (err > 1e-6 + row.tail_bound) claim1_ok = false;
          }
        }
        report.rows.push_back(row);
      }
    }
    entry.margin = 1.0 - max_abs_last;
    entry.max_error = max_err_last;
    if (v == Membership::InIdeal) {
      entry.pass = claim1_ok;
    } else if (v == Membership::Inconclusive) {
      entry.pass = false;
      report.inconclusive = true;
    } else {
      entry.pass = entry.margin > 0.0;
    }
    if (!entry.pass && v != Membership::Inconclusive) report.all_pass = false;
    report.alphas.push_back(std::move(entry));
  }
  return report;
}

StrongReport strong_witness_check(const RingMatrix& xi, const std::vector<int>& n_list,
                                  const std::vector<VectorOverG>& alphas, double tol, double budget) {
  StrongReport report;
  const int k = xi.rows();
  for (std::size_t a = 0; a < alphas.size(); ++a) {
    const AnnihilatorResult ann = annihilator_test(xi, alphas[a], tol, budget);
    StrongAlpha entry{alphas[a], ann.is_member, ann.max_frac_deviation, true};
    // First site (in element order) carrying a fractional coordinate.
    std::optional<std::vector<double>> first;
    std::map<Element, std::vector<double>> sites;
    for (int j = 0; j < k; ++j)
      for (const auto& [g, c] : ann.image[j].terms()) {
        auto& v = sites[g];
        v.resize(k, 0.0);
        v[j] = c;
      }
    for (const auto& [g, v] : sites) {
      for (double c : v)
        if (frac_distance(c) > tol + budget) {
          first = v;
          break;
        }
      if (first) break;
    }
    for (int n : n_list) {
      if (n < 0) throw DomainError("n must be nonnegative");
      const BaseMeasure nu = BaseMeasure::uniform_int(n, k);
      StrongRow row;
      row.alpha_index = a;
      row.n = n;
      row.value = product_over(ann.image, nu, 0.0).value;
      row.bound = first ? std::abs(nu.fourier(*first)) : 1.0;
      if (ann.is_member) {
        if (std::abs(row.value - 1.0) > 1e-9 + 2.0 * std::numbers::pi * budget) entry.pass = false;
      } else if (std::abs(row.value) > row.bound + 1e-12) {
        entry.pass = false;
      }
      report.rows.push_back(row);
    }
    if (!entry.pass) report.all_pass = false;
    report.alphas.push_back(std::move(entry));
  }
  return report;
}

}  // namespace algact
