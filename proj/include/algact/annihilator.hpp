#pragma once

#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "algact/groupring.hpp"
#include "algact/measures.hpp"
#include "algact/spectral.hpp"

namespace algact {

struct AnnihilatorResult {
  bool is_member = false;
  double max_frac_deviation = 0.0;
  double threshold = 0.0;  // tol + budget
  VectorOverG image;       // r(xi*) alpha
};

// alpha (integral, m components) lies in the annihilator of X^xi iff
// r(xi*) alpha is integral; xi has size k x m. Membership is decided up to
// tol + budget, where budget accounts for a truncated xi.
AnnihilatorResult annihilator_test(const RingMatrix& xi, const VectorOverG& alpha, double tol = 1e-6,
                                   double budget = 0.0);

struct ExactAnnihilatorResult {
  bool is_member = false;
  Rational max_frac_deviation = 0;
};

ExactAnnihilatorResult annihilator_test_exact(const ExactRingMatrix& xi, const ExactVector& alpha);

enum class Membership { InIdeal, InL2Only, Divergent, Inconclusive };
std::string to_string(Membership m);

struct MembershipResult {
  Membership verdict = Membership::Inconclusive;
  std::vector<DivergenceRow> rows;
  double alpha_norm = 0.0;
  double frac_deviation = 0.0;    // of the limit vector, when stable
  double integrality_tol = 0.0;
  std::optional<VectorOverG> limit;
  std::string reason;
};

inline constexpr double kDivergenceFactor = 1e3;
inline constexpr double kGrowthRatio = 1.2;
inline constexpr double kStableChange = 0.01;

// Trichotomy from |r(xi_k) alpha|_2 along k_list (expected to double):
// divergent when the norm exceeds 1e3 |alpha|_2 or each of the last two
// ratios is at least 1.2; stable when the relative change over each of the
// last two steps is below 1%, in which case the limit is integral when its
// distance to Z is at most 1e-6 + sqrt(n) |round(beta)|_1 |f xi_k - id|_2;
// inconclusive otherwise.
MembershipResult ideal_membership(const SpectralCalculus& calc, const VectorOverG& alpha,
                                  const std::vector<double>& k_list);

struct WitnessValue {
  std::complex<double> value;
  double tail_bound = 0.0;
  double beta_norm_sq = 0.0;
};

// exp(-delta |r(xi_k) alpha|^2) prod_g eta^((r(xi_k) alpha)(g)).
WitnessValue witness_fourier(const SpectralCalculus& calc, const BaseMeasure& eta, double delta, double k,
                             const VectorOverG& alpha, double tol = 1e-12);

struct ClaimsRow {
  std::size_t alpha_index = 0;
  double k = 0.0;
  double delta = 0.0;
  std::complex<double> value;
  double tail_bound = 0.0;
  double expected = 0.0;  // exp(-delta |beta|^2) for Claim-1 rows, NaN otherwise
};

struct ClaimsAlpha {
  VectorOverG alpha;
  MembershipResult membership;
  std::string claim;  // "claim1", "claim2" or "inconclusive"
  bool pass = false;
  double margin = 0.0;     // Claim 2: 1 - max |value| at the largest k
  double max_error = 0.0;  // Claim 1: max |value - expected| at the largest k
};

struct WitnessReport {
  std::vector<ClaimsAlpha> alphas;
  std::vector<ClaimsRow> rows;
  bool all_pass = true;
  bool inconclusive = false;
};

WitnessReport claims_report(const SpectralCalculus& calc, const BaseMeasure& eta,
                            const std::vector<VectorOverG>& alphas, const std::vector<double>& k_list,
                            const std::vector<double>& delta_list, double tol = 1e-12);

struct StrongRow {
  std::size_t alpha_index = 0;
  int n = 0;
  std::complex<double> value;
  double bound = 1.0;  // |nu_n^(beta(g0))| at the first fractional site
};

struct StrongAlpha {
  VectorOverG alpha;
  bool annihilates = false;
  double max_frac_deviation = 0.0;
  bool pass = false;
};

struct StrongReport {
  std::vector<StrongAlpha> alphas;
  std::vector<StrongRow> rows;
  bool all_pass = true;
};

// Fourier coefficients prod_g nu_n^((r(xi*) alpha)(g)) of the pushforward of
// nu_n = uniformint(n)^k under Theta_{xi*}: 1 on the annihilator and bounded
// by the transform at any fractional site otherwise.
StrongReport strong_witness_check(const RingMatrix& xi, const std::vector<int>& n_list,
                                  const std::vector<VectorOverG>& alphas, double tol = 1e-6,
                                  double budget = 0.0);

}  // namespace algact
