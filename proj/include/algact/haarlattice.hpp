#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "algact/groups.hpp"
#include "algact/random.hpp"

namespace algact {

inline constexpr double kMeasureSumTolerance = 1e-12;

// A probability vector on a finite group, indexed by element index.
class FiniteMeasure {
 public:
  // Throws DomainError unless the entries are nonnegative and sum to 1
  // within 1e-12.
  FiniteMeasure(GroupSpec spec, std::vector<double> p);

  static FiniteMeasure dirac(const GroupSpec& spec, int g);
  static FiniteMeasure uniform_on(const GroupSpec& spec, const std::vector<int>& set);

  const GroupSpec& spec() const { return spec_; }
  const std::vector<double>& probabilities() const { return p_; }
  double operator[](int g) const { return p_[g]; }
  int order() const { return static_cast<int>(p_.size()); }
  // Indices with positive mass.
  std::vector<int> support() const;

 private:
  GroupSpec spec_;
  std::vector<double> p_;
};

// (mu * nu)(z) = sum_{xy = z} mu(x) nu(y).
FiniteMeasure convolve_fm(const FiniteMeasure& mu, const FiniteMeasure& nu);
// mu*(x) = mu(x^-1).
FiniteMeasure star_fm(const FiniteMeasure& mu);
FiniteMeasure haar_of(const SubgroupSet& y);
// (1 - t) mu + t nu.
FiniteMeasure mix_fm(const FiniteMeasure& mu, const FiniteMeasure& nu, double t);
// Half the l1 distance.
double tv(const FiniteMeasure& mu, const FiniteMeasure& nu);

// A random measure on at most max_support distinct elements.
FiniteMeasure random_measure(const GroupSpec& spec, SiteStream& stream, int max_support = 3);

struct JoinResult {
  FiniteMeasure measure;
  int iterations = 0;
  SubgroupSet target;         // subgroup_generate(Y1 u Y2)
  double tv_to_target = 0.0;
  bool monotone = true;       // min over the target never decreased
};

// rho <- rho * P with P = m_Y1 * m_Y2 * m_Y1, started at P, until the TV
// step falls below tol. Throws ConvergenceError after maxiter steps.
JoinResult join_by_iteration(const SubgroupSet& y1, const SubgroupSet& y2, double tol = 1e-12, int maxiter = 500);

struct RecoveryResult {
  FiniteMeasure measure;
  SubgroupSet subgroup;  // support of the limit
  SubgroupSet oracle;    // subgroup_generate(supp(mu* * mu))
  int iterations = 0;
  double tv_to_oracle = 0.0;
  bool monotone = true;
};

// Repeated squaring of mu* * mu until the TV step falls below tol.
RecoveryResult support_recovery(const FiniteMeasure& mu, double tol = 1e-12, int maxiter = 200);

// A class of measures given by a membership oracle. declared_closed is the
// caller's assertion that the class is closed under convolution, star and
// weak-* limits.
class PredicateClass {
 public:
  using Oracle = std::function<bool(const FiniteMeasure&)>;

  PredicateClass(std::string name, Oracle oracle, bool declared_closed = true);

  // Mass outside H is exactly zero.
  static PredicateClass support_in(const SubgroupSet& h, std::string name = "");
  // mu(a(g)) = mu(g) within 1e-12 for every automorphism a, given as an
  // index permutation; each one is validated exhaustively.
  static PredicateClass invariant_under(const GroupSpec& spec, std::vector<std::vector<int>> perms,
                                        std::string name = "");
  static PredicateClass intersection(std::vector<PredicateClass> parts);

  const std::string& name() const { return name_; }
  bool declared_closed() const { return closed_; }
  bool contains(const FiniteMeasure& mu) const { return oracle_(mu); }

 private:
  std::string name_;
  Oracle oracle_;
  bool closed_;
};

// (x1, ..., xk) -> (xk, x1, ..., x(k-1)) on a group whose elements are named
// "(x1,...,xk)". Throws DomainError when the names do not have that shape or
// the map is not an automorphism.
std::vector<int> coordinate_shift(const GroupSpec& spec);

struct MaxMinResult {
  SubgroupSet y;
  std::vector<SubgroupSet> members;  // every Y with m_Y in P
};

// Join of every subgroup whose Haar measure lies in P. Throws DomainError
// if P is not declared closed and ClosureViolation if the join is not a
// member itself.
MaxMinResult largest_member_subgroup(const GroupSpec& spec, const PredicateClass& p);

struct CosetCheck {
  bool inner_ok = false;   // supp(nu* * nu) inside Y
  int representative = 0;  // g with supp(nu) in gY
  std::vector<int> coset;  // gY, sorted
  double leak = 0.0;       // nu-mass outside gY
  bool ok() const { return inner_ok && leak == 0.0; }
};

CosetCheck coset_support_check(const FiniteMeasure& nu, const SubgroupSet& y);

// Members of P found among random candidates: sparse random measures, Haar
// measures of random subgroups and uniform measures on their cosets.
std::vector<FiniteMeasure> sample_members(const PredicateClass& p, const GroupSpec& spec, int count,
                                          std::uint64_t seed, std::uint64_t task = 0, int max_draws = 20000);

struct ClosureAudit {
  int probes = 0;
  int members = 0;     // size of the member pool
  int violations = 0;
  std::vector<std::string> failures;
};

// Convolves, stars and mixes random members; every result must stay in P.
ClosureAudit audit_closure(const PredicateClass& p, const GroupSpec& spec, int probes, std::uint64_t seed);

}  // namespace algact
