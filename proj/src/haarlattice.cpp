#include "algact/haarlattice.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "algact/parallel.hpp"

namespace algact {

namespace {

void require_finite(const GroupSpec& spec) {
  if (!spec.is_finite()) throw BackendMismatch("finite group required, got " + spec.id());
}

double min_over(const FiniteMeasure& mu, const SubgroupSet& z) {
  double m = 1.0;
  for (int g : z.elements()) m = std::min(m, mu[g]);
  return m;
}

// Strips a leading "(" and trailing ")" and splits on ','.
std::optional<std::vector<std::string>> tuple_parts(const std::string& name) {
  if (name.size() < 2 || name.front() != '(' || name.back() != ')') return std::nullopt;
  std::vector<std::string> out;
  std::stringstream ss(name.substr(1, name.size() - 2));
  std::string part;
  while (std::getline(ss, part, ',')) out.push_back(part);
  return out;
}

}  // namespace

FiniteMeasure::FiniteMeasure(GroupSpec spec, std::vector<double> p) : spec_(std::move(spec)), p_(std::move(p)) {
  require_finite(spec_);
  if (static_cast<int>(p_.size()) != spec_.order())
    throw DimensionMismatch("measure needs one entry per group element");
  double sum = 0.0;
  for (double v : p_) {
    if (!(v >= 0.0)) throw DomainError("measure entries must be nonnegative");
    sum += v;
  }
  if (std::abs(sum - 1.0) > kMeasureSumTolerance) throw DomainError("measure must sum to 1");
}

FiniteMeasure FiniteMeasure::dirac(const GroupSpec& spec, int g) {
  require_finite(spec);
  std::vector<double> p(spec.order(), 0.0);
  p.at(g) = 1.0;
  return FiniteMeasure(spec, std::move(p));
}

FiniteMeasure FiniteMeasure::uniform_on(const GroupSpec& spec, const std::vector<int>& set) {
  require_finite(spec);
  if (set.empty()) throw DomainError("uniform measure on an empty set");
  std::vector<double> p(spec.order(), 0.0);
  for (int g : set) p.at(g) = 1.0;
  double n = 0.0;
  for (double v : p) n += v;
  for (double& v : p) v /= n;
  return FiniteMeasure(spec, std::move(p));
}

std::vector<int> FiniteMeasure::support() const {
  std::vector<int> out;
  for (int g = 0; g < order(); ++g)
    if (p_[g] > 0.0) out.push_back(g);
  return out;
}

FiniteMeasure convolve_fm(const FiniteMeasure& mu, const FiniteMeasure& nu) {
  require_same(mu.spec(), nu.spec());
  const auto& table = mu.spec().table();
  std::vector<double> out(mu.order(), 0.0);
  for (int x = 0; x < mu.order(); ++x) {
    if (mu[x] == 0.0) continue;
    for (int y = 0; y < nu.order(); ++y)
      if (nu[y] != 0.0) out[table[x][y]] += mu[x] * nu[y];
  }
  double sum = 0.0;
  for (double v : out) sum += v;
  for (double& v : out) v /= sum;
  return FiniteMeasure(mu.spec(), std::move(out));
}

FiniteMeasure star_fm(const FiniteMeasure& mu) {
  std::vector<double> out(mu.order(), 0.0);
  for (int x = 0; x < mu.order(); ++x) out[mu.spec().inverse(Element::index(x)).idx()] = mu[x];
  return FiniteMeasure(mu.spec(), std::move(out));
}

FiniteMeasure haar_of(const SubgroupSet& y) { return FiniteMeasure::uniform_on(y.spec(), y.elements()); }

FiniteMeasure mix_fm(const FiniteMeasure& mu, const FiniteMeasure& nu, double t) {
  require_same(mu.spec(), nu.spec());
  if (!(t >= 0.0 && t <= 1.0)) throw DomainError("mixing weight must lie in [0, 1]");
  std::vector<double> out(mu.order());
  for (int g = 0; g < mu.order(); ++g) out[g] = (1.0 - t) * mu[g] + t * nu[g];
  return FiniteMeasure(mu.spec(), std::move(out));
}

double tv(const FiniteMeasure& mu, const FiniteMeasure& nu) {
  require_same(mu.spec(), nu.spec());
  double s = 0.0;
  for (int g = 0; g < mu.order(); ++g) s += std::abs(mu[g] - nu[g]);
  return 0.5 * s;
}

FiniteMeasure random_measure(const GroupSpec& spec, SiteStream& stream, int max_support) {
  require_finite(spec);
  const int n = spec.order();
  const int size = 1 + static_cast<int>(stream.below(std::min(max_support, n)));
  std::vector<double> p(n, 0.0);
  for (int i = 0; i < size; ++i) p[stream.below(n)] += stream.next_open_double();
  double sum = 0.0;
  for (double v : p) sum += v;
  for (double& v : p) v /= sum;
  return FiniteMeasure(spec, std::move(p));
}

JoinResult join_by_iteration(const SubgroupSet& y1, const SubgroupSet& y2, double tol, int maxiter) {
  require_same(y1.spec(), y2.spec());
  const GroupSpec& spec = y1.spec();
  std::vector<int> gens = y1.elements();
  gens.insert(gens.end(), y2.elements().begin(), y2.elements().end());
  SubgroupSet target = subgroup_generate(spec, std::span<const int>(gens));
  const FiniteMeasure m1 = haar_of(y1);
  const FiniteMeasure step = convolve_fm(convolve_fm(m1, haar_of(y2)), m1);
  FiniteMeasure rho = step;
  bool monotone = true;
  double low = min_over(rho, target);
  for (int it = 1; it <= maxiter; ++it) {
    FiniteMeasure next = convolve_fm(rho, step);
    const double d = tv(next, rho);
    const double m = min_over(next, target);
    if (m < low - 1e-12) monotone = false;
    low = std::max(low, m);
    rho = std::move(next);
    if (d < tol) {
      const double dist = tv(rho, haar_of(target));
      return JoinResult{std::move(rho), it, std::move(target), dist, monotone};
    }
  }
  throw ConvergenceError("join iteration did not settle within " + std::to_string(maxiter) + " steps");
}

RecoveryResult support_recovery(const FiniteMeasure& mu, double tol, int maxiter) {
  const GroupSpec& spec = mu.spec();
  FiniteMeasure rho = convolve_fm(star_fm(mu), mu);
  SubgroupSet oracle = subgroup_generate(spec, std::span<const int>(rho.support()));
  bool monotone = true;
  double low = min_over(rho, oracle);
  for (int it = 1; it <= maxiter; ++it) {
    FiniteMeasure next = convolve_fm(rho, rho);
    const double d = tv(next, rho);
    const double m = min_over(next, oracle);
    if (m < low - 1e-12) monotone = false;
    low = std::max(low, m);
    rho = std::move(next);
    if (d < tol) {
      SubgroupSet found(spec, rho.support());
      const double dist = tv(rho, haar_of(oracle));
      return RecoveryResult{std::move(rho), std::move(found), std::move(oracle), it, dist, monotone};
    }
  }
  throw ConvergenceError("convolution powers did not settle within " + std::to_string(maxiter) + " squarings");
}

PredicateClass::PredicateClass(std::string name, Oracle oracle, bool declared_closed)
    : name_(std::move(name)), oracle_(std::move(oracle)), closed_(declared_closed) {}

PredicateClass PredicateClass::support_in(const SubgroupSet& h, std::string name) {
  if (name.empty()) name = "supportin";
  return PredicateClass(std::move(name), [h](const FiniteMeasure& mu) {
    require_same(mu.spec(), h.spec());
    for (int g = 0; g < mu.order(); ++g)
      if (mu[g] != 0.0 && !h.contains(g)) return false;
    return true;
  });
}

PredicateClass PredicateClass::invariant_under(const GroupSpec& spec, std::vector<std::vector<int>> perms,
                                               std::string name) {
  for (const auto& p : perms)
    if (!is_automorphism(spec, p)) throw DomainError("invariance map is not an automorphism of " + spec.id());
  if (name.empty()) name = "invariant";
  return PredicateClass(std::move(name), [spec, perms = std::move(perms)](const FiniteMeasure& mu) {
    require_same(mu.spec(), spec);
    for (const auto& p : perms)
      for (int g = 0; g < mu.order(); ++g)
        if (std::abs(mu[p[g]] - mu[g]) > kMeasureSumTolerance) return false;
    return true;
  });
}

PredicateClass PredicateClass::intersection(std::vector<PredicateClass> parts) {
  std::string name;
  bool closed = true;
  for (const auto& p : parts) {
    name += (name.empty() ? "" : "&") + p.name();
    closed = closed && p.declared_closed();
  }
  return PredicateClass(
      name,
      [parts = std::move(parts)](const FiniteMeasure& mu) {
        return std::all_of(parts.begin(), parts.end(), [&](const PredicateClass& p) { return p.contains(mu); });
      },
      closed);
}

std::vector<int> coordinate_shift(const GroupSpec& spec) {
  require_finite(spec);
  std::vector<int> perm(spec.order());
  for (int g = 0; g < spec.order(); ++g) {
    auto parts = tuple_parts(spec.name(Element::index(g)));
    if (!parts || parts->size() < 2) throw DomainError("coordinate shift needs elements named (x1,...,xk)");
    std::rotate(parts->rbegin(), parts->rbegin() + 1, parts->rend());
    std::string target = "(";
    for (std::size_t i = 0; i < parts->size(); ++i) target += (i ? "," : "") + (*parts)[i];
    target += ")";
    auto e = spec.find_name(target);
    if (!e) throw DomainError("coordinate shift leaves the group: " + target);
    perm[g] = e->idx();
  }
  if (!is_automorphism(spec, perm)) throw DomainError("coordinate shift is not an automorphism of " + spec.id());
  return perm;
}

MaxMinResult largest_member_subgroup(const GroupSpec& spec, const PredicateClass& p) {
  if (!p.declared_closed()) throw DomainError("predicate " + p.name() + " is not declared closed");
  const auto subgroups = enumerate_subgroups(spec);
  std::vector<char> member(subgroups.size(), 0);
  parallel_for(subgroups.size(), [&](std::size_t i) { member[i] = p.contains(haar_of(subgroups[i])); });
  std::vector<SubgroupSet> members;
  for (std::size_t i = 0; i < subgroups.size(); ++i)
    if (member[i]) members.push_back(subgroups[i]);
  if (members.empty()) throw ClosureViolation("no subgroup has its Haar measure in " + p.name());
  SubgroupSet y = members.front();
  for (const auto& m : members) y = subgroup_join(y, m);
  if (!p.contains(haar_of(y)))
    throw ClosureViolation("join of member subgroups is not a member of " + p.name());
  return MaxMinResult{std::move(y), std::move(members)};
}

CosetCheck coset_support_check(const FiniteMeasure& nu, const SubgroupSet& y) {
  require_same(nu.spec(), y.spec());
  CosetCheck out;
  const FiniteMeasure inner = convolve_fm(star_fm(nu), nu);
  out.inner_ok = true;
  for (int g : inner.support())
    if (!y.contains(g)) out.inner_ok = false;
  const auto supp = nu.support();
  out.representative = supp.front();
  const auto& table = nu.spec().table();
  for (int h : y.elements()) out.coset.push_back(table[out.representative][h]);
  std::sort(out.coset.begin(), out.coset.end());
  for (int g = 0; g < nu.order(); ++g)
    if (nu[g] != 0.0 && !std::binary_search(out.coset.begin(), out.coset.end(), g)) out.leak += nu[g];
  return out;
}

std::vector<FiniteMeasure> sample_members(const PredicateClass& p, const GroupSpec& spec, int count,
                                          std::uint64_t seed, std::uint64_t task, int max_draws) {
  require_finite(spec);
  const auto subgroups = enumerate_subgroups(spec);
  const StreamKey key = StreamKey::derive(seed, task);
  const auto& table = spec.table();
  std::vector<FiniteMeasure> out;
  for (int draw = 0; draw < max_draws && static_cast<int>(out.size()) < count; ++draw) {
    SiteStream stream(key, static_cast<std::uint32_t>(draw), 0);
    const auto kind = stream.below(3);
    std::optional<FiniteMeasure> cand;
    if (kind == 0) {
      cand = random_measure(spec, stream);
    } else {
      const SubgroupSet& h = subgroups[stream.below(subgroups.size())];
      if (kind == 1) {
        cand = haar_of(h);
      } else {
        const int g = static_cast<int>(stream.below(spec.order()));
        std::vector<int> coset;
        for (int x : h.elements()) coset.push_back(table[g][x]);
        cand = FiniteMeasure::uniform_on(spec, coset);
      }
    }
    if (p.contains(*cand)) out.push_back(std::move(*cand));
  }
  return out;
}

ClosureAudit audit_closure(const PredicateClass& p, const GroupSpec& spec, int probes, std::uint64_t seed) {
  ClosureAudit audit;
  const auto pool = sample_members(p, spec, 32, seed, 1);
  audit.members = static_cast<int>(pool.size());
  if (pool.empty()) return audit;
  const StreamKey key = StreamKey::derive(seed, 2);
  for (int i = 0; i < probes; ++i) {
    SiteStream stream(key, static_cast<std::uint32_t>(i), 0);
    const FiniteMeasure& a = pool[stream.below(pool.size())];
    const FiniteMeasure& b = pool[stream.below(pool.size())];
    const double t = stream.next_double();
    ++audit.probes;
    const auto record = [&](bool ok, const char* what) {
      if (ok) return;
      ++audit.violations;
      audit.failures.push_back("probe " + std::to_string(i) + ": " + what);
    };
    record(p.contains(convolve_fm(a, b)), "convolution left the class");
    record(p.contains(star_fm(a)), "star left the class");
    record(p.contains(mix_fm(a, b, t)), "mixture left the class");
  }
  return audit;
}

}  // namespace algact
