#include "algact/cli.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <memory>
#include <optional>
#include <sstream>

#include "CLI11.hpp"

#include "algact/annihilator.hpp"
#include "algact/haarlattice.hpp"
#include "algact/measures.hpp"
#include "algact/parallel.hpp"
#include "algact/report.hpp"
#include "algact/ring_expr.hpp"
#include "algact/spectral.hpp"
#include "algact/theta.hpp"

namespace algact::cli {

namespace {

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw DomainError("cannot read " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

// "@path" reads the file, anything else is literal.
std::string load_arg(const std::string& arg) { return !arg.empty() && arg[0] == '@' ? read_file(arg.substr(1)) : arg; }

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

// Splits on `sep` outside parentheses and brackets.
std::vector<std::string> split_depth0(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  int depth = 0;
  for (char c : s) {
    if (c == '(' || c == '[') ++depth;
    if (c == ')' || c == ']') --depth;
    if (c == sep && depth == 0) {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(trim(cur));
  return out;
}

GroupSpec parse_group(const std::string& arg) {
  if (!arg.empty() && arg[0] == '@') return GroupSpec::from_json_text(read_file(arg.substr(1)), arg.substr(1));
  return GroupSpec::builtin(arg);
}

Element parse_element_name(const GroupSpec& spec, const std::string& name) {
  if (auto e = spec.find_name(name)) return *e;
  throw ParseError("unknown element name '" + name + "' in " + spec.id(), name, 0);
}

std::vector<int> parse_element_list(const GroupSpec& spec, const std::string& text) {
  std::vector<int> out;
  for (const auto& part : split_depth0(text, ';')) {
    if (part.empty()) continue;
    for (const auto& name : split_depth0(part, ' ')) {
      if (!name.empty()) out.push_back(parse_element_name(spec, name).idx());
    }
  }
  return out;
}

// One alpha per line of a file ("@path") or per '|' separated chunk. Each
// alpha is a row "a1, a2, ..." of ring expressions.
std::vector<std::string> alpha_texts(const std::vector<std::string>& args) {
  std::vector<std::string> out;
  for (const auto& a : args) {
    if (!a.empty() && a[0] == '@') {
      std::istringstream ss(read_file(a.substr(1)));
      std::string line;
      while (std::getline(ss, line)) {
        line = trim(line);
        if (!line.empty() && line[0] != '#') out.push_back(line);
      }
    } else {
      for (const auto& part : split_depth0(a, '|'))
        if (!part.empty()) out.push_back(part);
    }
  }
  return out;
}

VectorOverG parse_alpha(const std::string& text, const GroupSpec& spec) {
  return as_vector(parse_ring_matrix(text, spec));
}

struct XiSource {
  RingMatrix xi;
  std::string origin;
  double truncation_mass = 0.0;
};

// "inverse:<f>" is the truncated l2 formal inverse of f; anything else is a
// ring matrix.
XiSource parse_xi(const std::string& arg, const GroupSpec& spec, int grid) {
  const std::string text = trim(load_arg(arg));
  const std::string prefix = "inverse:";
  if (text.rfind(prefix, 0) == 0) {
    const RingMatrix f = parse_ring_matrix(text.substr(prefix.size()), spec);
    const int L = grid > 0 ? grid : default_grid(std::max(1, spec.rank()));
    const FormalInverse fi = l2_formal_inverse(f, L);
    return {fi.xi, "l2 formal inverse of " + format_ring_matrix(f), fi.truncation_mass};
  }
  return {parse_ring_matrix(text, spec), "literal", 0.0};
}

Json element_names(const GroupSpec& spec, const std::vector<int>& idx) {
  Json out = Json::array();
  for (int i : idx) out.push_back(spec.name(Element::index(i)));
  return out;
}

Json measure_json(const FiniteMeasure& mu) {
  Json out = Json::array();
  for (int g = 0; g < mu.order(); ++g) out.push_back(mu[g]);
  return out;
}

struct Checks {
  Json list = Json::array();
  bool failed = false;
  bool inconclusive = false;

  void add(const std::string& name, bool pass, const std::string& provenance, Json detail = Json()) {
    Json c;
    c["name"] = name;
    c["pass"] = pass;
    c["provenance"] = provenance;
    if (!detail.is_null()) c["detail"] = std::move(detail);
    list.push_back(std::move(c));
    if (!pass) failed = true;
  }
  int code() const { return failed ? kCheckFailed : inconclusive ? kInconclusive : kPass; }
};

struct Common {
  std::uint64_t seed = 0;
  std::string out = "-";
  std::string format = "json";
  int threads = 0;
};

int finish(Json report, Checks& checks, const Common& common, std::ostream& out) {
  report["checks"] = checks.list;
  const int code = checks.code();
  report["status"] = code == kPass ? "pass" : code == kInconclusive ? "inconclusive" : "fail";
  const std::string text = common.format == "csv" ? dump_csv(report) : dump_json(report);
  if (common.out == "-") {
    out << text;
    out.flush();
  } else {
    write_text(common.out, text);
  }
  return code;
}

// Predicate grammar: term ('&' term)*, term := 'supportin:' arg |
// 'invariant:' arg. supportin takes '@file.json' / 'file.json' with
// {"generators": [...]} or {"elements": [...]}, or generator names
// separated by ';'. invariant takes 'shift' or a JSON file with
// {"perms": [[...], ...]}.
PredicateClass parse_predicate(const std::string& text, const GroupSpec& spec) {
  std::vector<PredicateClass> parts;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = pos;
    int depth = 0;
    while (end < text.size() && !(text[end] == '&' && depth == 0)) {
      if (text[end] == '(' || text[end] == '[') ++depth;
      if (text[end] == ')' || text[end] == ']') --depth;
      ++end;
    }
    const std::string term = text.substr(pos, end - pos);
    const auto colon = term.find(':');
    if (colon == std::string::npos) throw ParseError("expected 'supportin:' or 'invariant:'", text, pos);
    const std::string kind = trim(term.substr(0, colon));
    std::string arg = trim(term.substr(colon + 1));
    const bool is_file = (!arg.empty() && arg[0] == '@') ||
                         (arg.size() > 5 && arg.compare(arg.size() - 5, 5, ".json") == 0);
    const std::string path = !arg.empty() && arg[0] == '@' ? arg.substr(1) : arg;
    if (kind == "supportin") {
      std::vector<int> gens;
      if (is_file) {
        const Json j = Json::parse(read_file(path));
        const Json& list = j.contains("generators") ? j["generators"] : j.at("elements");
        for (const auto& e : list)
          gens.push_back(e.is_number() ? e.get<int>() : parse_element_name(spec, e.get<std::string>()).idx());
      } else {
        gens = parse_element_list(spec, arg);
      }
      parts.push_back(PredicateClass::support_in(subgroup_generate(spec, std::span<const int>(gens)),
                                                 "supportin:" + arg));
    } else if (kind == "invariant") {
      std::vector<std::vector<int>> perms;
      if (arg == "shift") {
        perms.push_back(coordinate_shift(spec));
      } else if (is_file) {
        const Json j = Json::parse(read_file(path));
        for (const auto& p : j.at("perms")) perms.push_back(p.get<std::vector<int>>());
      } else {
        throw ParseError("invariant: expects 'shift' or a JSON file", text, pos + colon + 1);
      }
      parts.push_back(PredicateClass::invariant_under(spec, std::move(perms), "invariant:" + arg));
    } else {
      throw ParseError("unknown predicate '" + kind + "'", text, pos);
    }
    pos = end + 1;
  }
  if (parts.size() == 1) return parts.front();
  return PredicateClass::intersection(std::move(parts));
}

std::optional<FiniteMeasure> parse_finite_measure(const std::string& text, const GroupSpec& spec) {
  std::vector<double> p(spec.order(), 0.0);
  double sum = 0.0;
  for (const auto& part : split_depth0(text, ',')) {
    if (part.empty()) continue;
    const auto colon = part.rfind(':');
    const std::string name = trim(colon == std::string::npos ? part : part.substr(0, colon));
    const double w = colon == std::string::npos ? 1.0 : to_double(parse_rational(trim(part.substr(colon + 1))));
    if (!(w >= 0.0)) throw DomainError("weights must be nonnegative");
    p[parse_element_name(spec, name).idx()] += w;
    sum += w;
  }
  if (!(sum > 0.0)) throw DomainError("measure has no mass");
  for (double& v : p) v /= sum;
  return FiniteMeasure(spec, std::move(p));
}

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--seed", c.seed, "Random seed");
  sub->add_option("--out", c.out, "Report path, '-' for standard output");
  sub->add_option("--format", c.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  sub->add_option("--threads", c.threads, "Worker threads (results do not depend on it)");
}

Json config_of(const CLI::App* sub) {
  Json cfg;
  for (const CLI::Option* opt : sub->get_options()) {
    const std::string name = opt->get_lnames().empty() ? "" : opt->get_lnames().front();
    if (name.empty() || name == "help" || name == "threads") continue;
    const auto results = opt->results();
    if (results.empty()) {
      cfg[name] = nullptr;
    } else if (results.size() == 1) {
      cfg[name] = results.front();
    } else {
      cfg[name] = results;
    }
  }
  return cfg;
}

}  // namespace

std::vector<double> parse_number_list(const std::string& text) {
  const auto parse_one = [&](const std::string& s) {
    if (s == "inf") return std::numeric_limits<double>::infinity();
    try {
      std::size_t used = 0;
      const double v = std::stod(s, &used);
      if (used != s.size()) throw std::invalid_argument(s);
      return v;
    } catch (const std::exception&) {
      throw ParseError("expected a number, got '" + s + "'", text, text.find(s));
    }
  };
  std::vector<double> out;
  const auto parts = split_depth0(text, ',');
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (parts[i] != "...") {
      out.push_back(parse_one(parts[i]));
      continue;
    }
    if (out.size() < 2 || i + 1 >= parts.size())
      throw ParseError("'...' needs two terms before and one after", text, text.find("..."));
    const double last = parse_one(parts[i + 1]);
    const double a = out[out.size() - 2], b = out.back();
    bool geometric = false;
    if (out.size() >= 3) {
      const double z = out[out.size() - 3];
      geometric = z != 0.0 && a != 0.0 && std::abs(b / a - a / z) < 1e-12 && b / a > 0.0 && b / a != 1.0;
    } else if (a > 0.0 && b > 0.0) {
      const double up = b / a, down = a / b;
      geometric = (up >= 2.0 && std::floor(up) == up) || (down >= 2.0 && std::floor(down) == down);
    }
    const bool increasing = b > a;
    if (b == a || (increasing ? last < b : last > b))
      throw ParseError("'...' needs a monotone list heading towards its last term", text, text.find("..."));
    const auto before = [&](double v, double slack) { return increasing ? v < last - slack : v > last + slack; };
    if (geometric) {
      const double r = b / a;
      for (double v = b * r; before(v, 1e-12 * std::abs(last)); v *= r) out.push_back(v);
    } else {
      const double d = b - a;
      for (double v = b + d; before(v, 1e-9 * std::abs(d)); v += d) out.push_back(v);
    }
    if (out.back() != last) out.push_back(last);
    ++i;
  }
  return out;
}

namespace {

int cmd_approx_inverse(const CLI::App* sub, const Common& c, const std::string& f_text, const std::string& group,
                       const std::string& k_text, int grid, std::optional<int> window, bool emit_xi,
                       std::ostream& out) {
  const GroupSpec spec = parse_group(group);
  const RingMatrix f = parse_ring_matrix(load_arg(f_text), spec);
  const int L = grid > 0 ? grid : default_grid(std::max(1, spec.rank()));
  const SpectralCalculus calc(f, L);
  const InjectivityReport inj = injectivity_report(f, L);
  Json report = report_envelope("approx-inverse", c.seed, config_of(sub));
  Json rows = Json::array();
  Checks checks;
  double worst_op = 0.0, worst_mass = 0.0;
  for (double k : parse_number_list(k_text)) {
    const ApproxInverse ai = calc.approximate_inverse(k, window, false);
    Json row;
    row["k"] = k;
    row["window"] = ai.window;
    row["residual_left"] = ai.residual_left;
    row["residual_right"] = ai.residual_right;
    row["residual_left_truncated"] = ai.residual_left_truncated;
    row["op_norm_bound"] = ai.op_norm_bound;
    row["xi_truncation_mass"] = ai.truncation_mass;
    if (emit_xi) row["xi"] = format_ring_matrix(ai.xi);
    rows.push_back(std::move(row));
    worst_op = std::max(worst_op, ai.op_norm_bound);
    worst_mass = std::max(worst_mass, ai.truncation_mass);
  }
  report["injectivity"] = {{"grid", inj.grid},
                           {"min_singular", inj.min_singular},
                           {"zero_fraction", inj.zero_fraction},
                           {"zero_fraction_refined", inj.zero_fraction_refined},
                           {"kernel_dim", inj.kernel_dim},
                           {"injective", inj.injective},
                           {"positive_dim_warning", inj.positive_dim_warning}};
  report["tables"]["rows"] = rows;
  checks.add("op_norm_bounded", worst_op <= 1.0 + 1e-6,
             "max over the symbol grid of the spectral norm of xi_k^ f^ vs the bound 1", {{"max", worst_op}});
  checks.add("window_mass", worst_mass <= kWindowMassFraction,
             "discarded share of |xi_k|_2^2 outside the window vs 1e-6", {{"max", worst_mass}});
  return finish(std::move(report), checks, c, out);
}

int cmd_fourier_check(const CLI::App* sub, const Common& c, const std::string& xi_text, const std::string& group,
                      const std::string& nu_text, const std::vector<std::string>& alpha_args, std::size_t samples,
                      std::optional<int> radius, int grid, double tol, std::ostream& out) {
  const GroupSpec spec = parse_group(group);
  const XiSource src = parse_xi(xi_text, spec, grid);
  const BaseMeasure nu = parse_measure(nu_text);
  std::vector<VectorOverG> alphas;
  for (const auto& t : alpha_texts(alpha_args)) alphas.push_back(parse_alpha(t, spec));
  if (alphas.empty()) throw DomainError("fourier-check needs at least one --alpha");
  int r = 0;
  for (const auto& a : alphas)
    for (int l = 0; l < a.components(); ++l) r = std::max(r, support_radius(a[l]));
  const ThetaPlan plan(src.xi, nu, enumerate_ball(spec, radius.value_or(r)));
  const SampleBatch batch = theta_sample(plan, samples, c.seed);
  Json report = report_envelope("fourier-check", c.seed, config_of(sub));
  report["xi"] = {{"origin", src.origin}, {"truncation_mass", src.truncation_mass}};
  Json rows = Json::array();
  std::size_t passed = 0;
  for (std::size_t i = 0; i < alphas.size(); ++i) {
    const Estimate est = empirical_fourier(batch, alphas[i]);
    const ProductValue an = product_formula(src.xi, alphas[i], nu, tol);
    const double diff = std::abs(est.value - an.value);
    const bool pass = diff <= 3.0 * est.stderr_ + an.tail_bound + 1e-9;
    passed += pass;
    Json row;
    row["alpha"] = vector_json(alphas[i]);
    row["empirical"] = complex_json(est.value);
    row["stderr"] = est.stderr_;
    row["analytic"] = complex_json(an.value);
    row["tail_bound"] = an.tail_bound;
    row["abs_error"] = diff;
    row["pass"] = pass;
    rows.push_back(std::move(row));
  }
  report["tables"]["rows"] = rows;
  Checks checks;
  const double rate = static_cast<double>(passed) / static_cast<double>(alphas.size());
  checks.add("product_formula", rate >= 0.95,
             "Monte Carlo mean of exp(2 pi i <Theta(x), alpha>) vs prod_g nu^((r(xi) alpha)(g)); "
             "row passes when |diff| <= 3 stderr + tail_bound + 1e-9",
             {{"pass_rate", rate}});
  return finish(std::move(report), checks, c, out);
}

Json membership_json(const MembershipResult& m) {
  Json j;
  j["verdict"] = to_string(m.verdict);
  j["reason"] = m.reason;
  j["alpha_norm"] = m.alpha_norm;
  Json norms = Json::array();
  for (const auto& r : m.rows) norms.push_back({{"k", r.k}, {"norm", r.norm}});
  j["norms"] = norms;
  j["frac_deviation"] = m.frac_deviation;
  j["integrality_tol"] = m.integrality_tol;
  if (m.limit) j["limit"] = vector_json(*m.limit);
  return j;
}

int cmd_witness(const CLI::App* sub, const Common& c, const std::string& f_text, const std::string& group,
                const std::vector<std::string>& alpha_args, const std::string& k_text, const std::string& delta_text,
                const std::string& eta_text, int grid, double tol, std::ostream& out) {
  const GroupSpec spec = parse_group(group);
  const RingMatrix f = parse_ring_matrix(load_arg(f_text), spec);
  const int L = grid > 0 ? grid : default_grid(std::max(1, spec.rank()));
  const SpectralCalculus calc(f, L);
  const BaseMeasure eta =
      parse_measure(eta_text.empty() ? "geom2^" + std::to_string(f.rows()) : eta_text);
  std::vector<VectorOverG> alphas;
  for (const auto& t : alpha_texts(alpha_args)) alphas.push_back(parse_alpha(t, spec));
  const WitnessReport wr =
      claims_report(calc, eta, alphas, parse_number_list(k_text), parse_number_list(delta_text), tol);
  Json report = report_envelope("witness", c.seed, config_of(sub));
  Json rows = Json::array();
  for (const auto& r : wr.rows) {
    rows.push_back({{"alpha_index", r.alpha_index},
                    {"k", r.k},
                    {"delta", r.delta},
                    {"value", complex_json(r.value)},
                    {"abs", std::abs(r.value)},
                    {"tail_bound", r.tail_bound},
                    {"expected", r.expected}});
  }
  Json summary = Json::array();
  Checks checks;
  for (std::size_t i = 0; i < wr.alphas.size(); ++i) {
    const auto& a = wr.alphas[i];
    summary.push_back({{"alpha_index", i},
                       {"alpha", vector_json(a.alpha)},
                       {"claim", a.claim},
                       {"verdict", to_string(a.membership.verdict)},
                       {"pass", a.pass},
                       {"margin", a.margin},
                       {"max_error", a.max_error}});
    report["membership"].push_back(membership_json(a.membership));
    if (a.claim == "inconclusive") {
      checks.inconclusive = true;
      continue;
    }
    checks.add("alpha_" + std::to_string(i) + "_" + a.claim, a.pass,
               a.claim == "claim1"
                   ? "witness value vs exp(-delta |beta|^2) for the integral limit beta; tolerance 1e-6 + tail"
                   : "witness modulus at the largest k vs 1");
  }
  report["tables"]["rows"] = rows;
  report["tables"]["alphas"] = summary;
  return finish(std::move(report), checks, c, out);
}

int cmd_strong_witness(const CLI::App* sub, const Common& c, const std::string& xi_text, const std::string& group,
                       const std::vector<std::string>& alpha_args, const std::string& n_text, double tol,
                       double budget, int grid, std::ostream& out) {
  const GroupSpec spec = parse_group(group);
  const XiSource src = parse_xi(xi_text, spec, grid);
  std::vector<VectorOverG> alphas;
  for (const auto& t : alpha_texts(alpha_args)) alphas.push_back(parse_alpha(t, spec));
  std::vector<int> ns;
  for (double v : parse_number_list(n_text)) {
    if (v < 0 || v != std::floor(v)) throw DomainError("n must be a nonnegative integer");
    ns.push_back(static_cast<int>(v));
  }
  const StrongReport sr = strong_witness_check(src.xi, ns, alphas, tol, budget);
  Json report = report_envelope("strong-witness", c.seed, config_of(sub));
  report["xi"] = {{"origin", src.origin}, {"truncation_mass", src.truncation_mass}};
  Json rows = Json::array();
  for (const auto& r : sr.rows)
    rows.push_back({{"alpha_index", r.alpha_index},
                    {"n", r.n},
                    {"value", complex_json(r.value)},
                    {"abs", std::abs(r.value)},
                    {"bound", r.bound}});
  Json summary = Json::array();
  Checks checks;
  for (std::size_t i = 0; i < sr.alphas.size(); ++i) {
    const auto& a = sr.alphas[i];
    summary.push_back({{"alpha_index", i},
                       {"alpha", vector_json(a.alpha)},
                       {"annihilates", a.annihilates},
                       {"max_frac_deviation", a.max_frac_deviation},
                       {"pass", a.pass}});
    checks.add("alpha_" + std::to_string(i), a.pass,
               a.annihilates ? "product of uniformint(n) transforms vs 1 on the annihilator"
                             : "product of uniformint(n) transforms vs the single-site Dirichlet bound");
  }
  report["tables"]["rows"] = rows;
  report["tables"]["alphas"] = summary;
  return finish(std::move(report), checks, c, out);
}

int cmd_annihilator(const CLI::App* sub, const Common& c, const std::string& xi_text, const std::string& group,
                    const std::vector<std::string>& alpha_args, double tol, double budget, bool exact, int grid,
                    std::ostream& out) {
  const GroupSpec spec = parse_group(group);
  Json report = report_envelope("annihilator", c.seed, config_of(sub));
  Json rows = Json::array();
  const auto texts = alpha_texts(alpha_args);
  if (exact) {
    const ExactRingMatrix xi = parse_ring_matrix_exact(load_arg(xi_text), spec);
    for (const auto& t : texts) {
      const ExactVector a = as_vector(parse_ring_matrix_exact(t, spec));
      const ExactAnnihilatorResult r = annihilator_test_exact(xi, a);
      rows.push_back({{"alpha", t},
                      {"member", r.is_member},
                      {"max_frac_deviation", r.max_frac_deviation.str()},
                      {"mode", "exact"}});
    }
  } else {
    const XiSource src = parse_xi(xi_text, spec, grid);
    for (const auto& t : texts) {
      const AnnihilatorResult r = annihilator_test(src.xi, parse_alpha(t, spec), tol, budget);
      rows.push_back({{"alpha", t},
                      {"member", r.is_member},
                      {"max_frac_deviation", r.max_frac_deviation},
                      {"threshold", r.threshold},
                      {"image", vector_json(r.image)},
                      {"mode", "float"}});
    }
  }
  report["tables"]["rows"] = rows;
  Checks checks;
  return finish(std::move(report), checks, c, out);
}

int cmd_ideal_test(const CLI::App* sub, const Common& c, const std::string& f_text, const std::string& group,
                   const std::vector<std::string>& alpha_args, const std::string& k_text, int grid,
                   std::ostream& out) {
  const GroupSpec spec = parse_group(group);
  const RingMatrix f = parse_ring_matrix(load_arg(f_text), spec);
  const int L = grid > 0 ? grid : default_grid(std::max(1, spec.rank()));
  const SpectralCalculus calc(f, L);
  const auto ks = parse_number_list(k_text);
  Json report = report_envelope("ideal-test", c.seed, config_of(sub));
  Json rows = Json::array();
  Checks checks;
  for (const auto& t : alpha_texts(alpha_args)) {
    const MembershipResult m = ideal_membership(calc, parse_alpha(t, spec), ks);
    Json row = membership_json(m);
    row["alpha"] = t;
    rows.push_back(std::move(row));
    if (m.verdict == Membership::Inconclusive) checks.inconclusive = true;
  }
  report["tables"]["rows"] = rows;
  return finish(std::move(report), checks, c, out);
}

int cmd_haar_join(const CLI::App* sub, const Common& c, const std::string& group, const std::string& y1_text,
                  const std::string& y2_text, double tol, int maxiter, std::ostream& out) {
  const GroupSpec spec = parse_group(group);
  const auto g1 = parse_element_list(spec, y1_text);
  const auto g2 = parse_element_list(spec, y2_text);
  const SubgroupSet y1 = subgroup_generate(spec, std::span<const int>(g1));
  const SubgroupSet y2 = subgroup_generate(spec, std::span<const int>(g2));
  const JoinResult jr = join_by_iteration(y1, y2, tol, maxiter);
  Json report = report_envelope("haar-join", c.seed, config_of(sub));
  report["y1"] = element_names(spec, y1.elements());
  report["y2"] = element_names(spec, y2.elements());
  report["target"] = element_names(spec, jr.target.elements());
  report["iterations"] = jr.iterations;
  report["tv_to_target"] = jr.tv_to_target;
  report["measure"] = measure_json(jr.measure);
  Json rows = Json::array();
  for (int g = 0; g < spec.order(); ++g)
    rows.push_back({{"element", spec.name(Element::index(g))},
                    {"probability", jr.measure[g]},
                    {"in_target", jr.target.contains(g)}});
  report["tables"]["measure"] = std::move(rows);
  Checks checks;
  checks.add("tv_to_closure", jr.tv_to_target < 1e-9,
             "TV between the iterated measure and the uniform measure on the breadth-first closure of Y1 u Y2");
  checks.add("monotone", jr.monotone, "minimum mass over the target never decreases (1e-12 slack)");
  return finish(std::move(report), checks, c, out);
}

int cmd_support_recovery(const CLI::App* sub, const Common& c, const std::string& group,
                         const std::vector<std::string>& mu_texts, int random_count, double tol, int maxiter,
                         std::ostream& out) {
  const GroupSpec spec = parse_group(group);
  std::vector<FiniteMeasure> mus;
  for (const auto& t : mu_texts) mus.push_back(*parse_finite_measure(t, spec));
  const StreamKey key = StreamKey::derive(c.seed, 0);
  for (int i = 0; i < random_count; ++i) {
    SiteStream stream(key, static_cast<std::uint32_t>(i), 0);
    mus.push_back(random_measure(spec, stream));
  }
  if (mus.empty()) throw DomainError("support-recovery needs --mu or --random");
  std::vector<std::optional<RecoveryResult>> results(mus.size());
  parallel_for(mus.size(), [&](std::size_t i) { results[i] = support_recovery(mus[i], tol, maxiter); });
  Json report = report_envelope("support-recovery", c.seed, config_of(sub));
  Json rows = Json::array();
  bool all_match = true, all_close = true, all_monotone = true;
  for (std::size_t i = 0; i < mus.size(); ++i) {
    const RecoveryResult& r = *results[i];
    const bool match = r.subgroup == r.oracle;
    all_match = all_match && match;
    all_close = all_close && r.tv_to_oracle < 1e-9;
    all_monotone = all_monotone && r.monotone;
    rows.push_back({{"index", i},
                    {"support", element_names(spec, mus[i].support())},
                    {"recovered", element_names(spec, r.subgroup.elements())},
                    {"oracle", element_names(spec, r.oracle.elements())},
                    {"match", match},
                    {"iterations", r.iterations},
                    {"tv_to_oracle", r.tv_to_oracle}});
  }
  report["tables"]["rows"] = rows;
  Checks checks;
  checks.add("subgroup_match", all_match, "support of the limit vs closure of supp(mu* * mu)");
  checks.add("tv_to_haar", all_close, "TV between the limit and the uniform measure on the closure, < 1e-9");
  checks.add("monotone", all_monotone, "minimum mass over the closure never decreases (1e-12 slack)");
  return finish(std::move(report), checks, c, out);
}

int cmd_maxmin(const CLI::App* sub, const Common& c, const std::string& group, const std::string& predicate,
               int probes, std::ostream& out) {
  const GroupSpec spec = parse_group(group);
  const PredicateClass p = parse_predicate(predicate, spec);
  const MaxMinResult mm = largest_member_subgroup(spec, p);
  const ClosureAudit audit = audit_closure(p, spec, probes, c.seed);
  const auto members = sample_members(p, spec, probes, c.seed, 3);
  Json report = report_envelope("maxmin", c.seed, config_of(sub));
  report["predicate"] = p.name();
  report["y"] = element_names(spec, mm.y.elements());
  Json certificate = Json::array();
  for (const auto& m : mm.members) certificate.push_back(element_names(spec, m.elements()));
  report["certificate"] = certificate;
  report["audit"] = {{"probes", audit.probes},
                     {"members", audit.members},
                     {"violations", audit.violations},
                     {"failures", audit.failures}};
  Json rows = Json::array();
  bool all_ok = true;
  for (std::size_t i = 0; i < members.size(); ++i) {
    const CosetCheck cc = coset_support_check(members[i], mm.y);
    all_ok = all_ok && cc.ok();
    rows.push_back({{"index", i},
                    {"support", element_names(spec, members[i].support())},
                    {"inner_ok", cc.inner_ok},
                    {"coset", element_names(spec, cc.coset)},
                    {"leak", cc.leak}});
  }
  report["tables"]["probes"] = rows;
  bool upper = true;
  for (const auto& m : mm.members) upper = upper && m.is_subset_of(mm.y);
  Checks checks;
  checks.add("upper_bound", upper, "every member subgroup is contained in Y");
  checks.add("closure_audit", audit.violations == 0,
             "random convolutions, stars and mixtures of members stay in the class");
  checks.add("coset_support", all_ok, "supp(nu* * nu) inside Y and zero mass outside one coset of Y");
  return finish(std::move(report), checks, c, out);
}

int cmd_nonextend(const CLI::App* sub, const Common& c, const std::string& nu_text, double p, int terms,
                  std::ostream& out) {
  const BaseMeasure nu = parse_measure(nu_text);
  const NonExtendReport r = nonextendability_witness(nu, p, terms);
  Json report = report_envelope("nonextend", c.seed, config_of(sub));
  report["coordinate"] = r.coordinate;
  Json rows = Json::array();
  for (const auto& row : r.rows)
    rows.push_back({{"n", row.n},
                    {"t", row.t},
                    {"set_size", row.set_size},
                    {"fourier_term", row.fourier_term},
                    {"fourier_partial", row.fourier_partial},
                    {"p_term", row.p_term},
                    {"p_partial", row.p_partial}});
  report["tables"]["rows"] = rows;
  Checks checks;
  const double fsum = r.rows.empty() ? 0.0 : r.rows.back().fourier_partial;
  const double psum = r.rows.empty() ? 0.0 : r.rows.back().p_partial;
  checks.add("fourier_partial_diverges", fsum >= terms - 1e-9,
             "sum of |1 - nu^(t_n e_j)| |E_n| vs N (each term is at least 1)", {{"value", fsum}});
  checks.add("p_partial_bounded", psum <= 2.0, "sum of |t_n|^p |E_n| vs 2", {{"value", psum}});
  return finish(std::move(report), checks, c, out);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Numerical experiments on algebraic actions of countable groups", "algact"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kToolVersion));

  Common common;
  std::string f_text, xi_text, group = "Z^1", delta_text = "0.2,0.1,0.05", eta_text, nu_text;
  std::string n_text = "0,1,2,4,8,16", y1, y2, predicate;
  std::vector<std::string> alphas, mus;
  std::optional<std::string> k_text;
  std::optional<int> maxiter;
  std::optional<double> tol;
  int grid = 0, terms = 10, probes = 100, random_count = 0;
  std::optional<int> window, radius;
  std::size_t samples = 100000;
  double budget = 0.0, p = 3.0;
  bool emit_xi = false, exact = false;

  auto* ai = app.add_subcommand("approx-inverse", "Spectral approximate inverses xi_k of f");
  ai->add_option("--f", f_text, "Ring matrix f")->required();
  ai->add_option("--group", group);
  ai->add_option("--k", k_text, "Cutoffs, default 1,2,4,...,256");
  ai->add_option("--grid", grid, "Symbol grid side");
  ai->add_option("--window", window, "Truncation radius of xi_k");
  ai->add_flag("--emit-xi", emit_xi, "Include xi_k in the report");
  add_common(ai, common);

  auto* fc = app.add_subcommand("fourier-check", "Monte Carlo check of the Theta pushforward transform");
  fc->add_option("--xi", xi_text, "Ring matrix, @file or inverse:<f>")->required();
  fc->add_option("--group", group);
  fc->add_option("--nu", nu_text, "Base measure")->default_val("uniformint(1)");
  fc->add_option("--alpha,--alphas", alphas, "alpha rows, '|' separated or @file")->required();
  fc->add_option("--samples", samples)->check(CLI::PositiveNumber);
  fc->add_option("--window", radius, "Max-norm radius of the sampled window");
  fc->add_option("--grid", grid, "Grid for inverse:<f>");
  fc->add_option("--tol", tol, "Tail tolerance of the product formula, default 1e-9");
  add_common(fc, common);

  auto* wi = app.add_subcommand("witness", "Witness-measure Fourier limits for f");
  wi->add_option("--f", f_text)->required();
  wi->add_option("--group", group);
  wi->add_option("--alpha,--alphas", alphas)->required();
  wi->add_option("--k", k_text, "Cutoffs, default 2,4,...,256");
  wi->add_option("--delta", delta_text);
  wi->add_option("--eta", eta_text, "Base measure (default geom2^m)");
  wi->add_option("--grid", grid);
  wi->add_option("--tol", tol, "Tail tolerance of the product formula, default 1e-12");
  add_common(wi, common);

  auto* sw = app.add_subcommand("strong-witness", "uniformint(n) pushforward transforms under Theta_{xi*}");
  sw->add_option("--xi", xi_text)->required();
  sw->add_option("--group", group);
  sw->add_option("--alpha,--alphas", alphas)->required();
  sw->add_option("--n", n_text);
  sw->add_option("--tol", tol, "Integrality tolerance, default 1e-6");
  sw->add_option("--budget", budget, "Extra integrality slack for a truncated xi");
  sw->add_option("--grid", grid);
  add_common(sw, common);

  auto* an = app.add_subcommand("annihilator", "Is r(xi*) alpha integral?");
  an->add_option("--xi", xi_text)->required();
  an->add_option("--group", group);
  an->add_option("--alpha,--alphas", alphas)->required();
  an->add_option("--tol", tol, "Integrality tolerance, default 1e-6");
  an->add_option("--budget", budget);
  an->add_flag("--exact", exact, "Rational arithmetic");
  an->add_option("--grid", grid);
  add_common(an, common);

  auto* it = app.add_subcommand("ideal-test", "Classify alpha against the ideal r(f) Z(G)^n");
  it->add_option("--f", f_text)->required();
  it->add_option("--group", group);
  it->add_option("--alpha,--alphas", alphas)->required();
  it->add_option("--k", k_text, "Cutoffs, default 2,4,...,256");
  it->add_option("--grid", grid);
  add_common(it, common);

  auto* hj = app.add_subcommand("haar-join", "Haar measure of Y1 v Y2 by convolution powers");
  hj->add_option("--group", group)->required();
  hj->add_option("--y1", y1, "Generator names, ';' separated")->required();
  hj->add_option("--y2", y2)->required();
  hj->add_option("--tol", tol, "TV step tolerance, default 1e-12");
  hj->add_option("--maxiter", maxiter, "Default 500");
  add_common(hj, common);

  auto* sr = app.add_subcommand("support-recovery", "Closed subgroup generated by supp(mu* * mu)");
  sr->add_option("--group", group)->required();
  sr->add_option("--mu", mus, "name:weight,... (repeatable)");
  sr->add_option("--random", random_count, "Number of random measures")->check(CLI::NonNegativeNumber);
  sr->add_option("--tol", tol, "TV step tolerance, default 1e-12");
  sr->add_option("--maxiter", maxiter, "Default 200");
  add_common(sr, common);

  auto* mm = app.add_subcommand("maxmin", "Largest subgroup whose Haar measure lies in a predicate class");
  mm->add_option("--group", group)->required();
  mm->add_option("--predicate", predicate)->required();
  mm->add_option("--probes", probes)->check(CLI::NonNegativeNumber);
  add_common(mm, common);

  auto* ne = app.add_subcommand("nonextend", "Witness that Theta has no l^p extension");
  ne->add_option("--nu", nu_text)->required();
  ne->add_option("--p", p);
  ne->add_option("--N,--terms", terms)->check(CLI::PositiveNumber);
  add_common(ne, common);

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    std::ostringstream o, x;
    const int code = app.exit(e, o, x);
    out << o.str();
    err << x.str();
    return code == 0 ? kPass : kUsage;
  }

  try {
    set_thread_count(common.threads);
    if (*ai) return cmd_approx_inverse(ai, common, f_text, group, k_text.value_or("1,2,4,...,256"), grid, window, emit_xi, out);
    if (*fc) return cmd_fourier_check(fc, common, xi_text, group, nu_text, alphas, samples, radius, grid, tol.value_or(1e-9), out);
    if (*wi) return cmd_witness(wi, common, f_text, group, alphas, k_text.value_or("2,4,...,256"), delta_text, eta_text, grid,
                         tol.value_or(1e-12), out);
    if (*sw) return cmd_strong_witness(sw, common, xi_text, group, alphas, n_text, tol.value_or(1e-6), budget, grid,
                                out);
    if (*an) return cmd_annihilator(an, common, xi_text, group, alphas, tol.value_or(1e-6), budget, exact, grid,
                             out);
    if (*it) return cmd_ideal_test(it, common, f_text, group, alphas, k_text.value_or("2,4,...,256"), grid, out);
    if (*hj) return cmd_haar_join(hj, common, group, y1, y2, tol.value_or(1e-12), maxiter.value_or(500), out);
    if (*sr) return cmd_support_recovery(sr, common, group, mus, random_count, tol.value_or(1e-12),
                                           maxiter.value_or(200), out);
    if (*mm) return cmd_maxmin(mm, common, group, predicate, probes, out);
    if (*ne) return cmd_nonextend(ne, common, nu_text, p, terms, out);
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n" << e.caret() << "\n";
    return kUsage;
  } catch (const ConvergenceError& e) {
    err << "error: " << e.what() << "\n";
    return kCheckFailed;
  } catch (const ClosureViolation& e) {
    err << "error: predicate-closure violation: " << e.what() << "\n";
    return kCheckFailed;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const nlohmann::json::exception& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}

}  // namespace algact::cli
