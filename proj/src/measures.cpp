#include "algact/measures.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <numbers>

#include "algact/error.hpp"

namespace algact {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr int kGeomCutoff = 64;

std::string shortest(double x) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  (void)ec;
  return std::string(buf, ptr);
}
}  // namespace

struct BaseMeasure::Node {
  Kind kind = Kind::UniformInt;
  int dim = 1;
  int n = 0;
  double delta = 0.0;
  std::vector<std::pair<double, double>> atoms;  // one coordinate
  std::vector<double> cdf;                       // sampling table
  std::shared_ptr<const Node> a, b;
  std::vector<double> mean;
  double m2 = 0.0;
  bool integer = true;

  // Fourier transform and 1 - transform of the one-dimensional factor.
  std::complex<double> coord_fourier(double t) const {
    switch (kind) {
      case Kind::UniformInt: {
        if (n == 0) return 1.0;
        if (n <= 1024) {
          double s = 1.0;
          for (int l = 1; l <= n; ++l) s += 2.0 * std::cos(2.0 * kPi * l * t);
          return s / (2 * n + 1);
        }
        const double den = (2 * n + 1) * std::sin(kPi * t);
        if (std::abs(den) < 1e-300) return 1.0;
        return std::sin(kPi * (2 * n + 1) * t) / den;
      }
      case Kind::GeometricSym:
        return 1.0 / (5.0 - 4.0 * std::cos(2.0 * kPi * t));
      case Kind::DiscreteExplicit: {
        std::complex<double> s = 0.0;
        for (const auto& [v, p] : atoms) s += p * std::polar(1.0, 2.0 * kPi * v * t);
        return s;
      }
      default:
        return 1.0;
    }
  }

  std::complex<double> coord_one_minus(double t) const {
    switch (kind) {
      case Kind::UniformInt: {
        if (n == 0) return 0.0;
        double s = 0.0;
        for (int l = 1; l <= n; ++l) {
          const double sn = std::sin(kPi * l * t);
          s += 2.0 * sn * sn;
        }
        return 2.0 * s / (2 * n + 1);
      }
      case Kind::GeometricSym: {
        const double sn = std::sin(kPi * t);
        return 8.0 * sn * sn / (5.0 - 4.0 * std::cos(2.0 * kPi * t));
      }
      case Kind::DiscreteExplicit: {
        double re = 0.0, im = 0.0;
        for (const auto& [v, p] : atoms) {
          const double sn = std::sin(kPi * v * t);
          re += p * 2.0 * sn * sn;
          im -= p * std::sin(2.0 * kPi * v * t);
        }
        return {re, im};
      }
      default:
        return 0.0;
    }
  }

  std::complex<double> fourier(std::span<const double> t) const {
    switch (kind) {
      case Kind::Gaussian: {
        double s = 0.0;
        for (double x : t) s += x * x;
        return std::exp(-delta * s);
      }
      case Kind::Convolution:
        return a->fourier(t) * b->fourier(t);
      default: {
        std::complex<double> prod = 1.0;
        for (double x : t) prod *= coord_fourier(x);
        return prod;
      }
    }
  }

  std::complex<double> one_minus(std::span<const double> t) const {
    switch (kind) {
      case Kind::Gaussian: {
        double s = 0.0;
        for (double x : t) s += x * x;
        return -std::expm1(-delta * s);
      }
      case Kind::Convolution: {
        // 1 - ab = (1 - a) + a (1 - b)
        return a->one_minus(t) + a->fourier(t) * b->one_minus(t);
      }
      default: {
        // 1 - prod a_j = sum_j (1 - a_j) prod_{i<j} a_i
        std::complex<double> sum = 0.0, prefix = 1.0;
        for (double x : t) {
          sum += coord_one_minus(x) * prefix;
          prefix *= coord_fourier(x);
        }
        return sum;
      }
    }
  }

  double draw_coord(SiteStream& s) const {
    switch (kind) {
      case Kind::UniformInt:
        return static_cast<double>(static_cast<long long>(s.below(2 * n + 1)) - n);
      case Kind::GeometricSym:
      case Kind::DiscreteExplicit: {
        const double u = s.next_double();
        const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
        const std::size_t i = std::min<std::size_t>(it - cdf.begin(), atoms.size() - 1);
        return atoms[i].first;
      }
      default:
        return 0.0;
    }
  }

  void sample(SiteStream& s, std::span<double> out) const {
    switch (kind) {
      case Kind::Gaussian: {
        const double sigma = std::sqrt(delta / (2.0 * kPi * kPi));
        for (double& x : out) x = sigma * s.normal();
        return;
      }
      case Kind::Convolution: {
        a->sample(s, out);
        std::vector<double> tmp(out.size());
        b->sample(s, tmp);
        for (std::size_t i = 0; i < out.size(); ++i) out[i] += tmp[i];
        return;
      }
      default:
        for (double& x : out) x = draw_coord(s);
    }
  }

  std::string describe() const {
    const std::string pow = "^" + std::to_string(dim);
    switch (kind) {
      case Kind::UniformInt:
        return n == 0 ? "dirac" + pow : "uniformint(" + std::to_string(n) + ")" + pow;
      case Kind::GeometricSym:
        return "geom2" + pow;
      case Kind::Gaussian:
        return "gauss(" + shortest(delta) + ")" + pow;
      case Kind::DiscreteExplicit: {
        std::string s = "discrete(";
        for (std::size_t i = 0; i < atoms.size(); ++i) {
          s += (i ? "," : "") + shortest(atoms[i].first) + ":" + shortest(atoms[i].second);
        }
        return s + ")" + pow;
      }
      case Kind::Convolution:
        return "conv(" + a->describe() + "," + b->describe() + ")";
    }
    return "";
  }
};

namespace {

void build_cdf(BaseMeasure::Kind, std::vector<std::pair<double, double>>& atoms, std::vector<double>& cdf) {
  double total = 0.0;
  for (const auto& at : atoms) total += at.second;
  double run = 0.0;
  cdf.clear();
  for (const auto& at : atoms) {
    run += at.second / total;
    cdf.push_back(run);
  }
  cdf.back() = 1.0;
}

}  // namespace

BaseMeasure BaseMeasure::uniform_int(int n, int dim) {
  if (n < 0) throw DomainError("uniformint(n) needs n >= 0");
  if (dim < 1) throw DomainError("measure dimension must be positive");
  auto node = std::make_shared<Node>();
  node->kind = Kind::UniformInt;
  node->dim = dim;
  node->n = n;
  node->mean.assign(dim, 0.0);
  node->m2 = dim * (static_cast<double>(n) * (n + 1) / 3.0);
  return BaseMeasure(std::move(node));
}

BaseMeasure BaseMeasure::geometric_sym(int dim) {
  if (dim < 1) throw DomainError("measure dimension must be positive");
  auto node = std::make_shared<Node>();
  node->kind = Kind::GeometricSym;
  node->dim = dim;
  for (int l = -kGeomCutoff; l <= kGeomCutoff; ++l) {
    node->atoms.emplace_back(l, std::ldexp(1.0, -std::abs(l)) / 3.0);
  }
  build_cdf(node->kind, node->atoms, node->cdf);
  node->mean.assign(dim, 0.0);
  // sum_l l^2 2^-|l| / 3 = 12 / 3
  node->m2 = dim * 4.0;
  return BaseMeasure(std::move(node));
}

BaseMeasure BaseMeasure::gaussian(double delta, int dim) {
  if (!(delta > 0.0) || !std::isfinite(delta)) throw DomainError("gauss(delta) needs delta > 0");
  if (dim < 1) throw DomainError("measure dimension must be positive");
  auto node = std::make_shared<Node>();
  node->kind = Kind::Gaussian;
  node->dim = dim;
  node->delta = delta;
  node->mean.assign(dim, 0.0);
  node->m2 = dim * delta / (2.0 * kPi * kPi);
  node->integer = false;
  return BaseMeasure(std::move(node));
}

BaseMeasure BaseMeasure::discrete(std::vector<std::pair<double, double>> atoms, int dim) {
  if (atoms.empty()) throw DomainError("discrete measure needs at least one atom");
  if (dim < 1) throw DomainError("measure dimension must be positive");
  double total = 0.0;
  for (const auto& [v, p] : atoms) {
    if (!(p >= 0.0) || !std::isfinite(v)) throw DomainError("discrete atoms need finite values and p >= 0");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-12) throw DomainError("discrete probabilities must sum to 1");
  auto node = std::make_shared<Node>();
  node->kind = Kind::DiscreteExplicit;
  node->dim = dim;
  double mean = 0.0, m2 = 0.0;
  for (const auto& [v, p] : atoms) {
    mean += p * v;
    m2 += p * v * v;
    if (v != std::nearbyint(v)) node->integer = false;
  }
  node->atoms = std::move(atoms);
  build_cdf(node->kind, node->atoms, node->cdf);
  node->mean.assign(dim, mean);
  node->m2 = dim * m2;
  return BaseMeasure(std::move(node));
}

BaseMeasure BaseMeasure::convolution(const BaseMeasure& a, const BaseMeasure& b) {
  if (a.dim() != b.dim()) throw DimensionMismatch("convolution factors have different dimensions");
  auto node = std::make_shared<Node>();
  node->kind = Kind::Convolution;
  node->dim = a.dim();
  node->a = a.node_;
  node->b = b.node_;
  double cross = 0.0;
  for (int i = 0; i < a.dim(); ++i) {
    node->mean.push_back(a.mean()[i] + b.mean()[i]);
    cross += a.mean()[i] * b.mean()[i];
  }
  node->m2 = a.second_moment() + b.second_moment() + 2.0 * cross;
  node->integer = a.integer_valued() && b.integer_valued();
  return BaseMeasure(std::move(node));
}

BaseMeasure::Kind BaseMeasure::kind() const { return node_->kind; }
int BaseMeasure::dim() const { return node_->dim; }

std::complex<double> BaseMeasure::fourier(std::span<const double> t) const {
  if (static_cast<int>(t.size()) != dim()) throw DimensionMismatch("fourier: argument dimension");
  return node_->fourier(t);
}

std::complex<double> BaseMeasure::one_minus_fourier(std::span<const double> t) const {
  if (static_cast<int>(t.size()) != dim()) throw DimensionMismatch("fourier: argument dimension");
  return node_->one_minus(t);
}

void BaseMeasure::sample(SiteStream& stream, std::span<double> out) const {
  if (static_cast<int>(out.size()) != dim()) throw DimensionMismatch("sample: output dimension");
  node_->sample(stream, out);
}

const std::vector<double>& BaseMeasure::mean() const { return node_->mean; }
double BaseMeasure::second_moment() const { return node_->m2; }
bool BaseMeasure::integer_valued() const { return node_->integer; }

bool BaseMeasure::is_point_mass_at_zero() const {
  if (node_->kind == Kind::UniformInt) return node_->n == 0;
  if (node_->kind == Kind::DiscreteExplicit) {
    for (const auto& [v, p] : node_->atoms)
      if (p > 0.0 && v != 0.0) return false;
    return true;
  }
  if (node_->kind == Kind::Convolution) {
    return BaseMeasure(node_->a).is_point_mass_at_zero() && BaseMeasure(node_->b).is_point_mass_at_zero();
  }
  return false;
}

std::string BaseMeasure::describe() const { return node_->describe(); }

namespace {

class MeasureParser {
 public:
  explicit MeasureParser(std::string_view text) : text_(text) {}

  BaseMeasure parse_all() {
    BaseMeasure m = parse();
    skip_ws();
    if (pos_ != text_.size()) fail("unexpected trailing input");
    return m;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError("measure spec: " + what + " at position " + std::to_string(pos_), std::string(text_), pos_);
  }
  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }
  bool accept(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  void expect(char c) {
    if (!accept(c)) fail(std::string("expected '") + c + "'");
  }
  std::string ident() {
    skip_ws();
    const std::size_t start = pos_;
    while (pos_ < text_.size() && std::isalnum(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    return std::string(text_.substr(start, pos_ - start));
  }
  double number() {
    skip_ws();
    double v = 0.0;
    const char* b = text_.data() + pos_;
    const char* e = text_.data() + text_.size();
    if (b < e && *b == '+') ++b;
    auto [ptr, ec] = std::from_chars(b, e, v);
    if (ec != std::errc()) fail("expected a number");
    pos_ = ptr - text_.data();
    return v;
  }
  int integer() {
    skip_ws();
    int v = 0;
    auto [ptr, ec] = std::from_chars(text_.data() + pos_, text_.data() + text_.size(), v);
    if (ec != std::errc()) fail("expected an integer");
    pos_ = ptr - text_.data();
    return v;
  }
  int exponent() {
    if (!accept('^')) return 1;
    const int k = integer();
    if (k < 1) fail("dimension must be positive");
    return k;
  }

  BaseMeasure parse() {
    const std::size_t start = (skip_ws(), pos_);
    const std::string name = ident();
    if (name == "uniformint") {
      expect('(');
      const int n = integer();
      if (n < 0) fail("uniformint(n) needs n >= 0");
      expect(')');
      return BaseMeasure::uniform_int(n, exponent());
    }
    if (name == "geom2") return BaseMeasure::geometric_sym(exponent());
    if (name == "dirac") return BaseMeasure::dirac(exponent());
    if (name == "gauss") {
      expect('(');
      const double d = number();
      if (!(d > 0.0)) fail("gauss(delta) needs delta > 0");
      expect(')');
      return BaseMeasure::gaussian(d, exponent());
    }
    if (name == "discrete") {
      expect('(');
      std::vector<std::pair<double, double>> atoms;
      do {
        const double v = number();
        expect(':');
        const double p = number();
        atoms.emplace_back(v, p);
      } while (accept(','));
      expect(')');
      const int k = exponent();
      try {
        return BaseMeasure::discrete(std::move(atoms), k);
      } catch (const DomainError& e) {
        pos_ = start;
        fail(e.what());
      }
    }
    if (name == "conv") {
      expect('(');
      BaseMeasure a = parse();
      expect(',');
      BaseMeasure b = parse();
      expect(')');
      if (a.dim() != b.dim()) {
        pos_ = start;
        fail("conv factors have different dimensions");
      }
      return BaseMeasure::convolution(a, b);
    }
    pos_ = start;
    fail("unknown measure '" + name + "'");
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace

BaseMeasure parse_measure(std::string_view text) { return MeasureParser(text).parse_all(); }

double fourier_quadratic_bound(const BaseMeasure& nu) {
  for (double m : nu.mean()) {
    if (std::abs(m) > 1e-12) throw DomainError("quadratic Fourier bound needs a mean-zero measure");
  }
  const double m2 = nu.second_moment();
  if (!std::isfinite(m2)) throw DomainError("measure does not have a finite second moment");
  return 2.0 * kPi * kPi * m2;
}

NonExtendReport nonextendability_witness(const BaseMeasure& nu, double p, int terms) {
  if (!(p > 2.0)) throw DomainError("non-extendability witness needs p > 2");
  if (terms < 1) throw DomainError("terms must be positive");
  if (nu.is_point_mass_at_zero()) throw DomainError("no witness: nu is the point mass at 0");

  const int k = nu.dim();
  for (int j = 0; j < k; ++j) {
    NonExtendReport report;
    report.coordinate = j;
    report.p = p;
    std::vector<double> t(k, 0.0);
    bool ok = true;
    double fsum = 0.0, psum = 0.0;
    for (int n = 1; n <= terms && ok; ++n) {
      const double limit = std::exp2(-static_cast<double>(n) / p);
      double tn = 0.5 * limit;
      bool found = false;
      for (int iter = 0; iter < 1100 && tn > 0.0; ++iter, tn *= 0.5) {
        t[j] = tn;
        const double gap = std::abs(nu.one_minus_fourier(t));
        if (gap >= std::exp2(n) * std::pow(tn, p) && gap < 0.5) {
          found = true;
          break;
        }
      }
      if (!found) {
        ok = false;
        break;
      }
      t[j] = tn;
      const double gap = std::abs(nu.one_minus_fourier(t));
      NonExtendRow row;
      row.n = n;
      row.t = tn;
      const double tp = std::pow(tn, p);
      row.set_size = std::ceil(std::exp2(-n) / tp);
      row.fourier_term = gap * row.set_size;
      row.p_term = tp * row.set_size;
      fsum += row.fourier_term;
      psum += row.p_term;
      row.fourier_partial = fsum;
      row.p_partial = psum;
      report.rows.push_back(row);
    }
    if (ok) return report;
  }
  throw DomainError("no witness found at machine precision for any coordinate");
}

}  // namespace algact
