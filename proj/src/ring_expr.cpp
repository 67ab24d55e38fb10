#include "algact/ring_expr.hpp"

#include <cctype>
#include <charconv>
#include <cstring>
#include <algorithm>

namespace algact {

namespace {

bool is_ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool is_ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }
bool is_digit(char c) { return c >= '0' && c <= '9'; }

class Parser {
 public:
  Parser(std::string_view text, const GroupSpec& spec, std::string_view full, std::size_t base)
      : text_(text), spec_(spec), full_(full), base_(base) {}

  ExactRingElement parse_expr() {
    ExactRingElement out(spec_);
    skip_ws();
    if (at_end()) fail("empty expression");
    bool first = true;
    while (true) {
      skip_ws();
      int sign = 1;
      if (peek() == '+' || peek() == '-') {
        sign = peek() == '-' ? -1 : 1;
        ++pos_;
      } else if (!first) {
        fail("expected '+' or '-'");
      }
      skip_ws();
      auto [g, c] = parse_term();
      out.add(g, sign < 0 ? Rational(-c) : c);
      first = false;
      skip_ws();
      if (at_end()) break;
    }
    return out;
  }

  Rational parse_coeff() {
    const std::size_t start = pos_;
    while (is_digit(peek())) ++pos_;
    if (peek() == '/') {
      const std::string num(text_.substr(start, pos_ - start));
      ++pos_;
      const std::size_t dstart = pos_;
      while (is_digit(peek())) ++pos_;
      if (pos_ == dstart || num.empty()) fail_at(dstart, "malformed rational coefficient");
      std::string den(text_.substr(dstart, pos_ - dstart));
      std::string numer = num;
      for (auto* str : {&den, &numer}) {
        str->erase(0, std::min(str->find_first_not_of('0'), str->size()));
        if (str->empty()) *str = "0";
      }
      Rational d{boost::multiprecision::cpp_int(den)};
      if (d == 0) fail_at(dstart, "zero denominator");
      return Rational(boost::multiprecision::cpp_int(numer)) / d;
    }
    std::string mantissa(text_.substr(start, pos_ - start));
    long long scale = 0;
    if (peek() == '.') {
      ++pos_;
      while (is_digit(peek())) {
        mantissa += peek();
        ++pos_;
        --scale;
      }
    }
    if (mantissa.empty()) fail_at(start, "expected a coefficient");
    if ((peek() == 'e' || peek() == 'E') &&
        (is_digit(peek(1)) || ((peek(1) == '-' || peek(1) == '+') && is_digit(peek(2))))) {
      ++pos_;
      int esign = 1;
      if (peek() == '-' || peek() == '+') {
        esign = peek() == '-' ? -1 : 1;
        ++pos_;
      }
      long long e = 0;
      while (is_digit(peek())) {
        e = e * 10 + (peek() - '0');
        if (e > 400) fail("exponent out of range");
        ++pos_;
      }
      scale += esign * e;
    }
    // cpp_int reads a leading zero as an octal prefix.
    mantissa.erase(0, std::min(mantissa.find_first_not_of('0'), mantissa.size()));
    if (mantissa.empty()) mantissa = "0";
    Rational value{boost::multiprecision::cpp_int(mantissa)};
    boost::multiprecision::cpp_int ten = 10;
    boost::multiprecision::cpp_int p = boost::multiprecision::pow(ten, static_cast<unsigned>(scale < 0 ? -scale : scale));
    if (scale < 0) value /= Rational(p);
    if (scale > 0) value *= Rational(p);
    return value;
  }

  bool at_end() const { return pos_ >= text_.size(); }
  std::size_t pos() const { return pos_; }
  void skip_ws() {
    while (!at_end() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

 private:
  char peek(std::size_t ahead = 0) const {
    return pos_ + ahead < text_.size() ? text_[pos_ + ahead] : '\0';
  }

  [[noreturn]] void fail(const std::string& what) const { fail_at(pos_, what); }
  [[noreturn]] void fail_at(std::size_t at, const std::string& what) const {
    throw ParseError(what + " at position " + std::to_string(base_ + at), std::string(full_), base_ + at);
  }

  std::pair<Element, Rational> parse_term() {
    Rational coeff = 1;
    if (is_digit(peek()) || peek() == '.') {
      coeff = parse_coeff();
      skip_ws();
      if (peek() != '*') return {spec_.identity(), coeff};
      ++pos_;
      skip_ws();
    }
    return {parse_mono(), coeff};
  }

  Element parse_mono() {
    Element acc = parse_factor();
    while (true) {
      const std::size_t save = pos_;
      skip_ws();
      if (peek() != '*') {
        pos_ = save;
        return acc;
      }
      ++pos_;
      skip_ws();
      acc = spec_.multiply(acc, parse_factor());
    }
  }

  Element parse_factor() {
    Element g = parse_gen();
    const std::size_t save = pos_;
    skip_ws();
    if (peek() != '^') {
      pos_ = save;
      return g;
    }
    ++pos_;
    skip_ws();
    int sign = 1;
    if (peek() == '-' || peek() == '+') {
      sign = peek() == '-' ? -1 : 1;
      ++pos_;
    }
    const std::size_t start = pos_;
    long long e = 0;
    while (is_digit(peek())) {
      e = e * 10 + (peek() - '0');
      if (e > (1LL << 30)) fail_at(start, "exponent too large");
      ++pos_;
    }
    if (pos_ == start) fail("expected an integer exponent");
    return spec_.power(g, sign * e);
  }

  Element parse_gen() {
    const std::size_t start = pos_;
    if (peek() == '(') {
      while (peek() == '(') {
        int depth = 0;
        do {
          if (at_end()) fail_at(start, "unbalanced parenthesis");
          if (peek() == '(') ++depth;
          if (peek() == ')') --depth;
          ++pos_;
        } while (depth > 0);
      }
      const std::string_view name = text_.substr(start, pos_ - start);
      if (auto g = spec_.find_name(name)) return *g;
      if (!spec_.is_finite()) return lattice_point(name, start);
      fail_at(start, "unknown element '" + std::string(name) + "'");
    }
    if (!is_ident_start(peek())) fail("expected a generator or element name");
    while (is_ident_char(peek())) ++pos_;
    const std::string_view name = text_.substr(start, pos_ - start);
    if (auto g = spec_.find_name(name)) return *g;
    if (name == "e") return spec_.identity();
    if (name.size() > 1 && name[0] == 'u' &&
        std::all_of(name.begin() + 1, name.end(), [](char c) { return is_digit(c); })) {
      int idx = 0;
      std::from_chars(name.data() + 1, name.data() + name.size(), idx);
      const auto& gens = spec_.generators();
      if (idx < 1 || idx > static_cast<int>(gens.size())) {
        fail_at(start, "unknown generator '" + std::string(name) + "' for " + spec_.id());
      }
      return gens[idx - 1];
    }
    fail_at(start, "unknown generator '" + std::string(name) + "' for " + spec_.id());
  }

  Element lattice_point(std::string_view chunk, std::size_t start) {
    if (chunk.size() < 2 || chunk.front() != '(' || chunk.back() != ')') {
      fail_at(start, "malformed lattice point");
    }
    Element g;
    int i = 0;
    std::size_t p = 1;
    while (p < chunk.size() - 1) {
      std::size_t q = chunk.find(',', p);
      if (q == std::string_view::npos || q > chunk.size() - 1) q = chunk.size() - 1;
      std::string_view piece = chunk.substr(p, q - p);
      while (!piece.empty() && piece.front() == ' ') piece.remove_prefix(1);
      while (!piece.empty() && piece.back() == ' ') piece.remove_suffix(1);
      int v = 0;
      const char* b = piece.data();
      if (!piece.empty() && piece.front() == '+') ++b;
      auto [ptr, ec] = std::from_chars(b, piece.data() + piece.size(), v);
      if (piece.empty() || ec != std::errc() || ptr != piece.data() + piece.size()) {
        fail_at(start + p, "malformed lattice coordinate");
      }
      if (i >= spec_.rank()) fail_at(start, "too many coordinates for " + spec_.id());
      g.c[i++] = v;
      p = q + 1;
    }
    if (i != spec_.rank()) fail_at(start, "lattice point needs " + std::to_string(spec_.rank()) + " coordinates");
    return g;
  }

  std::string_view text_;
  GroupSpec spec_;
  std::string_view full_;
  std::size_t base_;
  std::size_t pos_ = 0;
};

// Splits at `sep` where the parenthesis depth is zero; returns (offset, piece).
std::vector<std::pair<std::size_t, std::string_view>> split_top(std::string_view text, char sep,
                                                                 std::size_t base) {
  std::vector<std::pair<std::size_t, std::string_view>> out;
  int depth = 0;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= text.size(); ++i) {
    const char c = i < text.size() ? text[i] : sep;
    if (c == '(') ++depth;
    if (c == ')') --depth;
    if (c == sep && depth == 0) {
      out.emplace_back(base + start, text.substr(start, i - start));
      start = i + 1;
    }
  }
  return out;
}

std::string format_coeff(double c) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, c);
  (void)ec;
  return std::string(buf, ptr);
}

std::string format_coeff(const Rational& c) {
  if (denominator(c) == 1) return numerator(c).str();
  return numerator(c).str() + "/" + denominator(c).str();
}

template <class T>
std::string format_generic(const BasicRingElement<T>& a) {
  if (a.is_zero()) return "0";
  std::string out;
  bool first = true;
  const Element e = a.spec().identity();
  for (const auto& [g, c] : a.terms()) {
    const bool negative = c < T(0);
    const T mag = negative ? T(-c) : c;
    if (first) {
      if (negative) out += "-";
    } else {
      out += negative ? " - " : " + ";
    }
    first = false;
    if (g == e) {
      out += format_coeff(mag);
    } else if (mag == T(1)) {
      out += format_element(a.spec(), g);
    } else {
      out += format_coeff(mag) + "*" + format_element(a.spec(), g);
    }
  }
  return out;
}

template <class T>
std::string format_matrix_generic(const BasicRingMatrix<T>& a) {
  std::string out;
  for (int i = 0; i < a.rows(); ++i) {
    if (i) out += "; ";
    for (int j = 0; j < a.cols(); ++j) {
      if (j) out += ", ";
      out += format_generic(a.at(i, j));
    }
  }
  return out;
}

}  // namespace

std::string format_element(const GroupSpec& spec, const Element& g) {
  if (!spec.is_finite()) {
    std::string out;
    for (int i = 0; i < spec.rank(); ++i) {
      if (g.c[i] == 0) continue;
      if (!out.empty()) out += "*";
      out += "u" + std::to_string(i + 1);
      if (g.c[i] != 1) out += "^" + std::to_string(g.c[i]);
    }
    return out.empty() ? "e" : out;
  }
  const std::string name = spec.name(g);
  const bool ident = is_ident_start(name[0]) &&
                     std::all_of(name.begin(), name.end(), [](char c) { return is_ident_char(c); });
  if (ident || name.front() == '(') return name;
  // Numeric names (Z/n) are written as powers of the first generator.
  if (!spec.generators().empty()) {
    const Element u = spec.generators()[0];
    Element x = u;
    for (int e = 1; e <= spec.order(); ++e) {
      if (x == g) return e == 1 ? "u1" : "u1^" + std::to_string(e);
      x = spec.multiply(x, u);
    }
  }
  return name;
}

Rational parse_rational(std::string_view text) {
  const std::string full(text);
  std::size_t lo = 0;
  while (lo < text.size() && std::isspace(static_cast<unsigned char>(text[lo]))) ++lo;
  bool negative = false;
  if (lo < text.size() && (text[lo] == '-' || text[lo] == '+')) negative = text[lo++] == '-';
  Parser p(text.substr(lo), GroupSpec::free_abelian(1), full, lo);
  Rational v = p.parse_coeff();
  p.skip_ws();
  if (!p.at_end()) throw ParseError("trailing characters in number", full, lo + p.pos());
  return negative ? Rational(-v) : v;
}

ExactRingElement parse_ring_expr_exact(std::string_view text, const GroupSpec& spec) {
  Parser p(text, spec, text, 0);
  return p.parse_expr();
}

RingElement parse_ring_expr(std::string_view text, const GroupSpec& spec) {
  return to_float(parse_ring_expr_exact(text, spec));
}

ExactRingMatrix parse_ring_matrix_exact(std::string_view text, const GroupSpec& spec) {
  std::size_t lo = 0, hi = text.size();
  while (lo < hi && std::isspace(static_cast<unsigned char>(text[lo]))) ++lo;
  while (hi > lo && std::isspace(static_cast<unsigned char>(text[hi - 1]))) --hi;
  if (hi - lo >= 2 && text[lo] == '[' && text[hi - 1] == ']') {
    ++lo;
    --hi;
  }
  const auto rows = split_top(text.substr(lo, hi - lo), ';', lo);
  std::vector<std::vector<ExactRingElement>> cells;
  for (const auto& [roff, row] : rows) {
    std::vector<ExactRingElement> line;
    for (const auto& [off, piece] : split_top(row, ',', roff)) {
      Parser p(piece, spec, text, off);
      line.push_back(p.parse_expr());
    }
    if (!cells.empty() && line.size() != cells[0].size()) {
      throw ParseError("rows have different lengths", std::string(text), roff);
    }
    cells.push_back(std::move(line));
  }
  ExactRingMatrix out(spec, static_cast<int>(cells.size()), static_cast<int>(cells[0].size()));
  for (std::size_t i = 0; i < cells.size(); ++i)
    for (std::size_t j = 0; j < cells[i].size(); ++j) out.at(i, j) = cells[i][j];
  return out;
}

RingMatrix parse_ring_matrix(std::string_view text, const GroupSpec& spec) {
  return to_float(parse_ring_matrix_exact(text, spec));
}

std::string format_ring_expr(const RingElement& a) { return format_generic(a); }
std::string format_ring_expr(const ExactRingElement& a) { return format_generic(a); }
std::string format_ring_matrix(const RingMatrix& a) { return format_matrix_generic(a); }
std::string format_ring_matrix(const ExactRingMatrix& a) { return format_matrix_generic(a); }

}  // namespace algact
