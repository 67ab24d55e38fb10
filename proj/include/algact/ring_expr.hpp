#pragma once

#include <string>
#include <string_view>

#include "algact/groupring.hpp"

namespace algact {

// Ring-expression grammar:
//
//   expr  := ['+'|'-'] term (('+'|'-') term)*
//   term  := coeff ('*' mono)* | mono
//   mono  := gen ['^' ['-'] int] ('*' mono)*
//   gen   := 'u' int | 'e' | name
//   coeff := decimal | int '/' int
//
// `u1..ud` are the generators of Z^d (u1 is the chosen generator of a cyclic
// group). A name is any element name of a finite group, either an identifier
// (`r2s`) or a run of parenthesized chunks (`(12)(34)`, `(0,1,1)`). On Z^d a
// parenthesized tuple `(a,b)` denotes that lattice point.
//
// Matrices list rows separated by ';' and entries separated by top-level
// ','; an optional pair of enclosing brackets is ignored.

ExactRingElement parse_ring_expr_exact(std::string_view text, const GroupSpec& spec);
RingElement parse_ring_expr(std::string_view text, const GroupSpec& spec);

ExactRingMatrix parse_ring_matrix_exact(std::string_view text, const GroupSpec& spec);
RingMatrix parse_ring_matrix(std::string_view text, const GroupSpec& spec);

// Decimal (with optional exponent) or p/q.
Rational parse_rational(std::string_view text);

// Terms in element order; parse(format(a)) == a.
std::string format_ring_expr(const RingElement& a);
std::string format_ring_expr(const ExactRingElement& a);
std::string format_ring_matrix(const RingMatrix& a);
std::string format_ring_matrix(const ExactRingMatrix& a);

// The monomial for a single group element, e.g. "u1^2*u2^-1" or "(12)".
std::string format_element(const GroupSpec& spec, const Element& g);

}  // namespace algact
