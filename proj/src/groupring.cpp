#include "algact/groupring.hpp"

namespace algact {

RingElement to_float(const ExactRingElement& a) {
  RingElement out(a.spec());
  for (const auto& [g, c] : a.terms()) out.set(g, to_double(c));
  return out;
}

RingMatrix to_float(const ExactRingMatrix& a) {
  RingMatrix out(a.spec(), a.rows(), a.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) out.at(i, j) = to_float(a.at(i, j));
  return out;
}

VectorOverG to_float(const ExactVector& a) {
  VectorOverG out(a.spec(), a.components());
  for (int l = 0; l < a.components(); ++l) out[l] = to_float(a[l]);
  return out;
}

bool is_integral(const RingElement& a) {
  for (const auto& [g, c] : a.terms())
    if (c != std::nearbyint(c)) return false;
  return true;
}

bool is_integral(const VectorOverG& v) {
  for (int l = 0; l < v.components(); ++l)
    if (!is_integral(v[l])) return false;
  return true;
}

}  // namespace algact
