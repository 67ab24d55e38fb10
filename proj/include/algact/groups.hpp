#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "algact/error.hpp"

namespace algact {

// Largest rank supported for the free abelian backend.
inline constexpr int kMaxRank = 4;

// A group element. For Z^d the first d slots hold the integer coordinates;
// for a finite group c[0] is the index into the multiplication table and
// the remaining slots are zero. The defaulted ordering is lexicographic on
// this encoding and is the canonical term order everywhere.
struct Element {
  std::array<std::int32_t, kMaxRank> c{};

  static Element index(int i) {
    Element e;
    e.c[0] = i;
    return e;
  }
  int idx() const { return c[0]; }

  auto operator<=>(const Element&) const = default;
  bool operator==(const Element&) const = default;
};

struct ElementHash {
  std::size_t operator()(const Element& e) const noexcept {
    std::uint64_t h = 0x9e3779b97f4a7c15ULL;
    for (auto v : e.c) {
      h ^= static_cast<std::uint32_t>(v) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    }
    return static_cast<std::size_t>(h);
  }
};

enum class GroupKind { FreeAbelian, Finite };

// A concrete countable group: either Z^d or a finite group given by its
// multiplication table. Immutable; copies share the underlying table.
class GroupSpec {
 public:
  static GroupSpec free_abelian(int rank);

  // Validates the table exhaustively (closure, associativity, identity,
  // inverses) and throws DomainError on failure. table[a][b] is the index
  // of a*b.
  static GroupSpec finite(std::vector<std::vector<int>> table,
                          std::vector<std::string> names = {}, std::string id = "",
                          std::vector<int> generators = {});

  static GroupSpec cyclic(int n);
  // Z/n1 x Z/n2 x ... with elements named "(a,b,...)".
  static GroupSpec cyclic_product(std::span<const int> moduli);
  static GroupSpec symmetric(int n);  // n <= 5, names in cycle notation
  static GroupSpec dihedral(int n);   // order 2n, names r^i s^j

  // Built-in ids: "Z^d", "Z/n", "S3", "S4", "D4", "(Z/2)^3", "Z/2xZ/4".
  static GroupSpec builtin(std::string_view id);

  // JSON text with fields `order`, `table` (row-major, either nested or flat)
  // and optional `names`.
  static GroupSpec from_json_text(std::string_view text, std::string id = "");

  GroupKind kind() const;
  bool is_finite() const { return kind() == GroupKind::Finite; }
  int rank() const;   // d for Z^d, 0 for finite groups
  int order() const;  // number of elements for finite groups, 0 for Z^d
  const std::string& id() const;

  Element identity() const;
  Element multiply(const Element& a, const Element& b) const;
  Element inverse(const Element& a) const;
  Element power(const Element& a, long long exponent) const;
  bool contains(const Element& a) const;

  // Generators used by the u1..ud names of the ring grammar.
  const std::vector<Element>& generators() const;

  // Finite backend only.
  const std::vector<std::vector<int>>& table() const;
  std::string name(const Element& a) const;
  std::optional<Element> find_name(std::string_view name) const;
  std::vector<Element> elements() const;

  bool operator==(const GroupSpec& other) const;

 private:
  struct Impl;
  explicit GroupSpec(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
  std::shared_ptr<const Impl> impl_;
};

// Throws BackendMismatch unless a == b.
void require_same(const GroupSpec& a, const GroupSpec& b);

Element multiply(const GroupSpec& spec, const Element& a, const Element& b);

// All elements of max-norm <= radius in lexicographic order (Z^d), or all
// elements of a finite group regardless of radius.
std::vector<Element> enumerate_ball(const GroupSpec& spec, int radius);

// Max-norm of a Z^d element; 0 for finite backends.
int max_norm(const GroupSpec& spec, const Element& a);

// A subgroup of a finite group, stored as a sorted index set. Construction
// verifies identity membership and closure under products and inverses.
class SubgroupSet {
 public:
  SubgroupSet(GroupSpec spec, std::vector<int> elements);

  const GroupSpec& spec() const { return spec_; }
  const std::vector<int>& elements() const { return elements_; }
  std::size_t size() const { return elements_.size(); }
  bool contains(int index) const;
  bool contains(const Element& e) const { return contains(e.idx()); }
  bool is_subset_of(const SubgroupSet& other) const;

  bool operator==(const SubgroupSet& other) const {
    return spec_ == other.spec_ && elements_ == other.elements_;
  }

 private:
  GroupSpec spec_;
  std::vector<int> elements_;
};

// Smallest subgroup containing `generators` (breadth-first closure).
SubgroupSet subgroup_generate(const GroupSpec& spec, std::span<const Element> generators);
SubgroupSet subgroup_generate(const GroupSpec& spec, std::span<const int> generators);
SubgroupSet subgroup_join(const SubgroupSet& a, const SubgroupSet& b);

inline constexpr int kSubgroupEnumerationCap = 64;

// Every subgroup, ordered by (size, element list). Throws DomainError when
// the order exceeds `cap` (at most 64).
std::vector<SubgroupSet> enumerate_subgroups(const GroupSpec& spec,
                                             int cap = kSubgroupEnumerationCap);

// Exhaustive check that `perm` is an automorphism of the finite group.
bool is_automorphism(const GroupSpec& spec, std::span<const int> perm);

}  // namespace algact
