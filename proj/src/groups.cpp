#include "algact/groups.hpp"

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <deque>
#include <map>
#include <numeric>
#include <sstream>
#include <unordered_set>

#include "json.hpp"

namespace algact {

struct GroupSpec::Impl {
  GroupKind kind = GroupKind::FreeAbelian;
  int rank = 0;
  int order = 0;
  std::string id;
  std::vector<std::vector<int>> table;
  std::vector<int> inverse;
  int identity = 0;
  std::vector<std::string> names;
  std::map<std::string, int, std::less<>> name_index;
  std::vector<Element> generators;
};

namespace {

int parse_int(std::string_view s, std::string_view what) {
  int value = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw ParseError("invalid integer in " + std::string(what), std::string(s), 0);
  }
  return value;
}

std::string cycle_notation(const std::vector<int>& perm) {
  const int n = static_cast<int>(perm.size());
  std::vector<bool> seen(n, false);
  std::string out;
  for (int start = 0; start < n; ++start) {
    if (seen[start] || perm[start] == start) continue;
    out += '(';
    int x = start;
    while (!seen[x]) {
      seen[x] = true;
      out += std::to_string(x + 1);
      x = perm[x];
    }
    out += ')';
  }
  return out.empty() ? "e" : out;
}

}  // namespace

GroupSpec GroupSpec::free_abelian(int rank) {
  if (rank < 1 || rank > kMaxRank) {
    throw DomainError("Z^d backend supports 1 <= d <= " + std::to_string(kMaxRank));
  }
  auto impl = std::make_shared<Impl>();
  impl->kind = GroupKind::FreeAbelian;
  impl->rank = rank;
  impl->id = "Z^" + std::to_string(rank);
  for (int i = 0; i < rank; ++i) {
    Element e;
    e.c[i] = 1;
    impl->generators.push_back(e);
  }
  return GroupSpec(std::move(impl));
}

GroupSpec GroupSpec::finite(std::vector<std::vector<int>> table, std::vector<std::string> names,
                            std::string id, std::vector<int> generators) {
  const int n = static_cast<int>(table.size());
  if (n == 0) throw DomainError("finite group table is empty");
  for (const auto& row : table) {
    if (static_cast<int>(row.size()) != n) throw DomainError("group table is not square");
    for (int v : row) {
      if (v < 0 || v >= n) throw DomainError("group table entry out of range");
    }
  }
  int identity = -1;
  for (int e = 0; e < n && identity < 0; ++e) {
    bool ok = true;
    for (int a = 0; a < n && ok; ++a) ok = table[e][a] == a && table[a][e] == a;
    if (ok) identity = e;
  }
  if (identity < 0) throw DomainError("group table has no identity");
  std::vector<int> inverse(n, -1);
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      if (table[a][b] == identity && table[b][a] == identity) {
        inverse[a] = b;
        break;
      }
    }
    if (inverse[a] < 0) throw DomainError("group table: element without inverse");
  }
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      const int ab = table[a][b];
      for (int c = 0; c < n; ++c) {
        if (table[ab][c] != table[a][table[b][c]]) {
          throw DomainError("group table is not associative");
        }
      }
    }
  }

  auto impl = std::make_shared<Impl>();
  impl->kind = GroupKind::Finite;
  impl->order = n;
  impl->id = id.empty() ? "finite(" + std::to_string(n) + ")" : std::move(id);
  impl->table = std::move(table);
  impl->inverse = std::move(inverse);
  impl->identity = identity;
  if (names.empty()) {
    for (int i = 0; i < n; ++i) names.push_back("g" + std::to_string(i));
  }
  if (static_cast<int>(names.size()) != n) throw DomainError("names must list every element");
  for (int i = 0; i < n; ++i) {
    if (!impl->name_index.emplace(names[i], i).second) {
      throw DomainError("duplicate element name '" + names[i] + "'");
    }
  }
  impl->names = std::move(names);
  for (int g : generators) {
    if (g < 0 || g >= n) throw DomainError("generator index out of range");
    impl->generators.push_back(Element::index(g));
  }
  return GroupSpec(std::move(impl));
}

GroupSpec GroupSpec::cyclic(int n) {
  if (n < 1) throw DomainError("Z/n needs n >= 1");
  std::vector<std::vector<int>> table(n, std::vector<int>(n));
  std::vector<std::string> names;
  for (int a = 0; a < n; ++a) {
    names.push_back(std::to_string(a));
    for (int b = 0; b < n; ++b) table[a][b] = (a + b) % n;
  }
  std::vector<int> gens;
  if (n > 1) gens.push_back(1);
  return finite(std::move(table), std::move(names), "Z/" + std::to_string(n), std::move(gens));
}

GroupSpec GroupSpec::cyclic_product(std::span<const int> moduli) {
  if (moduli.empty()) throw DomainError("empty product");
  long long total = 1;
  for (int m : moduli) {
    if (m < 1) throw DomainError("cyclic factor must have order >= 1");
    total *= m;
    if (total > 4096) throw DomainError("product group too large");
  }
  const int n = static_cast<int>(total);
  const int k = static_cast<int>(moduli.size());
  auto digits = [&](int x) {
    std::vector<int> d(k);
    for (int i = k - 1; i >= 0; --i) {
      d[i] = x % moduli[i];
      x /= moduli[i];
    }
    return d;
  };
  auto encode = [&](const std::vector<int>& d) {
    int x = 0;
    for (int i = 0; i < k; ++i) x = x * moduli[i] + d[i];
    return x;
  };
  std::vector<std::vector<int>> table(n, std::vector<int>(n));
  std::vector<std::string> names;
  for (int a = 0; a < n; ++a) {
    const auto da = digits(a);
    std::string name = "(";
    for (int i = 0; i < k; ++i) name += (i ? "," : "") + std::to_string(da[i]);
    names.push_back(name + ")");
    for (int b = 0; b < n; ++b) {
      const auto db = digits(b);
      std::vector<int> s(k);
      for (int i = 0; i < k; ++i) s[i] = (da[i] + db[i]) % moduli[i];
      table[a][b] = encode(s);
    }
  }
  std::vector<int> gens;
  for (int i = 0; i < k; ++i) {
    if (moduli[i] == 1) continue;
    std::vector<int> d(k, 0);
    d[i] = 1;
    gens.push_back(encode(d));
  }
  std::string id;
  bool uniform = std::all_of(moduli.begin(), moduli.end(), [&](int m) { return m == moduli[0]; });
  if (uniform && k > 1) {
    id = "(Z/" + std::to_string(moduli[0]) + ")^" + std::to_string(k);
  } else {
    for (int i = 0; i < k; ++i) id += (i ? "xZ/" : "Z/") + std::to_string(moduli[i]);
  }
  return finite(std::move(table), std::move(names), id, std::move(gens));
}

GroupSpec GroupSpec::symmetric(int n) {
  if (n < 1 || n > 5) throw DomainError("symmetric groups supported for 1 <= n <= 5");
  std::vector<std::vector<int>> perms;
  std::vector<int> p(n);
  std::iota(p.begin(), p.end(), 0);
  do {
    perms.push_back(p);
  } while (std::next_permutation(p.begin(), p.end()));
  std::map<std::vector<int>, int> index;
  for (int i = 0; i < static_cast<int>(perms.size()); ++i) index[perms[i]] = i;
  const int order = static_cast<int>(perms.size());
  std::vector<std::vector<int>> table(order, std::vector<int>(order));
  for (int a = 0; a < order; ++a) {
    for (int b = 0; b < order; ++b) {
      // (a*b)(x) = a(b(x))
      std::vector<int> c(n);
      for (int x = 0; x < n; ++x) c[x] = perms[a][perms[b][x]];
      table[a][b] = index[c];
    }
  }
  std::vector<std::string> names;
  for (const auto& q : perms) names.push_back(cycle_notation(q));
  std::vector<int> gens;
  if (n >= 2) {
    std::vector<int> t(n), cyc(n);
    std::iota(t.begin(), t.end(), 0);
    std::swap(t[0], t[1]);
    for (int x = 0; x < n; ++x) cyc[x] = (x + 1) % n;
    gens = {index[t], index[cyc]};
    if (gens[0] == gens[1]) gens.pop_back();
  }
  return finite(std::move(table), std::move(names), "S" + std::to_string(n), std::move(gens));
}

GroupSpec GroupSpec::dihedral(int n) {
  if (n < 1) throw DomainError("dihedral group needs n >= 1");
  const int order = 2 * n;
  // index = i + n*j  <->  r^i s^j
  std::vector<std::vector<int>> table(order, std::vector<int>(order));
  std::vector<std::string> names;
  for (int a = 0; a < order; ++a) {
    const int ai = a % n, aj = a / n;
    std::string name;
    if (ai == 0 && aj == 0) name = "e";
    if (ai == 1) name = "r";
    if (ai > 1) name = "r" + std::to_string(ai);
    if (aj == 1) name += "s";
    names.push_back(name);
    for (int b = 0; b < order; ++b) {
      const int bi = b % n, bj = b / n;
      const int ri = ((ai + (aj ? -bi : bi)) % n + n) % n;
      table[a][b] = ri + n * ((aj + bj) % 2);
    }
  }
  std::vector<int> gens;
  if (n > 1) gens.push_back(1);
  gens.push_back(n);
  return finite(std::move(table), std::move(names), "D" + std::to_string(n), std::move(gens));
}

GroupSpec GroupSpec::builtin(std::string_view id) {
  const std::string text(id);
  auto fail = [&]() -> GroupSpec {
    throw ParseError("unknown group id '" + text + "'", text, 0);
  };
  if (text.empty()) return fail();
  if (text.rfind("Z^", 0) == 0) return free_abelian(parse_int(text.substr(2), "group id"));
  if (text == "trivial") return cyclic(1);
  if (text.size() >= 2 && (text[0] == 'S' || text[0] == 'D') &&
      std::all_of(text.begin() + 1, text.end(), [](char ch) { return ch >= '0' && ch <= '9'; })) {
    const int n = parse_int(text.substr(1), "group id");
    return text[0] == 'S' ? symmetric(n) : dihedral(n);
  }
  if (text.rfind("(Z/", 0) == 0) {
    const auto close = text.find(")^");
    if (close == std::string::npos) return fail();
    const int m = parse_int(std::string_view(text).substr(3, close - 3), "group id");
    const int k = parse_int(std::string_view(text).substr(close + 2), "group id");
    if (k < 1) return fail();
    std::vector<int> moduli(k, m);
    return cyclic_product(moduli);
  }
  if (text.rfind("Z/", 0) == 0) {
    std::vector<int> moduli;
    std::size_t pos = 0;
    while (pos < text.size()) {
      if (text.compare(pos, 2, "Z/") != 0) return fail();
      pos += 2;
      auto next = text.find('x', pos);
      if (next == std::string::npos) next = text.size();
      moduli.push_back(parse_int(std::string_view(text).substr(pos, next - pos), "group id"));
      pos = next == text.size() ? next : next + 1;
    }
    return moduli.size() == 1 ? cyclic(moduli[0]) : cyclic_product(moduli);
  }
  return fail();
}

GroupSpec GroupSpec::from_json_text(std::string_view text, std::string id) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("group JSON: ") + e.what(), std::string(text), e.byte);
  }
  if (!doc.contains("order") || !doc.contains("table")) {
    throw DomainError("group JSON needs `order` and `table`");
  }
  const int n = doc["order"].get<int>();
  if (n < 1) throw DomainError("group JSON: order must be positive");
  std::vector<std::vector<int>> table(n, std::vector<int>(n));
  const auto& t = doc["table"];
  if (t.size() == static_cast<std::size_t>(n) && t[0].is_array()) {
    for (int a = 0; a < n; ++a) {
      if (t[a].size() != static_cast<std::size_t>(n)) throw DomainError("group JSON: ragged table");
      for (int b = 0; b < n; ++b) table[a][b] = t[a][b].get<int>();
    }
  } else if (t.size() == static_cast<std::size_t>(n) * n) {
    for (int a = 0; a < n; ++a) {
      for (int b = 0; b < n; ++b) table[a][b] = t[a * n + b].get<int>();
    }
  } else {
    throw DomainError("group JSON: table must have order*order entries");
  }
  std::vector<std::string> names;
  if (doc.contains("names")) names = doc["names"].get<std::vector<std::string>>();
  std::vector<int> gens;
  if (doc.contains("generators")) gens = doc["generators"].get<std::vector<int>>();
  return finite(std::move(table), std::move(names), std::move(id), std::move(gens));
}

GroupKind GroupSpec::kind() const { return impl_->kind; }
int GroupSpec::rank() const { return impl_->rank; }
int GroupSpec::order() const { return impl_->order; }
const std::string& GroupSpec::id() const { return impl_->id; }

Element GroupSpec::identity() const {
  return is_finite() ? Element::index(impl_->identity) : Element{};
}

Element GroupSpec::multiply(const Element& a, const Element& b) const {
  if (is_finite()) return Element::index(impl_->table[a.idx()][b.idx()]);
  Element r;
  for (int i = 0; i < impl_->rank; ++i) r.c[i] = a.c[i] + b.c[i];
  return r;
}

Element GroupSpec::inverse(const Element& a) const {
  if (is_finite()) return Element::index(impl_->inverse[a.idx()]);
  Element r;
  for (int i = 0; i < impl_->rank; ++i) r.c[i] = -a.c[i];
  return r;
}

Element GroupSpec::power(const Element& a, long long exponent) const {
  Element base = exponent < 0 ? inverse(a) : a;
  unsigned long long e = exponent < 0 ? -static_cast<unsigned long long>(exponent)
                                      : static_cast<unsigned long long>(exponent);
  Element result = identity();
  while (e) {
    if (e & 1ULL) result = multiply(result, base);
    base = multiply(base, base);
    e >>= 1;
  }
  return result;
}

bool GroupSpec::contains(const Element& a) const {
  if (is_finite()) {
    if (a.idx() < 0 || a.idx() >= impl_->order) return false;
    for (int i = 1; i < kMaxRank; ++i)
      if (a.c[i] != 0) return false;
    return true;
  }
  for (int i = impl_->rank; i < kMaxRank; ++i)
    if (a.c[i] != 0) return false;
  return true;
}

const std::vector<Element>& GroupSpec::generators() const { return impl_->generators; }

const std::vector<std::vector<int>>& GroupSpec::table() const {
  if (!is_finite()) throw BackendMismatch("table() requires a finite group");
  return impl_->table;
}

std::string GroupSpec::name(const Element& a) const {
  if (is_finite()) return impl_->names.at(a.idx());
  std::string out = "(";
  for (int i = 0; i < impl_->rank; ++i) out += (i ? "," : "") + std::to_string(a.c[i]);
  return out + ")";
}

std::optional<Element> GroupSpec::find_name(std::string_view name) const {
  if (!is_finite()) return std::nullopt;
  auto it = impl_->name_index.find(name);
  if (it == impl_->name_index.end()) return std::nullopt;
  return Element::index(it->second);
}

std::vector<Element> GroupSpec::elements() const {
  if (!is_finite()) throw BackendMismatch("elements() requires a finite group");
  std::vector<Element> out;
  out.reserve(impl_->order);
  for (int i = 0; i < impl_->order; ++i) out.push_back(Element::index(i));
  return out;
}

bool GroupSpec::operator==(const GroupSpec& other) const {
  if (impl_ == other.impl_) return true;
  if (impl_->kind != other.impl_->kind) return false;
  if (impl_->kind == GroupKind::FreeAbelian) return impl_->rank == other.impl_->rank;
  return impl_->order == other.impl_->order && impl_->table == other.impl_->table;
}

void require_same(const GroupSpec& a, const GroupSpec& b) {
  if (!(a == b)) throw BackendMismatch("elements belong to different groups (" + a.id() + " vs " + b.id() + ")");
}

Element multiply(const GroupSpec& spec, const Element& a, const Element& b) {
  if (!spec.contains(a) || !spec.contains(b)) {
    throw BackendMismatch("element does not belong to " + spec.id());
  }
  return spec.multiply(a, b);
}

std::vector<Element> enumerate_ball(const GroupSpec& spec, int radius) {
  if (spec.is_finite()) return spec.elements();
  if (radius < 0) throw DomainError("radius must be nonnegative");
  const int d = spec.rank();
  const int side = 2 * radius + 1;
  std::size_t count = 1;
  for (int i = 0; i < d; ++i) count *= side;
  std::vector<Element> out;
  out.reserve(count);
  Element cur;
  for (int i = 0; i < d; ++i) cur.c[i] = -radius;
  for (std::size_t n = 0; n < count; ++n) {
    out.push_back(cur);
    for (int i = d - 1; i >= 0; --i) {
      if (++cur.c[i] <= radius) break;
      cur.c[i] = -radius;
    }
  }
  return out;
}

int max_norm(const GroupSpec& spec, const Element& a) {
  if (spec.is_finite()) return 0;
  int m = 0;
  for (int i = 0; i < spec.rank(); ++i) m = std::max(m, std::abs(a.c[i]));
  return m;
}

SubgroupSet::SubgroupSet(GroupSpec spec, std::vector<int> elements)
    : spec_(std::move(spec)), elements_(std::move(elements)) {
  if (!spec_.is_finite()) throw BackendMismatch("SubgroupSet requires a finite group");
  std::sort(elements_.begin(), elements_.end());
  elements_.erase(std::unique(elements_.begin(), elements_.end()), elements_.end());
  const int n = spec_.order();
  for (int x : elements_) {
    if (x < 0 || x >= n) throw DomainError("subgroup element out of range");
  }
  if (!contains(spec_.identity().idx())) throw DomainError("subgroup must contain the identity");
  const auto& table = spec_.table();
  for (int a : elements_) {
    if (!contains(spec_.inverse(Element::index(a)).idx())) {
      throw DomainError("subset is not closed under inverses");
    }
    for (int b : elements_) {
      if (!contains(table[a][b])) throw DomainError("subset is not closed under products");
    }
  }
}

bool SubgroupSet::contains(int index) const {
  return std::binary_search(elements_.begin(), elements_.end(), index);
}

bool SubgroupSet::is_subset_of(const SubgroupSet& other) const {
  return std::includes(other.elements_.begin(), other.elements_.end(), elements_.begin(),
                       elements_.end());
}

namespace {

std::vector<int> closure_indices(const GroupSpec& spec, std::span<const int> generators) {
  const auto& table = spec.table();
  const int n = spec.order();
  std::vector<char> in(n, 0);
  std::vector<int> members{spec.identity().idx()};
  in[members[0]] = 1;
  std::vector<int> gens;
  for (int g : generators) {
    if (g < 0 || g >= n) throw BackendMismatch("generator does not belong to " + spec.id());
    gens.push_back(g);
  }
  for (std::size_t i = 0; i < members.size(); ++i) {
    const int x = members[i];
    for (int g : gens) {
      const int y = table[x][g];
      if (!in[y]) {
        in[y] = 1;
        members.push_back(y);
      }
    }
  }
  return members;
}

}  // namespace

SubgroupSet subgroup_generate(const GroupSpec& spec, std::span<const int> generators) {
  if (!spec.is_finite()) throw BackendMismatch("subgroup_generate requires a finite group");
  return SubgroupSet(spec, closure_indices(spec, generators));
}

SubgroupSet subgroup_generate(const GroupSpec& spec, std::span<const Element> generators) {
  std::vector<int> idx;
  for (const auto& g : generators) {
    if (!spec.contains(g)) throw BackendMismatch("generator does not belong to " + spec.id());
    idx.push_back(g.idx());
  }
  return subgroup_generate(spec, std::span<const int>(idx));
}

SubgroupSet subgroup_join(const SubgroupSet& a, const SubgroupSet& b) {
  require_same(a.spec(), b.spec());
  std::vector<int> gens = a.elements();
  gens.insert(gens.end(), b.elements().begin(), b.elements().end());
  return subgroup_generate(a.spec(), std::span<const int>(gens));
}

std::vector<SubgroupSet> enumerate_subgroups(const GroupSpec& spec, int cap) {
  if (!spec.is_finite()) throw BackendMismatch("enumerate_subgroups requires a finite group");
  cap = std::min(cap, kSubgroupEnumerationCap);
  const int n = spec.order();
  if (n > cap) {
    throw DomainError("group order " + std::to_string(n) + " exceeds the enumeration cap " +
                      std::to_string(cap));
  }
  const auto& table = spec.table();
  using Mask = std::uint64_t;
  auto bit = [](int x) { return Mask{1} << x; };

  // Closes `seed` under right multiplication by `gens`.
  auto close = [&](Mask seed, const std::vector<int>& gens) {
    std::vector<int> members;
    for (int x = 0; x < n; ++x)
      if (seed & bit(x)) members.push_back(x);
    Mask mask = seed;
    for (std::size_t i = 0; i < members.size(); ++i) {
      for (int g : gens) {
        const int y = table[members[i]][g];
        if (!(mask & bit(y))) {
          mask |= bit(y);
          members.push_back(y);
        }
      }
    }
    return mask;
  };

  // Every subgroup is a join of cyclic subgroups, so growing from {e} by
  // one cyclic generator at a time reaches all of them.
  std::vector<std::pair<Mask, int>> cyclic;  // (mask of <g>, g)
  {
    std::unordered_set<Mask> seen;
    for (int g = 0; g < n; ++g) {
      const Mask m = close(bit(spec.identity().idx()), {g});
      if (seen.insert(m).second) cyclic.emplace_back(m, g);
    }
  }

  struct Found {
    Mask mask;
    std::vector<int> gens;
  };
  std::vector<Found> found{{bit(spec.identity().idx()), {}}};
  std::unordered_set<Mask> known{found[0].mask};
  for (std::size_t i = 0; i < found.size(); ++i) {
    for (const auto& [cmask, g] : cyclic) {
      if ((cmask & found[i].mask) == cmask) continue;
      std::vector<int> gens = found[i].gens;
      gens.push_back(g);
      const Mask joined = close(found[i].mask | cmask, gens);
      if (known.insert(joined).second) found.push_back({joined, std::move(gens)});
    }
  }

  std::vector<std::vector<int>> sets;
  for (const auto& f : found) {
    std::vector<int> elems;
    for (int x = 0; x < n; ++x)
      if (f.mask & bit(x)) elems.push_back(x);
    sets.push_back(std::move(elems));
  }
  std::sort(sets.begin(), sets.end(), [](const auto& a, const auto& b) {
    return a.size() != b.size() ? a.size() < b.size() : a < b;
  });
  std::vector<SubgroupSet> out;
  out.reserve(sets.size());
  for (auto& s : sets) out.emplace_back(spec, std::move(s));
  return out;
}

bool is_automorphism(const GroupSpec& spec, std::span<const int> perm) {
  if (!spec.is_finite()) return false;
  const int n = spec.order();
  if (static_cast<int>(perm.size()) != n) return false;
  std::vector<char> hit(n, 0);
  for (int x : perm) {
    if (x < 0 || x >= n || hit[x]) return false;
    hit[x] = 1;
  }
  const auto& table = spec.table();
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      if (perm[table[a][b]] != table[perm[a]][perm[b]]) return false;
    }
  }
  return true;
}

}  // namespace algact
