#include "gyrstab/abelian.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <sstream>

namespace gyrstab {

GroupPresentation::GroupPresentation(std::vector<Factor> factors) : factors_(std::move(factors)) {
  std::set<std::string> seen;
  for (const auto& f : factors_) {
    if (f.order < 0 || f.order == 1)
      throw AbelianError("factor '" + f.name + "' has invalid order " + std::to_string(f.order));
    if (!seen.insert(f.name).second) throw AbelianError("duplicate generator name '" + f.name + "'");
  }
}

bool GroupPresentation::finite() const {
  return std::all_of(factors_.begin(), factors_.end(), [](const Factor& f) { return f.order > 0; });
}

Int GroupPresentation::cardinality() const {
  Int n = 1;
  for (const auto& f : factors_) {
    if (f.order == 0) return 0;
    n *= f.order;
  }
  return n;
}

int GroupPresentation::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < factors_.size(); ++i)
    if (factors_[i].name == name) return static_cast<int>(i);
  return -1;
}

std::string GroupPresentation::to_string() const {
  if (factors_.empty()) return "0";
  std::string out;
  for (std::size_t i = 0; i < factors_.size(); ++i) {
    if (i) out += " + ";
    out += factors_[i].order == 0 ? "Z" : "Z/" + std::to_string(factors_[i].order);
    out += "<" + factors_[i].name + ">";
  }
  return out;
}

GroupRef make_group(std::vector<Factor> factors) {
  return std::make_shared<const GroupPresentation>(std::move(factors));
}

Int mod_floor(Int a, Int m) {
  Int r = a % m;
  return r < 0 ? r + m : r;
}

GroupElement::GroupElement(GroupRef group, Coords coords) : group_(std::move(group)), coords_(std::move(coords)) {
  if (!group_) throw AbelianError("element without group");
  if (coords_.size() != group_->rank())
    throw AbelianError("coordinate vector has length " + std::to_string(coords_.size()) + ", presentation has " +
                       std::to_string(group_->rank()) + " factors");
}

GroupElement GroupElement::zero(GroupRef group) {
  Coords c(group->rank(), 0);
  return GroupElement(std::move(group), std::move(c));
}

bool GroupElement::is_zero() const {
  return std::all_of(coords_.begin(), coords_.end(), [](Int c) { return c == 0; });
}

std::string GroupElement::to_string() const {
  std::string out = "(";
  for (std::size_t i = 0; i < coords_.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(coords_[i]);
  }
  return out + ")";
}

bool GroupElement::operator==(const GroupElement& o) const {
  return same_group(group_, o.group_) && coords_ == o.coords_;
}

bool same_group(const GroupRef& a, const GroupRef& b) {
  if (a == b) return true;
  return a && b && *a == *b;
}

GroupElement normalize(const GroupElement& e) {
  Coords c = e.coords();
  for (std::size_t i = 0; i < c.size(); ++i) {
    Int o = e.group()->order(i);
    if (o > 0) c[i] = mod_floor(c[i], o);
  }
  return GroupElement(e.group(), std::move(c));
}

static void require_same(const GroupElement& a, const GroupElement& b) {
  if (!same_group(a.group(), b.group()))
    throw AbelianError("presentation mismatch: " + a.group()->to_string() + " vs " + b.group()->to_string());
}

GroupElement add(const GroupElement& a, const GroupElement& b) {
  require_same(a, b);
  Coords c = a.coords();
  for (std::size_t i = 0; i < c.size(); ++i) c[i] += b[i];
  return normalize(GroupElement(a.group(), std::move(c)));
}

GroupElement sub(const GroupElement& a, const GroupElement& b) { return add(a, neg(b)); }

GroupElement scale(Int n, const GroupElement& a) {
  Coords c = a.coords();
  for (std::size_t i = 0; i < c.size(); ++i) {
    Int o = a.group()->order(i);
    c[i] = o > 0 ? mod_floor(mod_floor(n, o) * mod_floor(c[i], o), o) : n * c[i];
  }
  return normalize(GroupElement(a.group(), std::move(c)));
}

GroupElement neg(const GroupElement& a) { return scale(-1, a); }

Int gcd(Int a, Int b) { return std::gcd(a, b); }
Int lcm(Int a, Int b) { return std::lcm(a, b); }

Int exponent(const GroupPresentation& g) {
  Int e = 1;
  for (const auto& f : g.factors())
    if (f.order > 0) e = lcm(e, f.order);
  return e;
}

Int element_order(const GroupElement& e) {
  Int n = 1;
  for (std::size_t i = 0; i < e.coords().size(); ++i) {
    Int o = e.group()->order(i);
    Int c = e[i];
    if (o == 0) {
      if (c != 0) return 0;
      continue;
    }
    n = lcm(n, o / gcd(o, mod_floor(c, o)));
  }
  return n;
}

std::vector<GroupElement> enumerate(const GroupRef& g) {
  if (!g->finite()) throw AbelianError("cannot enumerate infinite group " + g->to_string());
  std::vector<GroupElement> out;
  Coords c(g->rank(), 0);
  out.reserve(static_cast<std::size_t>(g->cardinality()));
  while (true) {
    out.emplace_back(g, c);
    std::size_t i = c.size();
    while (i > 0) {
      --i;
      if (++c[i] < g->order(i)) break;
      c[i] = 0;
      if (i == 0) return out;
    }
    if (c.empty()) return out;
  }
}

bool ReachableSet::contains(const GroupElement& e) const {
  return table_.count(normalize(e).coords()) > 0;
}

const Coords& ReachableSet::witness(const GroupElement& e) const {
  auto it = table_.find(normalize(e).coords());
  if (it == table_.end()) throw AbelianError("element " + e.to_string() + " is not reachable");
  return it->second;
}

ReachableSet reachable_set(const std::vector<GroupElement>& images, const std::vector<Int>& bounds) {
  if (images.empty()) throw AbelianError("reachable_set: empty images list");
  if (bounds.size() != images.size()) throw AbelianError("reachable_set: bounds/images length mismatch");
  const GroupRef& target = images.front().group();
  for (const auto& im : images) require_same(images.front(), im);
  for (Int b : bounds)
    if (b <= 0) throw AbelianError("reachable_set: bounds must be positive");

  // Build from the last coordinate backwards so that, for each element, the stored
  // witness is the lexicographically smallest coefficient vector.
  const std::size_t n = images.size();
  std::map<Coords, Coords> table;
  table[GroupElement::zero(target).coords()] = Coords{};
  for (std::size_t idx = n; idx-- > 0;) {
    std::map<Coords, Coords> next;
    GroupElement step = normalize(images[idx]);
    for (Int c = 0; c < bounds[idx]; ++c) {
      GroupElement shift = scale(c, step);
      for (const auto& [elem, wit] : table) {
        GroupElement e = add(GroupElement(target, elem), shift);
        Coords w;
        w.reserve(wit.size() + 1);
        w.push_back(c);
        w.insert(w.end(), wit.begin(), wit.end());
        auto it = next.find(e.coords());
        if (it == next.end())
          next.emplace(e.coords(), std::move(w));
        else if (w < it->second)
          it->second = std::move(w);
      }
    }
    table = std::move(next);
  }
  return ReachableSet(target, std::move(table));
}

std::vector<GroupElement> subgroup_elements(const Subgroup& s) {
  if (s.generators.empty()) return {GroupElement::zero(s.ambient)};
  Int ex = exponent(*s.ambient);
  std::vector<Int> bounds;
  for (const auto& g : s.generators) {
    Int o = element_order(g);
    bounds.push_back(o > 0 ? o : ex);
  }
  ReachableSet r = reachable_set(s.generators, bounds);
  std::vector<GroupElement> out;
  for (const auto& [c, w] : r.table()) out.emplace_back(s.ambient, c);
  return out;
}

bool subgroup_contains(const Subgroup& s, const GroupElement& e) {
  if (!same_group(s.ambient, e.group())) throw AbelianError("subgroup_contains: presentation mismatch");
  GroupElement ne = normalize(e);
  if (ne.is_zero()) return true;
  for (const auto& x : subgroup_elements(s))
    if (x == ne) return true;
  return false;
}

namespace {
struct UnionFind {
  std::vector<std::size_t> parent;
  explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};
}  // namespace

Partition orbit_partition(const std::vector<GroupElement>& points, const Related& related) {
  const std::size_t n = points.size();
  for (std::size_t i = 0; i < n; ++i)
    if (!related(points[i], points[i]))
      throw AbelianError("relation is not reflexive at " + points[i].to_string());

  UnionFind uf(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      bool ij = related(points[i], points[j]);
      bool ji = related(points[j], points[i]);
      if (ij != ji)
        throw AbelianError("relation is not symmetric on " + points[i].to_string() + ", " + points[j].to_string());
      if (ij) uf.unite(i, j);
    }
  }

  std::map<std::size_t, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < n; ++i) groups[uf.find(i)].push_back(i);

  Partition p;
  for (auto& [root, members] : groups) {
    std::size_t rep = members.front();
    for (std::size_t m : members)
      if (points[m].coords() < points[rep].coords()) rep = m;
    p.classes.push_back(std::move(members));
    p.representatives.push_back(rep);
  }
  std::vector<std::size_t> order(p.classes.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return points[p.representatives[a]].coords() < points[p.representatives[b]].coords();
  });
  Partition sorted;
  for (std::size_t k : order) {
    sorted.classes.push_back(std::move(p.classes[k]));
    sorted.representatives.push_back(p.representatives[k]);
  }
  return sorted;
}

}  // namespace gyrstab
