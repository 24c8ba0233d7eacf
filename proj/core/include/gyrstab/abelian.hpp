#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace gyrstab {

using Int = std::int64_t;
using Coords = std::vector<Int>;

class AbelianError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// One cyclic summand. order == 0 means infinite cyclic.
struct Factor {
  std::string name;
  Int order = 0;
  bool operator==(const Factor&) const = default;
};

class GroupPresentation {
 public:
  GroupPresentation() = default;
  explicit GroupPresentation(std::vector<Factor> factors);

  const std::vector<Factor>& factors() const { return factors_; }
  std::size_t rank() const { return factors_.size(); }
  Int order(std::size_t i) const { return factors_.at(i).order; }
  bool finite() const;
  // Number of elements, 0 if infinite.
  Int cardinality() const;
  int index_of(std::string_view name) const;
  std::string to_string() const;

  bool operator==(const GroupPresentation& o) const { return factors_ == o.factors_; }

 private:
  std::vector<Factor> factors_;
};

using GroupRef = std::shared_ptr<const GroupPresentation>;

GroupRef make_group(std::vector<Factor> factors);

Int mod_floor(Int a, Int m);

class GroupElement {
 public:
  GroupElement() = default;
  GroupElement(GroupRef group, Coords coords);
  static GroupElement zero(GroupRef group);

  const GroupRef& group() const { return group_; }
  const Coords& coords() const { return coords_; }
  Int operator[](std::size_t i) const { return coords_[i]; }
  bool is_zero() const;
  std::string to_string() const;

  bool operator==(const GroupElement& o) const;
  bool operator<(const GroupElement& o) const { return coords_ < o.coords_; }

 private:
  GroupRef group_;
  Coords coords_;
};

bool same_group(const GroupRef& a, const GroupRef& b);

GroupElement normalize(const GroupElement& e);
GroupElement add(const GroupElement& a, const GroupElement& b);
GroupElement sub(const GroupElement& a, const GroupElement& b);
GroupElement scale(Int n, const GroupElement& a);
GroupElement neg(const GroupElement& a);

Int gcd(Int a, Int b);
Int lcm(Int a, Int b);
Int exponent(const GroupPresentation& g);
// Order of an element, 0 if infinite.
Int element_order(const GroupElement& e);

// All elements of a finite group in lexicographic coordinate order.
std::vector<GroupElement> enumerate(const GroupRef& g);

class ReachableSet {
 public:
  ReachableSet() = default;
  ReachableSet(GroupRef target, std::map<Coords, Coords> table)
      : target_(std::move(target)), table_(std::move(table)) {}

  bool contains(const GroupElement& e) const;
  // Lexicographically smallest coefficient vector reaching e; throws if absent.
  const Coords& witness(const GroupElement& e) const;
  std::size_t size() const { return table_.size(); }
  const std::map<Coords, Coords>& table() const { return table_; }
  const GroupRef& target() const { return target_; }

 private:
  GroupRef target_;
  std::map<Coords, Coords> table_;
};

ReachableSet reachable_set(const std::vector<GroupElement>& images, const std::vector<Int>& bounds);

struct Subgroup {
  GroupRef ambient;
  std::vector<GroupElement> generators;
};

bool subgroup_contains(const Subgroup& s, const GroupElement& e);
std::vector<GroupElement> subgroup_elements(const Subgroup& s);

struct Partition {
  // Indices into the input point list; classes sorted by representative, members ascending.
  std::vector<std::vector<std::size_t>> classes;
  std::vector<std::size_t> representatives;
  std::size_t count() const { return classes.size(); }
};

using Related = std::function<bool(const GroupElement&, const GroupElement&)>;

// Throws AbelianError when related is not reflexive or not symmetric on points.
Partition orbit_partition(const std::vector<GroupElement>& points, const Related& related);

}  // namespace gyrstab
