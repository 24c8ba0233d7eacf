#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "gyrstab/abelian.hpp"
#include "gyrstab/expr.hpp"
#include "gyrstab/reldb.hpp"

namespace gyrstab {

class StuckError : public ExprError {
 public:
  StuckError(std::string chain, const std::string& why)
      : ExprError("stuck: " + chain + (why.empty() ? "" : " (" + why + ")")), chain_(std::move(chain)) {}
  const std::string& chain() const { return chain_; }

 private:
  std::string chain_;
};

class UndeclaredGroupError : public ExprError {
 public:
  explicit UndeclaredGroupError(Dims d)
      : ExprError("undeclared hom-group pi_" + std::to_string(d.dom) + "(S^" + std::to_string(d.cod) + ")"), dims_(d) {}
  Dims dims() const { return dims_; }

 private:
  Dims dims_;
};

class UnassignedParameterError : public ExprError {
 public:
  explicit UnassignedParameterError(std::string name)
      : ExprError("unassigned parameter '" + name + "'"), name_(std::move(name)) {}
  const std::string& name() const { return name_; }

 private:
  std::string name_;
};

struct NormalizeOptions {
  std::uint64_t step_budget = 10000;
  // When set, redexes and rules are chosen pseudo-randomly from this seed.
  std::optional<std::uint64_t> shuffle_seed;
  // Relation indices that must not be used (validator consistency checks).
  std::set<std::size_t> excluded_relations;
};

struct NormalizeTrace {
  std::set<std::string> params_used;
  std::set<std::size_t> relations_used;
  std::uint64_t steps = 0;
};

// Normal form of e in its declared hom-group. `dims` is required when e is the zero expression.
GroupElement normalize(const Expr& e, const Database& db, const ParameterAssignment& asg,
                       const NormalizeOptions& opts = {}, NormalizeTrace* trace = nullptr,
                       std::optional<Dims> dims = std::nullopt);

bool is_suspension_expr(const Expr& e, const Database& db, const ParameterAssignment& asg = {});

}  // namespace gyrstab
