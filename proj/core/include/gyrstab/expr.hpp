#pragma once

#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "gyrstab/abelian.hpp"

namespace gyrstab {

struct SourcePos {
  std::string file;
  int line = 0;
  int column = 0;
  std::string to_string() const;
};

class ExprError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public ExprError {
 public:
  using ExprError::ExprError;
};

class ExprParseError : public ExprError {
 public:
  ExprParseError(int column, const std::string& msg)
      : ExprError("column " + std::to_string(column) + ": " + msg), column_(column), message_(msg) {}
  int column() const { return column_; }
  const std::string& message() const { return message_; }

 private:
  int column_;
  std::string message_;
};

// A homotopy class S^dom -> S^cod.
struct Dims {
  int dom = 0;
  int cod = 0;
  bool operator==(const Dims&) const = default;
  std::string to_string() const;
};

// family(n) : S^{n+shift} -> S^n, defined for min_index <= n <= max_index.
struct Family {
  std::string name;
  int shift = 0;
  int min_index = 1;
  std::optional<int> max_index;
  std::optional<int> susp_from;
  Int order = 0;
  int order_from = 0;
  // This family is the iterated suspension of `desusp` (e.g. Snu' of nu').
  std::string desusp;
  std::string citation;
  SourcePos pos;

  bool in_range(int n) const { return n >= min_index && (!max_index || n <= *max_index); }
  bool suspension_at(int n) const { return susp_from && n >= *susp_from; }
  Int order_at(int n) const { return n >= order_from ? order : 0; }
};

// Name resolution for families and element-valued parameters.
class TypeTable {
 public:
  void add_family(Family f);
  const Family* family(std::string_view name) const;
  // Family whose members are suspensions of `base` beyond its index range.
  const Family* alias_of(std::string_view base) const;
  const std::vector<Family>& families() const { return families_; }

  void set_param(const std::string& name, std::optional<Dims> dims) { params_[name] = dims; }
  bool has_param(std::string_view name) const { return params_.count(std::string(name)) > 0; }
  std::optional<Dims> param_dims(std::string_view name) const;

 private:
  std::vector<Family> families_;
  std::map<std::string, std::optional<Dims>, std::less<>> params_;
};

struct Expr;

struct Node {
  enum class Kind { Atom, Whitehead, Susp, Group, Param };
  Kind kind = Kind::Atom;
  std::string name;  // family (Atom) or parameter (Param)
  int index = 0;     // sphere index (Atom) or degree (Susp)
  std::shared_ptr<const Expr> left;
  std::shared_ptr<const Expr> right;

  static Node atom(std::string family, int n);
  static Node whitehead(Expr a, Expr b);
  static Node susp(int k, Expr inner);
  static Node group(Expr inner);
  static Node param(std::string name);

  bool is_atom() const { return kind == Kind::Atom; }
  bool operator==(const Node& o) const;
};

using Chain = std::vector<Node>;

struct Term {
  Int coef = 1;
  std::vector<std::string> scalars;  // scalar parameters multiplying the term
  Chain chain;
  bool operator==(const Term& o) const { return coef == o.coef && scalars == o.scalars && chain == o.chain; }
};

struct Expr {
  std::vector<Term> terms;

  static Expr zero() { return {}; }
  static Expr of(Node n, Int coef = 1);
  static Expr of_chain(Chain c, Int coef = 1);
  bool is_zero() const { return terms.empty(); }
  // A single coefficient-one term with no scalars.
  bool is_simple() const;
  bool operator==(const Expr& o) const { return terms == o.terms; }
};

std::string to_string(const Expr& e);
std::string to_string(const Node& n);
std::string to_string(const Chain& c);

Expr parse_expr(std::string_view text);

std::optional<Dims> node_dims(const Node& n, const TypeTable& types);
// nullopt for the zero expression; throws DimensionError on inconsistency.
std::optional<Dims> expr_dims(const Expr& e, const TypeTable& types);
Dims chain_dims(const Chain& c, const TypeTable& types);

bool atom_is_suspension(const Node& n, const TypeTable& types);
Int atom_order(const Node& n, const TypeTable& types);
// Index-shifted atom, or its pre-suspended alias; nullopt when neither exists.
std::optional<Node> suspend_atom(const Node& n, int k, const TypeTable& types);

Expr add(const Expr& a, const Expr& b);
Expr scale(Int n, const Expr& e);
// Merge identical (scalars, chain) terms and drop zero coefficients; first-occurrence order.
Expr collect(const Expr& e);

Expr compose(const Expr& e1, const Expr& e2, const TypeTable& types);
Expr suspend(const Expr& e, int k, const TypeTable& types);
Expr whitehead(const Expr& e1, const Expr& e2, const TypeTable& types);

// Names of parameters referenced anywhere in e (scalar and element).
std::vector<std::string> referenced_params(const Expr& e);

}  // namespace gyrstab
