#pragma once

#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "gyrstab/abelian.hpp"
#include "gyrstab/expr.hpp"

namespace gyrstab {

struct GroupDecl {
  Dims dims;  // pi_dom(S^cod)
  GroupRef presentation;
  // Basis composite per factor; nullopt for an unnamed summand ("_").
  std::vector<std::optional<Expr>> basis;
  std::optional<std::vector<Expr>> suspension_subgroup;
  std::string citation;
  std::string subgroup_citation;
  SourcePos pos;
  SourcePos subgroup_pos;

  bool named(std::size_t i) const { return basis[i].has_value(); }
};

struct RelationDecl {
  Expr lhs;
  Expr rhs;
  std::string citation;
  std::vector<std::string> parameters;
  SourcePos pos;
};

struct ParameterDecl {
  std::string name;
  std::optional<Dims> dims;             // set for class-valued parameters
  std::vector<Int> scalar_values;       // scalar parameters
  std::vector<Expr> element_values;     // class-valued parameters
  std::string citation;
  SourcePos pos;

  bool is_scalar() const { return !dims.has_value(); }
  std::size_t domain_size() const { return is_scalar() ? scalar_values.size() : element_values.size(); }
  std::string value_string(std::size_t i) const;
};

enum class Plane { C, H, O };

int plane_m(Plane p);
std::string plane_name(Plane p);  // "CP2", "HP2", "OP2"
char plane_letter(Plane p);
std::optional<Plane> parse_plane(std::string_view s);

struct CaseDecl {
  Plane plane = Plane::C;
  int m = 2;
  int k = 2;
  GroupRef twist_group;
  bool image_full = false;
  std::vector<Expr> image;  // generators of the twist image when not full
  Expr f;
  std::string citation;
  SourcePos pos;

  Dims twist_dims() const { return {2 * m + k - 2, 2 * m - 1}; }
  Dims attach_dims() const { return {2 * m + k - 2, m}; }
  Dims lambda_dims() const { return {m + k - 1, m}; }
  std::string id() const;
};

// Bott periodicity: pi_{k-1}(SO(n)) in the stable range.
// Returns 2 for Z/2, 0 for Z, 1 for the trivial group.
Int bott_order(int k);

struct Trivia {
  std::string text;  // a comment or blank line, kept for canonical round trips
};

struct FamilyRef { std::size_t index; };
struct GroupRefDecl { std::size_t index; };
struct SubgroupRefDecl { std::size_t index; };
struct RelationRef { std::size_t index; };
struct ParamRef { std::size_t index; };
struct CaseRef { std::size_t index; };
using DeclRef = std::variant<Trivia, FamilyRef, GroupRefDecl, SubgroupRefDecl, RelationRef, ParamRef, CaseRef>;

struct DbError {
  SourcePos pos;
  std::string message;
  std::string to_string() const { return pos.to_string() + ": " + message; }
};

class Database {
 public:
  TypeTable types;
  std::vector<GroupDecl> groups;
  std::vector<RelationDecl> relations;
  std::vector<ParameterDecl> parameters;
  std::vector<CaseDecl> cases;
  // Declaration order per source file, for serialization.
  std::vector<std::pair<std::string, std::vector<DeclRef>>> layout;

  const GroupDecl* group(Dims d) const;
  const ParameterDecl* parameter(std::string_view name) const;
  const CaseDecl* find_case(Plane p, int k) const;
  // Basis expression for an element: sum of coord * basis composite. Throws on unnamed nonzero coords.
  Expr element_expr(const GroupDecl& g, const GroupElement& e) const;
  std::string element_string(const GroupDecl& g, const GroupElement& e) const;
};

struct ParameterAssignment {
  std::map<std::string, std::size_t> choice;  // parameter name -> index into its domain

  bool has(const std::string& name) const { return choice.count(name) > 0; }
  std::string to_string(const Database& db) const;
  bool operator==(const ParameterAssignment&) const = default;
};

struct ParseResult {
  Database db;
  std::vector<DbError> errors;
  bool ok() const { return errors.empty(); }
};

struct SourceText {
  std::string name;
  std::string text;
};

ParseResult parse_database(const std::vector<SourceText>& sources);
ParseResult parse_database(const std::string& text, const std::string& name = "<input>");

// Canonical text, one file at a time in layout order.
std::string serialize(const Database& db, const std::string& file);
std::string serialize(const Database& db);

// Cartesian product of parameter domains. With `restrict`, only those parameters, in db order.
std::vector<ParameterAssignment> assignments(const Database& db,
                                             const std::optional<std::vector<std::string>>& restrict = std::nullopt);
// Every parameter set to its first domain value.
ParameterAssignment default_assignment(const Database& db);

struct ValidationFailure {
  std::string kind;
  std::string location;
  std::string detail;
  std::string to_json() const;
};

std::vector<ValidationFailure> validate(const Database& db);

// Dataset loading: `path` may be a directory (toda.rdb + cases.rdb) or a single file.
// Empty path resolves GYRSTAB_DB, then the build-tree and installed data directories.
std::optional<std::string> resolve_dataset_path(const std::string& path = "");
ParseResult load_database(const std::string& path = "");

}  // namespace gyrstab
