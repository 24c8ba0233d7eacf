#pragma once

#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "gyrstab/abelian.hpp"
#include "gyrstab/normalize.hpp"
#include "gyrstab/reldb.hpp"

namespace gyrstab {

class GyrationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// phi = i1.a + b * i2.S^{k-1}f + c * [i1, i2]
struct AttachingMap {
  int m = 0;
  int k = 0;
  GroupElement a;  // in pi_{2m+k-2}(S^m)
  Int b = 1;
  Int c = 1;
  bool operator==(const AttachingMap& o) const { return m == o.m && k == o.k && a == o.a && b == o.b && c == o.c; }
};

struct SelfEquivalence {
  int sign_i = 0;
  int sign_j = 0;
  GroupElement lambda;  // in pi_{m+k-1}(S^m)
};

struct Witness {
  GroupElement lambda;
  int sign = 1;
};

// global: one sign for the whole criterion. per_prime: each primary component of the
// attaching group may use its own sign (diagnostic only; produces no witnesses).
enum class SignPolicy { global, per_prime };

std::string to_string(SignPolicy p);

// Everything needed to decide equivalence for one case under one parameter assignment.
class CaseContext {
 public:
  CaseContext(const Database& db, const CaseDecl& c, ParameterAssignment asg);

  const CaseDecl& decl() const { return *case_; }
  const ParameterAssignment& assignment() const { return asg_; }
  const GroupDecl& twist_group() const { return *twist_; }
  const GroupDecl& attach_group() const { return *attach_; }
  const GroupDecl& lambda_group() const { return *lambda_; }

  // Possible tau-bar values, lexicographically ordered, always containing 0.
  const std::vector<GroupElement>& twist_points() const { return points_; }
  // a-component of phi for each twist point.
  const GroupElement& attach_a(std::size_t point) const { return a_.at(point); }
  GroupElement attach_a(const GroupElement& tau_bar) const;

  // Delta(lambda) = lambda.S^{k-1}f + [iota_m, lambda] on the named lambda generators.
  const std::vector<std::size_t>& lambda_factors() const { return lambda_factors_; }
  const std::vector<GroupElement>& delta_images() const { return delta_; }
  const std::vector<Int>& lambda_bounds() const { return bounds_; }
  const ReachableSet& reachable() const { return reach_; }

  // Parameters read by the normalizations of this context.
  const std::set<std::string>& params_used() const { return trace_.params_used; }
  const std::set<std::size_t>& relations_used() const { return trace_.relations_used; }

  std::optional<Witness> equivalent(const GroupElement& tau_bar, const GroupElement& omega_bar) const;
  bool equivalent_per_prime(const GroupElement& tau_bar, const GroupElement& omega_bar) const;
  bool related(const GroupElement& tau_bar, const GroupElement& omega_bar, SignPolicy policy) const;

  // Lambda as a group element from coefficients on lambda_factors().
  GroupElement lambda_element(const Coords& coefs) const;

 private:
  std::size_t point_index(const GroupElement& tau_bar) const;

  const Database* db_;
  const CaseDecl* case_;
  ParameterAssignment asg_;
  const GroupDecl* twist_ = nullptr;
  const GroupDecl* attach_ = nullptr;
  const GroupDecl* lambda_ = nullptr;
  std::vector<GroupElement> points_;
  std::vector<GroupElement> a_;
  std::vector<std::size_t> lambda_factors_;
  std::vector<GroupElement> delta_;
  std::vector<Int> bounds_;
  ReachableSet reach_;
  std::vector<Int> primes_;
  std::vector<std::set<Coords>> reach_by_prime_;
  NormalizeTrace trace_;
};

std::vector<GroupElement> twist_image(const CaseDecl& c, const Database& db, const ParameterAssignment& asg = {});

AttachingMap attaching_map(const CaseDecl& c, const GroupElement& tau_bar, const Database& db,
                           const ParameterAssignment& asg, NormalizeTrace* trace = nullptr);

AttachingMap apply_equivalence(const CaseDecl& c, const SelfEquivalence& eps, const AttachingMap& phi,
                               const Database& db, const ParameterAssignment& asg, NormalizeTrace* trace = nullptr);

// Witness with full re-verification through apply_equivalence.
std::optional<Witness> equivalent(const CaseDecl& c, const GroupElement& tau_bar, const GroupElement& omega_bar,
                                  const Database& db, const ParameterAssignment& asg);

// The three normalized summands of the criterion for a given lambda.
struct CriterionTerms {
  GroupElement f_tau;
  GroupElement lambda_f;
  GroupElement whitehead;
  GroupElement f_omega;
  NormalizeTrace trace;
};
CriterionTerms criterion_terms(const CaseDecl& c, const GroupElement& tau_bar, const GroupElement& omega_bar,
                               const GroupElement& lambda, const Database& db, const ParameterAssignment& asg);

// Parameters that influence a case, found by tracing normalizations to a fixpoint.
std::vector<std::string> case_parameters(const CaseDecl& c, const Database& db);

// Assignments a case ranges over; `pins` fixes parameters by value string.
std::vector<ParameterAssignment> case_assignments(const CaseDecl& c, const Database& db,
                                                  const std::map<std::string, std::string>& pins = {});

struct ClassInfo {
  std::size_t representative;           // index into twist points
  std::vector<std::size_t> members;     // ascending
  std::vector<std::optional<Witness>> witnesses;  // representative -> member (global policy only)
};

struct AssignmentResult {
  ParameterAssignment assignment;
  std::vector<GroupElement> points;
  std::vector<GroupElement> attach;
  std::vector<ClassInfo> classes;
  std::size_t count() const { return classes.size(); }
};

struct StabilityReport {
  Plane plane = Plane::C;
  int m = 2;
  int k = 2;
  SignPolicy policy = SignPolicy::global;
  bool trivial_twist = false;
  std::string note;
  std::vector<std::string> assumptions;
  std::vector<std::string> parameters;
  std::vector<AssignmentResult> results;

  std::string case_id() const;
  // count -> indices into results achieving it
  std::map<std::size_t, std::vector<std::size_t>> aggregate() const;
  bool gsi() const;
};

StabilityReport classify(Plane plane, int k, const Database& db, SignPolicy policy = SignPolicy::global,
                         const std::map<std::string, std::string>& pins = {});

struct TableRow {
  std::string manifold;  // "CP2", "HP2", "OP2", "S^n"
  int k = 0;
  bool gsi = true;
  std::vector<std::size_t> counts;  // distinct counts, ascending
  std::string detail;               // per-count parameter keys, or a note
  std::optional<StabilityReport> report;
};

// Paper rows first in fixed order, then the trivial-twist rows, then the sphere row.
std::vector<TableRow> table(const Database& db, SignPolicy policy = SignPolicy::global);

struct TheoremACheck {
  Plane plane;
  bool ok = true;
  std::string detail;
};
std::vector<TheoremACheck> theorem_a_check(const Database& db);

}  // namespace gyrstab
