#pragma once

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "gyrstab/abelian.hpp"
#include "gyrstab/expr.hpp"
#include "gyrstab/gyration.hpp"
#include "gyrstab/normalize.hpp"
#include "gyrstab/reldb.hpp"

namespace gyrstab::testing {

std::string data_dir();
std::string read_file(const std::string& path);

// Shipped dataset, parsed once.
const Database& shipped_db();
std::vector<SourceText> shipped_sources();

Expr ex(const std::string& text);

struct CorpusItem {
  std::string label;
  Expr expr;
  Dims dims;
};

// Basis composites, relation sides and the expressions the cases normalize.
std::vector<CorpusItem> expression_corpus(const Database& db);

// Assignments over the parameters a normalization of `e` actually reads.
std::vector<ParameterAssignment> reading_assignments(const Expr& e, Dims d, const Database& db);

struct Mutation {
  std::string name;
  std::string expected_kind;  // validation kind expected, empty if a parse error is expected
  std::function<std::vector<SourceText>(std::vector<SourceText>)> apply;
};
std::vector<Mutation> mutation_suite();

struct MutationOutcome {
  std::string name;
  bool applied = false;
  bool detected = false;
  std::string detail;
};
std::vector<MutationOutcome> run_mutations();

// Each returns a list of human-readable failures; empty means the property holds.
std::vector<std::string> idempotence_failures(const Database& db);
std::vector<std::string> confluence_failures(const Database& db, int seeds);
std::vector<std::string> linearity_failures(const Database& db);
std::vector<std::string> order_annihilation_failures(const Database& db);
std::vector<std::string> equivalence_law_failures(const Database& db);
std::vector<std::string> witness_replay_failures(const Database& db);

// Direct double loop over lambda and sign through apply_equivalence.
bool brute_force_related(const CaseDecl& c, const GroupElement& tau_bar, const GroupElement& omega_bar,
                         const Database& db, const ParameterAssignment& asg, Int lambda_range);

// Partition of coordinate tuples; classes sorted, members sorted.
using CoordPartition = std::set<std::set<Coords>>;
CoordPartition partition_of(const std::vector<Coords>& points,
                            const std::function<bool(const Coords&, const Coords&)>& related);
CoordPartition engine_partition(const CaseContext& ctx, SignPolicy policy);

// Hand-derived congruence systems for the Z-twisting OP2 cases.
// k=4: points (a1 mod 8, a2 mod 3), parameter xi.
bool op2_k4_related(const Coords& t, const Coords& u, Int xi, SignPolicy policy);
// k=12: points (t1 mod 8, t2 mod 9, t3 mod 7), parameter theta.
bool op2_k12_related(const Coords& t, const Coords& u, Int theta, SignPolicy policy);
// HP2 k=4: points (t1 mod 8, t2 mod 3), parameter sign4.
bool hp2_k4_related(const Coords& t, const Coords& u, Int sign4);

std::vector<Coords> box(const std::vector<Int>& orders);

std::string join(const std::vector<std::string>& lines, std::size_t max = 20);

}  // namespace gyrstab::testing
