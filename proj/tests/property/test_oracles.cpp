#include <gtest/gtest.h>

#include "support.hpp"

using namespace gyrstab;
using namespace gyrstab::testing;

namespace {

const CaseDecl& case_of(Plane p, int k) { return *shipped_db().find_case(p, k); }

Int scalar(const ParameterAssignment& a, const std::string& name) {
  return shipped_db().parameter(name)->scalar_values[a.choice.at(name)];
}

std::vector<std::size_t> sizes(const CoordPartition& p) {
  std::vector<std::size_t> out;
  for (const auto& c : p) out.push_back(c.size());
  std::sort(out.begin(), out.end());
  return out;
}

void agree_with_brute_force(Plane p, int k) {
  const Database& db = shipped_db();
  const CaseDecl& c = case_of(p, k);
  for (const auto& a : case_assignments(c, db)) {
    CaseContext ctx(db, c, a);
    for (const auto& x : ctx.twist_points())
      for (const auto& y : ctx.twist_points()) {
        bool search = ctx.equivalent(x, y).has_value();
        bool loop = brute_force_related(c, x, y, db, a, 12);
        EXPECT_EQ(search, loop) << c.id() << " " << x.to_string() << " ~ " << y.to_string();
      }
  }
}

}  // namespace

TEST(Oracle, BruteForceHp2K2) { agree_with_brute_force(Plane::H, 2); }

TEST(Oracle, BruteForceCp2K2) { agree_with_brute_force(Plane::C, 2); }

TEST(Oracle, BruteForceOp2K2) { agree_with_brute_force(Plane::O, 2); }

TEST(Oracle, BruteForceOp2K9) { agree_with_brute_force(Plane::O, 9); }

TEST(Oracle, Hp2K4CongruenceSystem) {
  const Database& db = shipped_db();
  const CaseDecl& c = case_of(Plane::H, 4);
  for (const auto& a : case_assignments(c, db)) {
    Int sign4 = scalar(a, "sign4");
    CaseContext ctx(db, c, a);
    auto oracle = partition_of(box({8, 3}), [&](const Coords& t, const Coords& u) { return hp2_k4_related(t, u, sign4); });
    EXPECT_EQ(engine_partition(ctx, SignPolicy::global), oracle) << a.to_string(db);
    EXPECT_EQ(oracle.size(), 1u);
  }
}

TEST(Oracle, Op2K4CongruenceSystem) {
  const Database& db = shipped_db();
  const CaseDecl& c = case_of(Plane::O, 4);
  for (const auto& a : case_assignments(c, db)) {
    Int xi = scalar(a, "xi");
    CaseContext ctx(db, c, a);
    for (SignPolicy pol : {SignPolicy::global, SignPolicy::per_prime}) {
      auto oracle =
          partition_of(box({8, 3}), [&](const Coords& t, const Coords& u) { return op2_k4_related(t, u, xi, pol); });
      EXPECT_EQ(engine_partition(ctx, pol), oracle) << a.to_string(db) << " " << to_string(pol);
    }
  }
}

TEST(Oracle, Op2K4XiThreeClassesByA1) {
  const Database& db = shipped_db();
  const CaseDecl& c = case_of(Plane::O, 4);
  auto a = case_assignments(c, db, {{"xi", "3"}}).front();
  CaseContext ctx(db, c, a);
  CoordPartition want;
  for (std::vector<Int> cls : std::vector<std::vector<Int>>{{0}, {1, 7}, {2, 6}, {3, 5}, {4}}) {
    std::set<Coords> members;
    for (Int a1 : cls)
      for (Int a2 = 0; a2 < 3; ++a2) members.insert({a1, a2});
    want.insert(members);
  }
  EXPECT_EQ(engine_partition(ctx, SignPolicy::global), want);
}

TEST(Oracle, Op2K12CongruenceSystem) {
  const Database& db = shipped_db();
  const CaseDecl& c = case_of(Plane::O, 12);
  std::map<Int, std::pair<std::size_t, std::size_t>> counts;
  for (const auto& a : case_assignments(c, db)) {
    Int theta = scalar(a, "theta");
    CaseContext ctx(db, c, a);
    for (SignPolicy pol : {SignPolicy::global, SignPolicy::per_prime}) {
      auto oracle = partition_of(box({8, 9, 7}),
                                 [&](const Coords& t, const Coords& u) { return op2_k12_related(t, u, theta, pol); });
      auto engine = engine_partition(ctx, pol);
      EXPECT_EQ(engine, oracle) << a.to_string(db) << " " << to_string(pol);
      (pol == SignPolicy::global ? counts[theta].first : counts[theta].second) = engine.size();
    }
  }
  // Per-prime signs give 4/6/10; one global sign separates more classes.
  EXPECT_EQ(counts[1], (std::pair<std::size_t, std::size_t>{4, 4}));
  EXPECT_EQ(counts[5], (std::pair<std::size_t, std::size_t>{7, 6}));
  EXPECT_EQ(counts[3], (std::pair<std::size_t, std::size_t>{13, 10}));
  EXPECT_EQ(counts[7], (std::pair<std::size_t, std::size_t>{13, 10}));
}

TEST(Oracle, Op2K12ClassShapesThetaOne) {
  const Database& db = shipped_db();
  const CaseDecl& c = case_of(Plane::O, 12);
  auto a = case_assignments(c, db, {{"theta", "1"}}).front();
  CaseContext ctx(db, c, a);
  // theta = 1: parity of t1 times {t2 = 0 mod 3} or not; the 7-part is free.
  EXPECT_EQ(sizes(engine_partition(ctx, SignPolicy::global)), (std::vector<std::size_t>{84, 84, 168, 168}));
}
