#include <gtest/gtest.h>

#include "support.hpp"

using namespace gyrstab;
using namespace gyrstab::testing;

TEST(Properties, CorpusCoversTheDataset) {
  auto corpus = expression_corpus(shipped_db());
  EXPECT_GT(corpus.size(), 100u);
}

TEST(Properties, NormalizeIsIdempotent) {
  auto fails = idempotence_failures(shipped_db());
  EXPECT_TRUE(fails.empty()) << join(fails);
}

TEST(Properties, NormalizeIsConfluentUnderShuffledRuleOrders) {
  auto fails = confluence_failures(shipped_db(), 100);
  EXPECT_TRUE(fails.empty()) << join(fails);
}

TEST(Properties, NormalizeIsLinear) {
  auto fails = linearity_failures(shipped_db());
  EXPECT_TRUE(fails.empty()) << join(fails);
}

TEST(Properties, DeclaredOrdersAnnihilateBasisElements) {
  auto fails = order_annihilation_failures(shipped_db());
  EXPECT_TRUE(fails.empty()) << join(fails);
}

TEST(Properties, DimensionsArePreservedByComposition) {
  const Database& db = shipped_db();
  for (const auto& it : expression_corpus(db)) {
    if (it.expr.is_zero()) continue;
    EXPECT_EQ(*expr_dims(it.expr, db.types), it.dims) << it.label;
    Expr s = suspend(it.expr, 1, db.types);
    if (s.is_zero()) continue;  // suspended Whitehead products
    EXPECT_EQ(*expr_dims(s, db.types), (Dims{it.dims.dom + 1, it.dims.cod + 1})) << it.label;
  }
}

TEST(Properties, EquivalenceLawsOnEveryCase) {
  auto fails = equivalence_law_failures(shipped_db());
  EXPECT_TRUE(fails.empty()) << join(fails);
}

TEST(Properties, WitnessesReplay) {
  auto fails = witness_replay_failures(shipped_db());
  EXPECT_TRUE(fails.empty()) << join(fails);
}

TEST(Properties, ReachableWitnessesReconstructOnEveryCase) {
  const Database& db = shipped_db();
  for (const auto& c : db.cases)
    for (const auto& a : case_assignments(c, db)) {
      CaseContext ctx(db, c, a);
      const auto& imgs = ctx.delta_images();
      for (const auto& [coords, w] : ctx.reachable().table()) {
        GroupElement sum = GroupElement::zero(ctx.attach_group().presentation);
        for (std::size_t i = 0; i < w.size(); ++i) sum = add(sum, scale(w[i], imgs[i]));
        ASSERT_EQ(sum.coords(), coords) << c.id();
      }
    }
}

TEST(Properties, SubgroupMembershipMatchesSpanOracle) {
  const Database& db = shipped_db();
  for (const auto& g : db.groups) {
    if (!g.suspension_subgroup) continue;
    for (const auto& a : assignments(db, std::vector<std::string>{})) {
      Subgroup s{g.presentation, {}};
      for (const auto& e : *g.suspension_subgroup) s.generators.push_back(normalize(e, db, a, {}, nullptr, g.dims));
      std::set<Coords> span{GroupElement::zero(g.presentation).coords()};
      for (bool grew = true; grew;) {
        grew = false;
        std::set<Coords> next = span;
        for (const auto& c : span)
          for (const auto& gen : s.generators)
            next.insert(add(GroupElement(g.presentation, c), gen).coords());
        if (next.size() != span.size()) {
          grew = true;
          span = std::move(next);
        }
      }
      for (const auto& e : enumerate(g.presentation))
        EXPECT_EQ(subgroup_contains(s, e), span.count(e.coords()) > 0) << g.dims.to_string() << e.to_string();
    }
  }
}

TEST(Properties, ValidatorRejectsEverySeededMutation) {
  EXPECT_TRUE(validate(shipped_db()).empty());
  for (const auto& m : run_mutations()) EXPECT_TRUE(m.applied && m.detected) << m.name << ": " << m.detail;
}

TEST(Properties, SerializeParseRoundTrip) {
  const Database& db = shipped_db();
  for (const auto& src : shipped_sources()) EXPECT_EQ(serialize(db, src.name), src.text) << src.name;
}
