#include "gyrstab/normalize.hpp"
#include "gyrstab/reldb.hpp"

namespace gyrstab {

namespace {

std::string where(const SourcePos& p) { return p.file + ":" + std::to_string(p.line); }

class Validator {
 public:
  explicit Validator(const Database& db) : db_(db), asg_(default_assignment(db)) {}

  std::vector<ValidationFailure> run() {
    check_params_declared();
    check_citations();
    for (std::size_t r = 0; r < db_.relations.size(); ++r) check_relation(r);
    for (const auto& g : db_.groups) {
      check_orders(g);
      check_subgroup(g);
    }
    for (const auto& c : db_.cases) check_case(c);
    return std::move(out_);
  }

 private:
  void fail(std::string kind, const SourcePos& at, std::string detail) {
    out_.push_back(ValidationFailure{std::move(kind), where(at), std::move(detail)});
  }

  std::optional<GroupElement> try_normalize(const Expr& e, std::optional<Dims> d, const SourcePos& at,
                                            const std::string& what, const NormalizeOptions& opts = {}) {
    try {
      return normalize(e, db_, asg_, opts, nullptr, d);
    } catch (const ExprError& x) {
      fail("normalization", at, what + ": " + x.what());
      return std::nullopt;
    }
  }

  void check_params_declared() {
    for (const auto& r : db_.relations)
      for (const auto& p : r.parameters)
        if (!db_.parameter(p)) fail("undeclared-parameter", r.pos, p);
  }

  void check_citations() {
    for (const auto& r : db_.relations)
      if (r.citation.empty()) fail("missing-citation", r.pos, "rel " + to_string(r.lhs));
  }

  void check_relation(std::size_t r) {
    const RelationDecl& rel = db_.relations[r];
    auto d = expr_dims(rel.lhs, db_.types);
    const GroupDecl* g = d ? db_.group(*d) : nullptr;
    if (g && rel.lhs.is_simple()) {
      std::string key = to_string(rel.lhs);
      for (const auto& b : g->basis)
        if (b && to_string(*b) == key) fail("relation-lhs-is-basis", rel.pos, key + " is a declared basis composite");
    }
    if (!g || !rel.parameters.empty()) return;
    // Re-derive the lhs without this relation; when that succeeds both sides must agree.
    NormalizeOptions opts;
    opts.excluded_relations.insert(r);
    GroupElement lhs;
    try {
      lhs = normalize(rel.lhs, db_, asg_, opts);
    } catch (const ExprError&) {
      return;
    }
    auto rhs = try_normalize(rel.rhs, d, rel.pos, "relation rhs");
    if (rhs && !(lhs == *rhs))
      fail("relation-inconsistent", rel.pos,
           to_string(rel.lhs) + " re-derives to " + db_.element_string(*g, lhs) + " but is declared as " +
               db_.element_string(*g, *rhs));
  }

  void check_orders(const GroupDecl& g) {
    for (std::size_t i = 0; i < g.basis.size(); ++i) {
      if (!g.named(i)) continue;
      const Expr& b = *g.basis[i];
      Int o = g.presentation->order(i);
      auto self = try_normalize(b, g.dims, g.pos, "basis " + to_string(b));
      if (self) {
        Coords unit(g.presentation->rank(), 0);
        unit[i] = 1;
        if (self->coords() != normalize(GroupElement(g.presentation, unit)).coords())
          fail("basis-not-canonical", g.pos, to_string(b) + " normalizes to " + self->to_string());
      }
      if (!b.is_simple()) continue;
      const Chain& c = b.terms[0].chain;
      if (c.size() == 1 && c[0].is_atom()) {
        Int fo = atom_order(c[0], db_.types);
        if (fo != o)
          fail("family-order", g.pos,
               to_string(b) + " has family order " + std::to_string(fo) + " but summand order " + std::to_string(o));
      }
      if (o > 0) {
        auto z = try_normalize(Expr::of_chain(c, o), g.dims, g.pos, "order check");
        if (z && !z->is_zero()) fail("order-annihilation", g.pos, std::to_string(o) + "*" + to_string(b) + " != 0");
      }
      // A composite is killed by the order of its last atom, and by the order of its first atom over suspensions.
      if (c.size() > 1 && c.back().is_atom()) {
        Int last = atom_order(c.back(), db_.types);
        if (last > 0) {
          auto z = try_normalize(Expr::of_chain(c, last), g.dims, g.pos, "order check");
          if (z && !z->is_zero())
            fail("order-annihilation", g.pos,
                 std::to_string(last) + "*" + to_string(b) + " != 0, but " + to_string(c.back()) + " has order " +
                     std::to_string(last));
        }
      }
    }
  }

  void check_subgroup(const GroupDecl& g) {
    if (!g.suspension_subgroup) return;
    for (const auto& e : *g.suspension_subgroup) try_normalize(e, g.dims, g.subgroup_pos, "subgroup generator");
  }

  void check_case(const CaseDecl& c) {
    Int bott = bott_order(c.k);
    const auto& tg = *c.twist_group;
    bool match = bott == 1 ? tg.rank() == 0 : tg.rank() == 1 && tg.order(0) == bott;
    if (!match) {
      std::string want = bott == 1 ? "0" : bott == 0 ? "Z" : "Z/2";
      fail("bott-table", c.pos, c.id() + ": twist group " + tg.to_string() + ", expected " + want);
    }
    const GroupDecl* twist = db_.group(c.twist_dims());
    const GroupDecl* attach = db_.group(c.attach_dims());
    const GroupDecl* lambda = db_.group(c.lambda_dims());
    if (!twist) fail("undeclared-group", c.pos, c.id() + ": pi" + c.twist_dims().to_string());
    if (!attach) fail("undeclared-group", c.pos, c.id() + ": pi" + c.attach_dims().to_string());
    if (!lambda) fail("undeclared-group", c.pos, c.id() + ": pi" + c.lambda_dims().to_string());
    if (!twist || !attach || !lambda) return;

    std::vector<Expr> taus = c.image;
    if (c.image_full)
      for (const auto& b : twist->basis)
        if (b) taus.push_back(*b);
    for (const auto& t : taus)
      try_normalize(compose(c.f, t, db_.types), c.attach_dims(), c.pos, c.id() + " twist " + to_string(t));

    Expr sf = suspend(c.f, c.k - 1, db_.types);
    Expr iota = Expr::of(Node::atom("iota", c.m));
    for (const auto& b : lambda->basis) {
      if (!b) continue;
      try_normalize(compose(*b, sf, db_.types), c.attach_dims(), c.pos, c.id() + " lambda " + to_string(*b));
      try_normalize(whitehead(iota, *b, db_.types), c.attach_dims(), c.pos,
                    c.id() + " [iota, " + to_string(*b) + "]");
    }
  }

  const Database& db_;
  ParameterAssignment asg_;
  std::vector<ValidationFailure> out_;
};

}  // namespace

std::vector<ValidationFailure> validate(const Database& db) { return Validator(db).run(); }

}  // namespace gyrstab
