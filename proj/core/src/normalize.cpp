#include "gyrstab/normalize.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <random>

namespace gyrstab {

namespace {

struct WTerm {
  Int coef;
  Chain chain;
};

using Rewrite = std::vector<WTerm>;

bool is_identity(const Node& n, const TypeTable& types) {
  if (!n.is_atom()) return false;
  const Family* f = types.family(n.name);
  return f && f->shift == 0;
}

bool all_atoms(const Chain& c) {
  return std::all_of(c.begin(), c.end(), [](const Node& n) { return n.is_atom(); });
}

bool all_suspensions(const Chain& c, std::size_t from, std::size_t to, const TypeTable& types) {
  for (std::size_t i = from; i < to; ++i)
    if (!atom_is_suspension(c[i], types)) return false;
  return true;
}

Chain strip_identities(Chain c, const TypeTable& types) {
  if (c.size() <= 1) return c;
  Chain out;
  for (auto& n : c)
    if (!is_identity(n, types)) out.push_back(std::move(n));
  if (out.empty()) out.push_back(c.front());
  return out;
}

// Sigma^k of a chain, node by node; nullopt when it contains a Whitehead product (suspends to 0).
std::optional<Chain> suspend_nodes(const Chain& c, int k, const TypeTable& types) {
  Chain out;
  for (const auto& n : c) {
    switch (n.kind) {
      case Node::Kind::Atom:
        if (auto s = suspend_atom(n, k, types))
          out.push_back(*s);
        else
          out.push_back(Node::susp(k, Expr::of(n)));
        break;
      case Node::Kind::Whitehead:
        return std::nullopt;
      case Node::Kind::Susp:
        out.push_back(Node::susp(n.index + k, *n.left));
        break;
      default:
        out.push_back(Node::susp(k, Expr::of(n)));
        break;
    }
  }
  return out;
}

class Normalizer {
 public:
  Normalizer(const Database& db, const ParameterAssignment& asg, const NormalizeOptions& opts, NormalizeTrace* trace)
      : db_(db), types_(db.types), asg_(asg), opts_(opts), trace_(trace), rng_(opts.shuffle_seed.value_or(0)) {}

  GroupElement run(const Expr& input, Dims target) {
    const GroupDecl* g = db_.group(target);
    if (!g) throw UndeclaredGroupError(target);
    std::map<std::string, std::size_t> basis;
    for (std::size_t i = 0; i < g->basis.size(); ++i)
      if (g->basis[i] && g->basis[i]->is_simple()) basis[to_string(g->basis[i]->terms[0].chain)] = i;

    Coords acc(g->presentation->rank(), 0);
    std::deque<WTerm> work;
    for (auto& t : eval_scalars(input).terms) work.push_back(WTerm{t.coef, std::move(t.chain)});

    while (!work.empty()) {
      std::size_t pick = 0;
      if (shuffled()) pick = std::uniform_int_distribution<std::size_t>(0, work.size() - 1)(rng_);
      WTerm t = std::move(work[pick]);
      work.erase(work.begin() + static_cast<std::ptrdiff_t>(pick));

      if (++steps_ > opts_.step_budget) throw StuckError(to_string(t.chain), "step budget exhausted");
      if (t.coef == 0) continue;
      t.chain = strip_identities(std::move(t.chain), types_);

      if (all_atoms(t.chain)) {
        auto it = basis.find(to_string(t.chain));
        if (it != basis.end()) {
          Int o = g->presentation->order(it->second);
          acc[it->second] = o > 0 ? mod_floor(acc[it->second] + mod_floor(t.coef, o), o) : acc[it->second] + t.coef;
          continue;
        }
      }

      std::vector<Rewrite> cands = candidates(t);
      if (cands.empty()) throw StuckError(to_string(t.chain), "no rule applies and it is not a basis composite");
      std::size_t choice = 0;
      if (shuffled()) choice = std::uniform_int_distribution<std::size_t>(0, cands.size() - 1)(rng_);
      for (auto& r : cands[choice]) work.push_back(std::move(r));
    }
    if (trace_) trace_->steps += steps_;
    steps_ = 0;
    return normalize(GroupElement(g->presentation, std::move(acc)));
  }

  Expr eval_scalars(const Expr& e) {
    Expr out;
    for (const auto& t : e.terms) {
      Term u;
      u.coef = t.coef;
      for (const auto& s : t.scalars) u.coef *= scalar_value(s);
      for (const auto& n : t.chain) u.chain.push_back(eval_scalars(n));
      if (u.coef != 0) out.terms.push_back(std::move(u));
    }
    return out;
  }

 private:
  bool shuffled() const { return opts_.shuffle_seed.has_value(); }

  const ParameterDecl& param_decl(const std::string& name) {
    const ParameterDecl* p = db_.parameter(name);
    if (!p) throw ExprError("unknown parameter '" + name + "'");
    return *p;
  }

  std::size_t param_choice(const std::string& name) {
    auto it = asg_.choice.find(name);
    if (it == asg_.choice.end()) throw UnassignedParameterError(name);
    if (trace_) trace_->params_used.insert(name);
    return it->second;
  }

  Int scalar_value(const std::string& name) {
    const ParameterDecl& p = param_decl(name);
    if (!p.is_scalar()) throw ExprError("parameter '" + name + "' is a class, not a scalar");
    return p.scalar_values.at(param_choice(name));
  }

  Node eval_scalars(const Node& n) {
    if (!n.left && !n.right) return n;
    Node out = n;
    if (n.left) out.left = std::make_shared<const Expr>(eval_scalars(*n.left));
    if (n.right) out.right = std::make_shared<const Expr>(eval_scalars(*n.right));
    return out;
  }

  Expr relation_rhs(std::size_t r) {
    if (trace_) trace_->relations_used.insert(r);
    return eval_scalars(db_.relations[r].rhs);
  }

  bool relation_enabled(std::size_t r) const { return !opts_.excluded_relations.count(r); }

  static Rewrite replace_node(const WTerm& t, std::size_t i, const Chain& with) {
    Chain c(t.chain.begin(), t.chain.begin() + static_cast<std::ptrdiff_t>(i));
    c.insert(c.end(), with.begin(), with.end());
    c.insert(c.end(), t.chain.begin() + static_cast<std::ptrdiff_t>(i) + 1, t.chain.end());
    return Rewrite{WTerm{t.coef, std::move(c)}};
  }

  static Rewrite replace_range(const WTerm& t, std::size_t a, std::size_t b, const Node& with) {
    Chain c(t.chain.begin(), t.chain.begin() + static_cast<std::ptrdiff_t>(a));
    c.push_back(with);
    c.insert(c.end(), t.chain.begin() + static_cast<std::ptrdiff_t>(b), t.chain.end());
    return Rewrite{WTerm{t.coef, std::move(c)}};
  }

  // Structural rewrites of the node at position i (parameters, suspensions, Whitehead products,
  // trivial groups). Distribution of a proper sum is handled separately.
  std::optional<Rewrite> inner_rewrite(const WTerm& t, std::size_t i) {
    const Node& n = t.chain[i];
    switch (n.kind) {
      case Node::Kind::Atom:
        return std::nullopt;
      case Node::Kind::Param: {
        const ParameterDecl& p = param_decl(n.name);
        if (p.is_scalar()) throw ExprError("scalar parameter '" + n.name + "' used as a class");
        Expr v = eval_scalars(p.element_values.at(param_choice(n.name)));
        return replace_node(t, i, Chain{Node::group(std::move(v))});
      }
      case Node::Kind::Susp: {
        const Expr& e = *n.left;
        if (e.is_zero()) return Rewrite{};
        if (e.is_simple()) {
          const Chain& inner = e.terms[0].chain;
          if (inner.size() == 1 && inner[0].is_atom() && !suspend_atom(inner[0], n.index, types_)) return std::nullopt;
          auto s = suspend_nodes(inner, n.index, types_);
          if (!s) return Rewrite{};
          return replace_node(t, i, *s);
        }
        Expr sum;
        for (const auto& u : e.terms) {
          auto s = suspend_nodes(u.chain, n.index, types_);
          if (s) sum.terms.push_back(Term{u.coef, {}, std::move(*s)});
        }
        return replace_node(t, i, Chain{Node::group(std::move(sum))});
      }
      case Node::Kind::Group: {
        const Expr& e = *n.left;
        if (e.is_zero()) return Rewrite{};
        if (e.is_simple()) return replace_node(t, i, e.terms[0].chain);
        return std::nullopt;
      }
      case Node::Kind::Whitehead:
        return whitehead_rewrite(t, i);
    }
    return std::nullopt;
  }

  // Reduce a Whitehead argument to a single coefficient-one chain of atoms when possible.
  std::optional<Expr> flatten_arg(const Expr& e) {
    if (e.is_zero()) return e;
    if (e.is_simple() && all_atoms(e.terms[0].chain))
      return Expr::of_chain(strip_identities(e.terms[0].chain, types_));
    if (e.terms.size() > 1 || e.terms[0].coef != 1) return e;
    auto d = expr_dims(e, types_);
    const GroupDecl* g = d ? db_.group(*d) : nullptr;
    if (!g) return std::nullopt;
    GroupElement v = run(e, *d);
    for (std::size_t j = 0; j < v.coords().size(); ++j)
      if (v[j] != 0 && !g->named(j)) return std::nullopt;
    return db_.element_expr(*g, v);
  }

  std::optional<Rewrite> whitehead_rewrite(const WTerm& t, std::size_t i) {
    const Node& n = t.chain[i];
    auto a = flatten_arg(*n.left);
    auto b = flatten_arg(*n.right);
    if (!a || !b) return std::nullopt;
    if (a->is_zero() || b->is_zero()) return Rewrite{};
    if (!a->is_simple() || !b->is_simple()) {
      Expr sum;
      for (const auto& x : a->terms)
        for (const auto& y : b->terms)
          sum.terms.push_back(Term{x.coef * y.coef, {}, Chain{Node::whitehead(Expr::of_chain(x.chain), Expr::of_chain(y.chain))}});
      return replace_node(t, i, Chain{Node::group(collect(sum))});
    }
    if (!(*a == *n.left) || !(*b == *n.right))
      return replace_node(t, i, Chain{Node::whitehead(*a, *b)});

    const Chain& A = a->terms[0].chain;
    const Chain& B = b->terms[0].chain;
    bool a_iota = A.size() == 1 && is_identity(A[0], types_);
    bool b_iota = B.size() == 1 && is_identity(B[0], types_);

    for (std::size_t r = 0; r < db_.relations.size(); ++r) {
      if (!relation_enabled(r)) continue;
      const Expr& lhs = db_.relations[r].lhs;
      if (!lhs.is_simple() || lhs.terms[0].chain.size() != 1) continue;
      const Node& w = lhs.terms[0].chain[0];
      if (w.kind == Node::Kind::Whitehead && *w.left == *a && *w.right == *b)
        return replace_node(t, i, Chain{Node::group(relation_rhs(r))});
    }

    if (!a_iota && b_iota) {
      // [alpha, beta] = (-1)^{pq} [beta, alpha]
      int p = chain_dims(A, types_).dom;
      int q = chain_dims(B, types_).dom;
      Int sign = (static_cast<Int>(p) * q) % 2 == 0 ? 1 : -1;
      return replace_node(t, i, Chain{Node::group(Expr::of(Node::whitehead(*b, *a), sign))});
    }
    if (!a_iota || b_iota) return std::nullopt;

    // [iota_n, beta o Sigma gamma] = [iota_n, beta] o Sigma^n gamma
    int nn = A[0].index;
    std::size_t s = B.size();
    while (s > 0 && atom_is_suspension(B[s - 1], types_)) --s;
    if (s == B.size()) return std::nullopt;
    Chain tail(B.begin() + static_cast<std::ptrdiff_t>(s), B.end());
    auto shifted = suspend_nodes(tail, nn - 1, types_);
    if (!shifted) return std::nullopt;
    Chain head = s == 0 ? Chain{A[0]} : Chain(B.begin(), B.begin() + static_cast<std::ptrdiff_t>(s));
    Chain out{Node::whitehead(*a, Expr::of_chain(std::move(head)))};
    out.insert(out.end(), shifted->begin(), shifted->end());
    return replace_node(t, i, out);
  }

  std::optional<Int> subchain_order(const Chain& c, std::size_t from, std::size_t to) {
    if (to - from == 1) {
      Int o = atom_order(c[from], types_);
      return o > 0 ? std::optional<Int>(o) : std::nullopt;
    }
    Chain sub(c.begin() + static_cast<std::ptrdiff_t>(from), c.begin() + static_cast<std::ptrdiff_t>(to));
    const GroupDecl* g = db_.group(chain_dims(sub, types_));
    if (!g) return std::nullopt;
    std::string key = to_string(sub);
    for (std::size_t j = 0; j < g->basis.size(); ++j)
      if (g->basis[j] && g->basis[j]->is_simple() && to_string(g->basis[j]->terms[0].chain) == key &&
          g->presentation->order(j) > 0)
        return g->presentation->order(j);
    return std::nullopt;
  }

  std::vector<Rewrite> candidates(const WTerm& t) {
    std::vector<Rewrite> out;
    const bool all = shuffled();
    const Chain& c = t.chain;

    for (std::size_t i = 0; i < c.size(); ++i) {
      if (auto r = inner_rewrite(t, i)) {
        out.push_back(std::move(*r));
        if (!all) return out;
      }
    }

    // Database composition relations on contiguous runs of atoms.
    for (std::size_t r = 0; r < db_.relations.size(); ++r) {
      if (!relation_enabled(r)) continue;
      const Expr& lhs = db_.relations[r].lhs;
      if (!lhs.is_simple() || !all_atoms(lhs.terms[0].chain)) continue;
      const Chain& pat = lhs.terms[0].chain;
      if (pat.size() > c.size()) continue;
      for (std::size_t i = 0; i + pat.size() <= c.size(); ++i) {
        if (!std::equal(pat.begin(), pat.end(), c.begin() + static_cast<std::ptrdiff_t>(i))) continue;
        out.push_back(replace_range(t, i, i + pat.size(), Node::group(relation_rhs(r))));
        if (!all) return out;
      }
    }

    // Distribution of a sum: always on the left, on the right only over suspensions.
    for (std::size_t i = 0; i < c.size(); ++i) {
      if (c[i].kind != Node::Kind::Group) continue;
      if (!all_suspensions(c, i + 1, c.size(), types_)) continue;
      Rewrite r;
      for (const auto& u : c[i].left->terms) {
        Chain nc(c.begin(), c.begin() + static_cast<std::ptrdiff_t>(i));
        nc.insert(nc.end(), u.chain.begin(), u.chain.end());
        nc.insert(nc.end(), c.begin() + static_cast<std::ptrdiff_t>(i) + 1, c.end());
        r.push_back(WTerm{t.coef * u.coef, std::move(nc)});
      }
      out.push_back(std::move(r));
      if (!all) return out;
    }

    // Composites of suspensions with coprime finite orders vanish.
    if (all_atoms(c)) {
      bool found = false;
      for (std::size_t a = 0; a < c.size() && !found; ++a) {
        for (std::size_t b = a + 1; b < c.size() && !found; ++b) {
          if (!all_suspensions(c, a, b, types_)) break;
          auto op = subchain_order(c, a, b);
          if (!op) continue;
          for (std::size_t e = b + 1; e <= c.size() && !found; ++e) {
            if (!atom_is_suspension(c[e - 1], types_)) break;
            auto os = subchain_order(c, b, e);
            if (os && gcd(*op, *os) == 1) found = true;
          }
        }
      }
      if (found) {
        out.push_back(Rewrite{});
        if (!all) return out;
      }
    }

    // Coefficient reduction by the order of the last atom, or of the first when the tail is a suspension.
    if (!c.empty()) {
      Int o = atom_order(c.back(), types_);
      if (o > 0 && (t.coef < 0 || t.coef >= o)) {
        out.push_back(Rewrite{WTerm{mod_floor(t.coef, o), c}});
        if (!all) return out;
      }
      Int f = atom_order(c.front(), types_);
      if (f > 0 && all_suspensions(c, 1, c.size(), types_) && (t.coef < 0 || t.coef >= f)) {
        out.push_back(Rewrite{WTerm{mod_floor(t.coef, f), c}});
        if (!all) return out;
      }
    }
    return out;
  }

  const Database& db_;
  const TypeTable& types_;
  const ParameterAssignment& asg_;
  const NormalizeOptions& opts_;
  NormalizeTrace* trace_;
  std::mt19937_64 rng_;
  std::uint64_t steps_ = 0;
};

}  // namespace

GroupElement normalize(const Expr& e, const Database& db, const ParameterAssignment& asg, const NormalizeOptions& opts,
                       NormalizeTrace* trace, std::optional<Dims> dims) {
  auto d = expr_dims(e, db.types);
  if (d && dims && !(*d == *dims))
    throw DimensionError("expression has shape " + d->to_string() + ", expected " + dims->to_string());
  if (!d) d = dims;
  if (!d) throw ExprError("cannot determine the hom-group of the zero expression");
  Normalizer n(db, asg, opts, trace);
  return n.run(e, *d);
}

bool is_suspension_expr(const Expr& e, const Database& db, const ParameterAssignment& asg) {
  bool syntactic = true;
  for (const auto& t : e.terms)
    for (const auto& n : t.chain)
      if (!atom_is_suspension(n, db.types)) syntactic = false;
  if (syntactic) return true;
  auto d = expr_dims(e, db.types);
  if (!d) return true;
  const GroupDecl* g = db.group(*d);
  if (!g || !g->suspension_subgroup) return false;
  GroupElement v = normalize(e, db, asg);
  Subgroup s{g->presentation, {}};
  for (const auto& gen : *g->suspension_subgroup) s.generators.push_back(normalize(gen, db, asg));
  return subgroup_contains(s, v);
}

}  // namespace gyrstab
