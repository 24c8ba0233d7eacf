#include "gyrstab/expr.hpp"

#include <algorithm>
#include <set>

namespace gyrstab {

std::string SourcePos::to_string() const {
  std::string out = file.empty() ? "<input>" : file;
  return out + ":" + std::to_string(line) + ":" + std::to_string(column);
}

std::string Dims::to_string() const { return "S^" + std::to_string(dom) + " -> S^" + std::to_string(cod); }

void TypeTable::add_family(Family f) { families_.push_back(std::move(f)); }

const Family* TypeTable::family(std::string_view name) const {
  for (const auto& f : families_)
    if (f.name == name) return &f;
  return nullptr;
}

const Family* TypeTable::alias_of(std::string_view base) const {
  for (const auto& f : families_)
    if (f.desusp == base) return &f;
  return nullptr;
}

std::optional<Dims> TypeTable::param_dims(std::string_view name) const {
  auto it = params_.find(name);
  if (it == params_.end()) return std::nullopt;
  return it->second;
}

Node Node::atom(std::string family, int n) {
  Node x;
  x.kind = Kind::Atom;
  x.name = std::move(family);
  x.index = n;
  return x;
}

Node Node::whitehead(Expr a, Expr b) {
  Node x;
  x.kind = Kind::Whitehead;
  x.left = std::make_shared<const Expr>(std::move(a));
  x.right = std::make_shared<const Expr>(std::move(b));
  return x;
}

Node Node::susp(int k, Expr inner) {
  Node x;
  x.kind = Kind::Susp;
  x.index = k;
  x.left = std::make_shared<const Expr>(std::move(inner));
  return x;
}

Node Node::group(Expr inner) {
  Node x;
  x.kind = Kind::Group;
  x.left = std::make_shared<const Expr>(std::move(inner));
  return x;
}

Node Node::param(std::string name) {
  Node x;
  x.kind = Kind::Param;
  x.name = std::move(name);
  return x;
}

static bool ptr_eq(const std::shared_ptr<const Expr>& a, const std::shared_ptr<const Expr>& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  return *a == *b;
}

bool Node::operator==(const Node& o) const {
  return kind == o.kind && name == o.name && index == o.index && ptr_eq(left, o.left) && ptr_eq(right, o.right);
}

Expr Expr::of(Node n, Int coef) { return of_chain(Chain{std::move(n)}, coef); }

Expr Expr::of_chain(Chain c, Int coef) {
  Expr e;
  if (coef != 0) e.terms.push_back(Term{coef, {}, std::move(c)});
  return e;
}

bool Expr::is_simple() const {
  return terms.size() == 1 && terms[0].coef == 1 && terms[0].scalars.empty();
}

std::string to_string(const Node& n) {
  switch (n.kind) {
    case Node::Kind::Atom:
      return n.name + "(" + std::to_string(n.index) + ")";
    case Node::Kind::Whitehead:
      return "wh(" + to_string(*n.left) + ", " + to_string(*n.right) + ")";
    case Node::Kind::Susp:
      return "S^" + std::to_string(n.index) + "(" + to_string(*n.left) + ")";
    case Node::Kind::Group:
      return "(" + to_string(*n.left) + ")";
    case Node::Kind::Param:
      return n.name;
  }
  return "?";
}

std::string to_string(const Chain& c) {
  std::string out;
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (i) out += ".";
    out += to_string(c[i]);
  }
  return out;
}

std::string to_string(const Expr& e) {
  if (e.terms.empty()) return "0";
  std::string out;
  for (std::size_t i = 0; i < e.terms.size(); ++i) {
    const Term& t = e.terms[i];
    Int mag = t.coef < 0 ? -t.coef : t.coef;
    if (i == 0)
      out += t.coef < 0 ? "-" : "";
    else
      out += t.coef < 0 ? " - " : " + ";
    for (const auto& s : t.scalars) out += s + "*";
    if (mag != 1) out += std::to_string(mag) + "*";
    out += to_string(t.chain);
  }
  return out;
}

std::optional<Dims> node_dims(const Node& n, const TypeTable& types) {
  switch (n.kind) {
    case Node::Kind::Atom: {
      const Family* f = types.family(n.name);
      if (!f) throw ExprError("unknown family '" + n.name + "'");
      if (!f->in_range(n.index))
        throw DimensionError("index " + std::to_string(n.index) + " outside the range of family '" + n.name + "'");
      return Dims{n.index + f->shift, n.index};
    }
    case Node::Kind::Whitehead: {
      auto a = expr_dims(*n.left, types);
      auto b = expr_dims(*n.right, types);
      if (!a || !b) return std::nullopt;
      if (a->cod != b->cod)
        throw DimensionError("Whitehead product of classes with codomains S^" + std::to_string(a->cod) + " and S^" +
                             std::to_string(b->cod));
      return Dims{a->dom + b->dom - 1, a->cod};
    }
    case Node::Kind::Susp: {
      auto a = expr_dims(*n.left, types);
      if (!a) return std::nullopt;
      return Dims{a->dom + n.index, a->cod + n.index};
    }
    case Node::Kind::Group:
      return expr_dims(*n.left, types);
    case Node::Kind::Param: {
      if (!types.has_param(n.name)) throw ExprError("unknown parameter '" + n.name + "'");
      auto d = types.param_dims(n.name);
      if (!d) throw ExprError("parameter '" + n.name + "' is scalar but used as a class");
      return d;
    }
  }
  return std::nullopt;
}

Dims chain_dims(const Chain& c, const TypeTable& types) {
  std::optional<Dims> acc;
  for (std::size_t i = 0; i < c.size(); ++i) {
    auto d = node_dims(c[i], types);
    if (!d) throw DimensionError("zero class inside composite " + to_string(c));
    if (acc && acc->dom != d->cod)
      throw DimensionError("cannot compose " + to_string(Chain(c.begin(), c.begin() + i)) + " (" + acc->to_string() +
                           ") with " + to_string(c[i]) + " (" + d->to_string() + ")");
    acc = acc ? Dims{d->dom, acc->cod} : *d;
  }
  if (!acc) throw DimensionError("empty composite");
  return *acc;
}

std::optional<Dims> expr_dims(const Expr& e, const TypeTable& types) {
  std::optional<Dims> out;
  for (const auto& t : e.terms) {
    Dims d = chain_dims(t.chain, types);
    if (out && !(*out == d))
      throw DimensionError("summands of different shapes: " + out->to_string() + " vs " + d.to_string() + " in " +
                           to_string(e));
    out = d;
  }
  return out;
}

bool atom_is_suspension(const Node& n, const TypeTable& types) {
  if (!n.is_atom()) return false;
  const Family* f = types.family(n.name);
  return f && f->suspension_at(n.index);
}

Int atom_order(const Node& n, const TypeTable& types) {
  if (!n.is_atom()) return 0;
  const Family* f = types.family(n.name);
  return f ? f->order_at(n.index) : 0;
}

std::optional<Node> suspend_atom(const Node& n, int k, const TypeTable& types) {
  const Family* f = types.family(n.name);
  if (!f) return std::nullopt;
  if (f->in_range(n.index + k)) return Node::atom(n.name, n.index + k);
  if (const Family* a = types.alias_of(n.name); a && a->in_range(n.index + k)) return Node::atom(a->name, n.index + k);
  return std::nullopt;
}

Expr add(const Expr& a, const Expr& b) {
  Expr out = a;
  out.terms.insert(out.terms.end(), b.terms.begin(), b.terms.end());
  return out;
}

Expr scale(Int n, const Expr& e) {
  Expr out;
  if (n == 0) return out;
  for (auto t : e.terms) {
    t.coef *= n;
    out.terms.push_back(std::move(t));
  }
  return out;
}

Expr collect(const Expr& e) {
  Expr out;
  for (const auto& t : e.terms) {
    auto it = std::find_if(out.terms.begin(), out.terms.end(),
                           [&](const Term& u) { return u.scalars == t.scalars && u.chain == t.chain; });
    if (it == out.terms.end())
      out.terms.push_back(t);
    else
      it->coef += t.coef;
  }
  std::erase_if(out.terms, [](const Term& t) { return t.coef == 0; });
  return out;
}

static Chain as_chain(const Expr& e) {
  if (e.is_simple()) return e.terms[0].chain;
  return Chain{Node::group(e)};
}

Expr compose(const Expr& e1, const Expr& e2, const TypeTable& types) {
  auto d1 = expr_dims(e1, types);
  auto d2 = expr_dims(e2, types);
  if (!d1 || !d2) return Expr::zero();
  if (d1->dom != d2->cod)
    throw DimensionError("cannot compose " + to_string(e1) + " (" + d1->to_string() + ") with " + to_string(e2) + " (" +
                         d2->to_string() + "): codomain S^" + std::to_string(d2->cod) + " differs from domain S^" +
                         std::to_string(d1->dom));
  Chain c = as_chain(e1);
  Chain c2 = as_chain(e2);
  c.insert(c.end(), c2.begin(), c2.end());
  return Expr::of_chain(std::move(c));
}

static std::optional<Chain> suspend_chain(const Chain& c, int k, const TypeTable& types) {
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

Expr suspend(const Expr& e, int k, const TypeTable& types) {
  if (k <= 0) throw ExprError("suspension degree must be positive");
  Expr out;
  for (const auto& t : e.terms) {
    auto c = suspend_chain(t.chain, k, types);
    if (!c) continue;  // suspended Whitehead products vanish
    out.terms.push_back(Term{t.coef, t.scalars, std::move(*c)});
  }
  return out;
}

Expr whitehead(const Expr& e1, const Expr& e2, const TypeTable& types) {
  auto d1 = expr_dims(e1, types);
  auto d2 = expr_dims(e2, types);
  if (!d1 || !d2) return Expr::zero();
  if (d1->cod != d2->cod)
    throw DimensionError("Whitehead product needs a common codomain: S^" + std::to_string(d1->cod) + " vs S^" +
                         std::to_string(d2->cod));
  Expr out;
  for (const auto& a : e1.terms) {
    for (const auto& b : e2.terms) {
      Term t;
      t.coef = a.coef * b.coef;
      t.scalars = a.scalars;
      t.scalars.insert(t.scalars.end(), b.scalars.begin(), b.scalars.end());
      t.chain = Chain{Node::whitehead(Expr::of_chain(a.chain), Expr::of_chain(b.chain))};
      out.terms.push_back(std::move(t));
    }
  }
  return collect(out);
}

static void collect_params(const Expr& e, std::set<std::string>& out);

static void collect_params(const Node& n, std::set<std::string>& out) {
  if (n.kind == Node::Kind::Param) out.insert(n.name);
  if (n.left) collect_params(*n.left, out);
  if (n.right) collect_params(*n.right, out);
}

static void collect_params(const Expr& e, std::set<std::string>& out) {
  for (const auto& t : e.terms) {
    out.insert(t.scalars.begin(), t.scalars.end());
    for (const auto& n : t.chain) collect_params(n, out);
  }
}

std::vector<std::string> referenced_params(const Expr& e) {
  std::set<std::string> s;
  collect_params(e, s);
  return {s.begin(), s.end()};
}

}  // namespace gyrstab
