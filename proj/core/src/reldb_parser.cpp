#include <algorithm>
#include <set>
#include <sstream>

#include "expr_parser.hpp"
#include "gyrstab/reldb.hpp"

namespace gyrstab {

namespace {

using detail::Cursor;

struct LocatedExpr {
  Expr expr;
  int column = 1;
};

struct RawFactor {
  Int order = 0;
  std::optional<LocatedExpr> basis;
};

struct RawFamily {
  Family fam;
};

struct RawGroup {
  Dims dims;
  std::vector<RawFactor> factors;
};

struct RawSubgroup {
  Dims dims;
  std::vector<LocatedExpr> gens;
};

struct RawRel {
  LocatedExpr lhs, rhs;
};

struct RawParam {
  std::string name;
  std::optional<Dims> dims;
  std::vector<Int> scalars;
  std::vector<LocatedExpr> elements;
};

struct RawCase {
  Plane plane = Plane::C;
  int k = 0;
  std::optional<Int> twist_order;  // nullopt: trivial group
  std::string twist_name;
  bool full = false;
  std::vector<LocatedExpr> image;
  LocatedExpr f;
};

using RawDecl = std::variant<Trivia, RawFamily, RawGroup, RawSubgroup, RawRel, RawParam, RawCase>;

struct RawLine {
  RawDecl decl;
  std::string citation;
  SourcePos pos;
};

std::string trim(std::string_view s) {
  std::size_t a = 0, b = s.size();
  while (a < b && (s[a] == ' ' || s[a] == '\t' || s[a] == '\r')) ++a;
  while (b > a && (s[b - 1] == ' ' || s[b - 1] == '\t' || s[b - 1] == '\r')) --b;
  return std::string(s.substr(a, b - a));
}

void expect_word(Cursor& c, const char* w) {
  std::size_t save = c.pos;
  if (!detail::is_ident_start(c.peek()) || c.ident() != w) {
    c.pos = save;
    c.fail(std::string("expected '") + w + "'");
  }
}

bool eat_word(Cursor& c, const char* w) {
  std::size_t save = c.pos;
  if (!detail::is_ident_start(c.peek())) return false;
  if (c.ident() == w) return true;
  c.pos = save;
  return false;
}

int small_int(Cursor& c) {
  std::size_t save = c.pos;
  Int v = c.integer();
  if (v < -100000 || v > 100000) {
    c.pos = save;
    c.fail("integer out of range");
  }
  return static_cast<int>(v);
}

LocatedExpr located(Cursor& c) {
  c.skip_ws();
  int col = static_cast<int>(c.base_column + c.pos);
  return {detail::parse_expr_at(c), col};
}

Dims parse_pi(Cursor& c) {
  expect_word(c, "pi");
  c.expect('(');
  int dom = small_int(c);
  c.expect('-');
  c.expect('>');
  int cod = small_int(c);
  c.expect(')');
  return Dims{dom, cod};
}

// Z<basis> | Z/n<basis>; basis "_" is an unnamed summand.
RawFactor parse_factor(Cursor& c) {
  RawFactor f;
  expect_word(c, "Z");
  if (c.eat('/')) {
    std::size_t save = c.pos;
    f.order = c.integer();
    if (f.order < 2) {
      c.pos = save;
      c.fail("finite order must be at least 2");
    }
  }
  c.expect('<');
  if (c.peek() == '_' && c.peek_at(1) == '>') {
    c.eat('_');
  } else {
    f.basis = located(c);
  }
  c.expect('>', "to close basis");
  return f;
}

std::vector<LocatedExpr> expr_list(Cursor& c, char close) {
  std::vector<LocatedExpr> out;
  if (c.eat(close)) return out;
  do {
    out.push_back(located(c));
  } while (c.eat(','));
  if (close) c.expect(close);
  return out;
}

RawDecl parse_family(Cursor& c) {
  RawFamily r;
  Family& f = r.fam;
  f.name = c.ident();
  expect_word(c, "shift");
  f.shift = small_int(c);
  expect_word(c, "from");
  f.min_index = small_int(c);
  if (eat_word(c, "to")) f.max_index = small_int(c);
  if (eat_word(c, "susp")) f.susp_from = small_int(c);
  if (eat_word(c, "order")) {
    std::size_t save = c.pos;
    f.order = c.integer();
    if (f.order < 2) {
      c.pos = save;
      c.fail("family order must be at least 2");
    }
    if (eat_word(c, "from")) f.order_from = small_int(c);
  }
  if (eat_word(c, "desusp")) f.desusp = c.ident();
  if (f.shift < 0) c.fail("negative stem");
  return r;
}

RawDecl parse_group(Cursor& c) {
  RawGroup g;
  g.dims = parse_pi(c);
  c.expect('=');
  do {
    g.factors.push_back(parse_factor(c));
  } while (c.eat('+'));
  return g;
}

RawDecl parse_subgroup(Cursor& c) {
  RawSubgroup s;
  s.dims = parse_pi(c);
  expect_word(c, "suspension");
  c.expect('=');
  s.gens = expr_list(c, '\0');
  return s;
}

RawDecl parse_rel(Cursor& c) {
  RawRel r;
  r.lhs = located(c);
  c.expect('=');
  r.rhs = located(c);
  return r;
}

RawDecl parse_param(Cursor& c) {
  RawParam p;
  p.name = c.ident();
  if (eat_word(c, "in")) p.dims = parse_pi(c);
  c.expect('=');
  c.expect('{');
  if (p.dims) {
    p.elements = expr_list(c, '}');
    if (p.elements.empty()) c.fail("empty parameter domain");
  } else {
    if (c.eat('}')) c.fail("empty parameter domain");
    do {
      p.scalars.push_back(c.integer());
    } while (c.eat(','));
    c.expect('}');
  }
  return p;
}

RawDecl parse_case(Cursor& c) {
  RawCase r;
  std::size_t save = c.pos;
  std::string plane = c.ident();
  auto p = parse_plane(plane);
  if (!p) {
    c.pos = save;
    c.fail("unknown plane '" + plane + "' (expected C, H or O)");
  }
  r.plane = *p;
  expect_word(c, "k");
  c.expect('=');
  r.k = small_int(c);
  expect_word(c, "twist");
  if (std::isdigit(static_cast<unsigned char>(c.peek()))) {
    save = c.pos;
    if (c.integer() != 0) {
      c.pos = save;
      c.fail("expected 0, Z<name> or Z/n<name>");
    }
  } else {
    expect_word(c, "Z");
    Int order = 0;
    if (c.eat('/')) {
      save = c.pos;
      order = c.integer();
      if (order < 2) {
        c.pos = save;
        c.fail("finite order must be at least 2");
      }
    }
    r.twist_order = order;
    c.expect('<');
    r.twist_name = c.ident();
    c.expect('>');
  }
  expect_word(c, "image");
  if (eat_word(c, "full")) {
    r.full = true;
  } else {
    c.expect('{');
    r.image = expr_list(c, '}');
  }
  expect_word(c, "f");
  r.f = located(c);
  return r;
}

// Syntax stage for one line. Returns nullopt and records an error on failure.
std::optional<RawLine> parse_line(const std::string& line, const SourcePos& pos, std::vector<DbError>& errors) {
  std::string t = trim(line);
  if (t.empty() || t[0] == '#') return RawLine{Trivia{line}, "", pos};

  std::string body = line;
  std::string citation;
  // The citation is the quoted string after the first '@'; expressions never contain '@'.
  if (auto at = line.find('@'); at != std::string::npos) {
    std::string rest = trim(std::string_view(line).substr(at + 1));
    if (rest.size() < 2 || rest.front() != '"' || rest.back() != '"' ||
        rest.find('"', 1) != rest.size() - 1) {
      errors.push_back({SourcePos{pos.file, pos.line, static_cast<int>(at) + 1}, "malformed citation, expected @ \"...\""});
      return std::nullopt;
    }
    citation = rest.substr(1, rest.size() - 2);
    body = line.substr(0, at);
  }

  Cursor c{body, 0, 1};
  try {
    std::string kw = c.ident();
    RawDecl d;
    if (kw == "family")
      d = parse_family(c);
    else if (kw == "group")
      d = parse_group(c);
    else if (kw == "subgroup")
      d = parse_subgroup(c);
    else if (kw == "rel")
      d = parse_rel(c);
    else if (kw == "param")
      d = parse_param(c);
    else if (kw == "case")
      d = parse_case(c);
    else {
      c.pos = 0;
      c.fail("unknown declaration keyword '" + kw + "'");
    }
    if (!c.at_end()) c.fail("unexpected trailing input");
    return RawLine{std::move(d), citation, pos};
  } catch (const ExprParseError& e) {
    errors.push_back({SourcePos{pos.file, pos.line, e.column()}, e.message()});
    return std::nullopt;
  }
}

class Builder {
 public:
  explicit Builder(std::vector<DbError>& errors) : errors_(errors) {}

  Database db;

  void error(const SourcePos& at, int column, const std::string& msg) {
    errors_.push_back({SourcePos{at.file, at.line, column}, msg});
  }

  // Dims of e, checked against `want` when given. Reports and returns false on failure.
  bool check_expr(const LocatedExpr& e, std::optional<Dims> want, const SourcePos& pos, const char* what,
                  bool allow_zero = true) {
    try {
      for (const auto& name : referenced_params(e.expr))
        if (!db.types.has_param(name)) {
          error(pos, e.column, std::string("unknown parameter '") + name + "' in " + what);
          return false;
        }
      for (const auto& t : e.expr.terms)
        for (const auto& s : t.scalars)
          if (db.types.param_dims(s)) {
            error(pos, e.column, "parameter '" + s + "' is a class, used as a scalar in " + std::string(what));
            return false;
          }
      auto d = expr_dims(e.expr, db.types);
      if (!d) {
        if (!allow_zero) {
          error(pos, e.column, std::string(what) + " must be nonzero");
          return false;
        }
        return true;
      }
      if (want && !(*d == *want)) {
        error(pos, e.column,
              std::string("dimension mismatch in ") + what + ": " + d->to_string() + " vs " + want->to_string());
        return false;
      }
      return true;
    } catch (const ExprError& x) {
      error(pos, e.column, std::string(x.what()) + " in " + what);
      return false;
    }
  }

  void build(const std::vector<std::pair<std::string, std::vector<RawLine>>>& files) {
    // Families and parameter names first: later declarations may refer to anything declared in any file.
    std::set<std::string> fam_names;
    for (const auto& [file, lines] : files)
      for (const auto& l : lines)
        if (auto* f = std::get_if<RawFamily>(&l.decl)) {
          if (!fam_names.insert(f->fam.name).second) {
            error(l.pos, 1, "duplicate family '" + f->fam.name + "'");
            continue;
          }
          Family fam = f->fam;
          fam.citation = l.citation;
          fam.pos = l.pos;
          family_index_[&l] = db.types.families().size();
          db.types.add_family(std::move(fam));
        }
    for (const auto& [file, lines] : files)
      for (const auto& l : lines)
        if (auto* f = std::get_if<RawFamily>(&l.decl); f && !f->fam.desusp.empty() && !db.types.family(f->fam.desusp))
          error(l.pos, 1, "unknown family '" + f->fam.desusp + "' in desusp");
    for (const auto& [file, lines] : files)
      for (const auto& l : lines)
        if (auto* p = std::get_if<RawParam>(&l.decl)) {
          if (db.types.has_param(p->name) || db.types.family(p->name)) {
            error(l.pos, 1, "duplicate declaration of '" + p->name + "'");
            continue;
          }
          db.types.set_param(p->name, p->dims);
          param_ok_.insert(&l);
        }

    for (const auto& [file, lines] : files) {
      std::vector<DeclRef> layout;
      for (const auto& l : lines) {
        if (auto r = add(l)) layout.push_back(*r);
      }
      db.layout.emplace_back(file, std::move(layout));
    }
  }

 private:
  std::optional<DeclRef> add(const RawLine& l) {
    return std::visit([&](const auto& d) { return add(d, l); }, l.decl);
  }

  std::optional<DeclRef> add(const Trivia& t, const RawLine&) { return t; }

  std::optional<DeclRef> add(const RawFamily&, const RawLine& l) {
    auto it = family_index_.find(&l);
    if (it == family_index_.end()) return std::nullopt;
    return FamilyRef{it->second};
  }

  std::optional<DeclRef> add(const RawGroup& g, const RawLine& l) {
    if (db.group(g.dims)) {
      error(l.pos, 1, "duplicate declaration of pi(" + std::to_string(g.dims.dom) + " -> " +
                          std::to_string(g.dims.cod) + ")");
      return std::nullopt;
    }
    GroupDecl decl;
    decl.dims = g.dims;
    decl.citation = l.citation;
    decl.pos = l.pos;
    std::vector<Factor> factors;
    bool ok = true;
    for (std::size_t i = 0; i < g.factors.size(); ++i) {
      const RawFactor& f = g.factors[i];
      if (f.basis) {
        ok = check_expr(*f.basis, g.dims, l.pos, "basis composite", false) && ok;
        factors.push_back(Factor{to_string(f.basis->expr), f.order});
        decl.basis.push_back(f.basis->expr);
      } else {
        factors.push_back(Factor{"_" + std::to_string(i), f.order});
        decl.basis.push_back(std::nullopt);
      }
    }
    if (!ok) return std::nullopt;
    try {
      decl.presentation = make_group(std::move(factors));
    } catch (const AbelianError& e) {
      error(l.pos, 1, e.what());
      return std::nullopt;
    }
    db.groups.push_back(std::move(decl));
    return GroupRefDecl{db.groups.size() - 1};
  }

  std::optional<DeclRef> add(const RawSubgroup& s, const RawLine& l) {
    auto it = std::find_if(db.groups.begin(), db.groups.end(), [&](const GroupDecl& g) { return g.dims == s.dims; });
    if (it == db.groups.end()) {
      error(l.pos, 1, "subgroup of an undeclared group");
      return std::nullopt;
    }
    if (it->suspension_subgroup) {
      error(l.pos, 1, "duplicate suspension subgroup");
      return std::nullopt;
    }
    std::vector<Expr> gens;
    bool ok = true;
    for (const auto& e : s.gens) {
      ok = check_expr(e, s.dims, l.pos, "subgroup generator") && ok;
      gens.push_back(e.expr);
    }
    if (!ok) return std::nullopt;
    it->suspension_subgroup = std::move(gens);
    it->subgroup_citation = l.citation;
    it->subgroup_pos = l.pos;
    return SubgroupRefDecl{static_cast<std::size_t>(it - db.groups.begin())};
  }

  std::optional<DeclRef> add(const RawRel& r, const RawLine& l) {
    if (!check_expr(r.lhs, std::nullopt, l.pos, "relation lhs", false)) return std::nullopt;
    auto d = expr_dims(r.lhs.expr, db.types);
    if (!check_expr(r.rhs, d, l.pos, "relation")) return std::nullopt;
    RelationDecl rel;
    rel.lhs = r.lhs.expr;
    rel.rhs = r.rhs.expr;
    rel.citation = l.citation;
    rel.pos = l.pos;
    std::set<std::string> ps;
    for (const auto& p : referenced_params(rel.lhs)) ps.insert(p);
    for (const auto& p : referenced_params(rel.rhs)) ps.insert(p);
    rel.parameters.assign(ps.begin(), ps.end());
    db.relations.push_back(std::move(rel));
    return RelationRef{db.relations.size() - 1};
  }

  std::optional<DeclRef> add(const RawParam& p, const RawLine& l) {
    if (!param_ok_.count(&l)) return std::nullopt;
    ParameterDecl decl;
    decl.name = p.name;
    decl.dims = p.dims;
    decl.scalar_values = p.scalars;
    decl.citation = l.citation;
    decl.pos = l.pos;
    bool ok = true;
    for (const auto& e : p.elements) {
      if (!referenced_params(e.expr).empty()) {
        error(l.pos, e.column, "parameter values may not refer to parameters");
        ok = false;
        continue;
      }
      ok = check_expr(e, p.dims, l.pos, "parameter value") && ok;
      decl.element_values.push_back(e.expr);
    }
    if (!ok) return std::nullopt;
    db.parameters.push_back(std::move(decl));
    return ParamRef{db.parameters.size() - 1};
  }

  std::optional<DeclRef> add(const RawCase& r, const RawLine& l) {
    CaseDecl c;
    c.plane = r.plane;
    c.m = plane_m(r.plane);
    c.k = r.k;
    c.citation = l.citation;
    c.pos = l.pos;
    if (c.k < 2 || c.k > 2 * c.m - 2) {
      error(l.pos, 1, "k=" + std::to_string(c.k) + " outside [2, " + std::to_string(2 * c.m - 2) + "]");
      return std::nullopt;
    }
    if (db.find_case(c.plane, c.k)) {
      error(l.pos, 1, "duplicate case " + c.id());
      return std::nullopt;
    }
    c.twist_group = r.twist_order ? make_group({Factor{r.twist_name, *r.twist_order}}) : make_group({});
    c.image_full = r.full;
    bool ok = check_expr(r.f, Dims{2 * c.m - 1, c.m}, l.pos, "attaching class f", false);
    for (const auto& e : r.image) {
      ok = check_expr(e, c.twist_dims(), l.pos, "twist image") && ok;
      c.image.push_back(e.expr);
    }
    if (!ok) return std::nullopt;
    c.f = r.f.expr;
    db.cases.push_back(std::move(c));
    return CaseRef{db.cases.size() - 1};
  }

  std::vector<DbError>& errors_;
  std::map<const RawLine*, std::size_t> family_index_;
  std::set<const RawLine*> param_ok_;
};

std::string quote(const std::string& citation) { return citation.empty() ? "" : " @ \"" + citation + "\""; }

std::string pi_string(Dims d) { return "pi(" + std::to_string(d.dom) + " -> " + std::to_string(d.cod) + ")"; }

std::string join_exprs(const std::vector<Expr>& es) {
  std::string out;
  for (std::size_t i = 0; i < es.size(); ++i) out += (i ? ", " : "") + to_string(es[i]);
  return out;
}

std::string family_line(const Family& f) {
  std::string out = "family " + f.name + " shift " + std::to_string(f.shift) + " from " + std::to_string(f.min_index);
  if (f.max_index) out += " to " + std::to_string(*f.max_index);
  if (f.susp_from) out += " susp " + std::to_string(*f.susp_from);
  if (f.order) {
    out += " order " + std::to_string(f.order);
    if (f.order_from) out += " from " + std::to_string(f.order_from);
  }
  if (!f.desusp.empty()) out += " desusp " + f.desusp;
  return out + quote(f.citation);
}

std::string group_line(const GroupDecl& g) {
  std::string out = "group " + pi_string(g.dims) + " =";
  for (std::size_t i = 0; i < g.basis.size(); ++i) {
    Int o = g.presentation->order(i);
    out += (i ? " + " : " ") + std::string(o ? "Z/" + std::to_string(o) : "Z");
    out += "<" + (g.basis[i] ? to_string(*g.basis[i]) : std::string("_")) + ">";
  }
  return out + quote(g.citation);
}

std::string subgroup_line(const GroupDecl& g) {
  return "subgroup " + pi_string(g.dims) + " suspension = " + join_exprs(*g.suspension_subgroup) +
         quote(g.subgroup_citation);
}

std::string param_line(const ParameterDecl& p) {
  std::string out = "param " + p.name;
  if (p.dims) out += " in " + pi_string(*p.dims);
  out += " = {";
  for (std::size_t i = 0; i < p.domain_size(); ++i) out += (i ? ", " : "") + p.value_string(i);
  return out + "}" + quote(p.citation);
}

std::string case_line(const CaseDecl& c) {
  std::string out = std::string("case ") + plane_letter(c.plane) + " k=" + std::to_string(c.k) + " twist ";
  if (c.twist_group->rank() == 0) {
    out += "0";
  } else {
    const Factor& f = c.twist_group->factors()[0];
    out += (f.order ? "Z/" + std::to_string(f.order) : std::string("Z")) + "<" + f.name + ">";
  }
  out += " image " + (c.image_full ? std::string("full") : "{" + join_exprs(c.image) + "}");
  out += " f " + to_string(c.f);
  return out + quote(c.citation);
}

}  // namespace

ParseResult parse_database(const std::vector<SourceText>& sources) {
  ParseResult out;
  std::vector<std::pair<std::string, std::vector<RawLine>>> files;
  for (const auto& src : sources) {
    std::vector<RawLine> lines;
    std::istringstream in(src.text);
    std::string line;
    int n = 0;
    while (std::getline(in, line)) {
      ++n;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (auto r = parse_line(line, SourcePos{src.name, n, 1}, out.errors)) lines.push_back(std::move(*r));
    }
    files.emplace_back(src.name, std::move(lines));
  }
  Builder b(out.errors);
  b.build(files);
  out.db = std::move(b.db);
  std::stable_sort(out.errors.begin(), out.errors.end(), [](const DbError& x, const DbError& y) {
    return std::tie(x.pos.file, x.pos.line, x.pos.column) < std::tie(y.pos.file, y.pos.line, y.pos.column);
  });
  return out;
}

ParseResult parse_database(const std::string& text, const std::string& name) {
  return parse_database(std::vector<SourceText>{SourceText{name, text}});
}

std::string serialize(const Database& db, const std::string& file) {
  std::string out;
  for (const auto& [name, decls] : db.layout) {
    if (name != file) continue;
    for (const auto& d : decls) {
      std::visit(
          [&](const auto& r) {
            using T = std::decay_t<decltype(r)>;
            if constexpr (std::is_same_v<T, Trivia>)
              out += r.text;
            else if constexpr (std::is_same_v<T, FamilyRef>)
              out += family_line(db.types.families()[r.index]);
            else if constexpr (std::is_same_v<T, GroupRefDecl>)
              out += group_line(db.groups[r.index]);
            else if constexpr (std::is_same_v<T, SubgroupRefDecl>)
              out += subgroup_line(db.groups[r.index]);
            else if constexpr (std::is_same_v<T, RelationRef>)
              out += "rel " + to_string(db.relations[r.index].lhs) + " = " + to_string(db.relations[r.index].rhs) +
                     quote(db.relations[r.index].citation);
            else if constexpr (std::is_same_v<T, ParamRef>)
              out += param_line(db.parameters[r.index]);
            else
              out += case_line(db.cases[r.index]);
          },
          d);
      out += "\n";
    }
  }
  return out;
}

std::string serialize(const Database& db) {
  std::string out;
  for (const auto& [name, decls] : db.layout) out += serialize(db, name);
  return out;
}

}  // namespace gyrstab
