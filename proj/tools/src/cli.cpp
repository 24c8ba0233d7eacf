#include "gyrstab_cli/cli.hpp"

#include <algorithm>
#include <ostream>

#include "CLI11.hpp"
#include "gyrstab/gyration.hpp"
#include "gyrstab/normalize.hpp"
#include "gyrstab/reldb.hpp"
#include "gyrstab/report.hpp"
#include "json.hpp"

namespace gyrstab::cli {

namespace {

using nlohmann::json;

struct Options {
  std::string db_path;
  bool as_json = false;
  std::string plane;
  int k = 0;
  std::string tau;
  std::string omega;
  std::vector<std::string> params;
  std::string sign_policy = "global";
  std::string expr;
};

class DomainError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

Database load(const Options& o) {
  ParseResult r = load_database(o.db_path);
  if (!r.ok()) {
    std::string msg;
    for (const auto& e : r.errors) msg += e.to_string() + "\n";
    if (!msg.empty()) msg.pop_back();
    throw DomainError(msg);
  }
  return std::move(r.db);
}

std::map<std::string, std::string> pins(const Options& o) {
  std::map<std::string, std::string> out;
  for (const auto& p : o.params) {
    auto eq = p.find('=');
    if (eq == std::string::npos || eq == 0) throw UsageError("--param expects name=value, got '" + p + "'");
    out[p.substr(0, eq)] = p.substr(eq + 1);
  }
  return out;
}

Plane plane_of(const Options& o) {
  auto p = parse_plane(o.plane);
  if (!p) throw UsageError("--plane must be CP2, HP2 or OP2");
  return *p;
}

SignPolicy policy_of(const Options& o) {
  if (o.sign_policy == "global") return SignPolicy::global;
  if (o.sign_policy == "per-prime") return SignPolicy::per_prime;
  throw UsageError("--sign-policy must be global or per-prime");
}

const CaseDecl& case_of(const Database& db, const Options& o) {
  Plane p = plane_of(o);
  int m = plane_m(p);
  if (o.k < 2 || o.k > 2 * m - 2)
    throw DomainError("k=" + std::to_string(o.k) + " is outside [2, " + std::to_string(2 * m - 2) + "] for " +
                      plane_name(p));
  const CaseDecl* c = db.find_case(p, o.k);
  if (!c) {
    if (bott_order(o.k) == 1) throw DomainError(plane_name(p) + " k=" + std::to_string(o.k) + ": trivial twist group");
    throw DomainError("no case declared for " + plane_name(p) + " k=" + std::to_string(o.k));
  }
  return *c;
}

// "1,0", "(1,0)" or an expression in the twist group.
GroupElement parse_point(const std::string& text, const CaseDecl& c, const Database& db,
                         const ParameterAssignment& asg) {
  const GroupDecl* g = db.group(c.twist_dims());
  if (!g) throw DomainError("twist group of " + c.id() + " is not declared");
  std::string s;
  for (char ch : text)
    if (ch != ' ' && ch != '(' && ch != ')') s += ch;
  bool numeric = !s.empty() && std::all_of(s.begin(), s.end(), [](char ch) {
    return std::isdigit(static_cast<unsigned char>(ch)) || ch == ',' || ch == '-';
  });
  if (numeric && !(s == "0" && g->presentation->rank() != 1)) {
    Coords coords;
    std::size_t start = 0;
    while (start <= s.size()) {
      auto comma = s.find(',', start);
      std::string part = s.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
      try {
        coords.push_back(std::stoll(part));
      } catch (const std::exception&) {
        throw UsageError("bad coordinate '" + part + "' in '" + text + "'");
      }
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (coords.size() != g->presentation->rank())
      throw UsageError("'" + text + "' has " + std::to_string(coords.size()) + " coordinates, the twist group " +
                       g->presentation->to_string() + " has " + std::to_string(g->presentation->rank()));
    return normalize(GroupElement(g->presentation, coords));
  }
  if (s == "0") return GroupElement::zero(g->presentation);
  Expr e;
  try {
    e = parse_expr(text);
  } catch (const ExprParseError& x) {
    throw UsageError("cannot parse '" + text + "': " + x.what());
  }
  return normalize(e, db, asg, {}, nullptr, c.twist_dims());
}

std::string group_context(const GroupDecl& g) {
  std::string out = "pi_" + std::to_string(g.dims.dom) + "(S^" + std::to_string(g.dims.cod) + ") = ";
  if (g.basis.empty()) return out + "0";
  for (std::size_t i = 0; i < g.basis.size(); ++i) {
    Int o = g.presentation->order(i);
    out += (i ? " + " : "") + (o ? "Z/" + std::to_string(o) : std::string("Z"));
    out += "<" + (g.basis[i] ? to_string(*g.basis[i]) : std::string("_")) + ">";
  }
  return out;
}

std::string lambda_string(const CaseDecl& c, const Database& db, const GroupElement& l) {
  const GroupDecl* g = db.group(c.lambda_dims());
  return g ? db.element_string(*g, l) : l.to_string();
}

std::string search_space(const CaseContext& ctx, const Database& db) {
  const auto& factors = ctx.lambda_factors();
  const auto& bounds = ctx.lambda_bounds();
  Int total = 1;
  for (Int b : bounds) total *= b;
  std::string out;
  if (total <= 16) {
    out = "{";
    Coords c(factors.size(), 0);
    for (Int n = 0; n < total; ++n) {
      Int r = n;
      for (std::size_t i = factors.size(); i-- > 0;) {
        c[i] = r % bounds[i];
        r /= bounds[i];
      }
      out += (n ? ", " : "") + lambda_string(ctx.decl(), db, ctx.lambda_element(c));
    }
    out += "}";
  } else {
    out = std::to_string(total) + " lambda values (";
    for (std::size_t i = 0; i < factors.size(); ++i)
      out += (i ? ", " : "") + to_string(*ctx.lambda_group().basis[factors[i]]) + " mod " + std::to_string(bounds[i]);
    out += ")";
  }
  return out + " x {+1, -1}";
}

int cmd_classify(const Options& o, std::ostream& out) {
  Plane p = plane_of(o);
  Database db = load(o);
  StabilityReport r = classify(p, o.k, db, policy_of(o), pins(o));
  out << (o.as_json ? report_json(r, db) : report_text(r, db));
  return 0;
}

int cmd_table(const Options& o, std::ostream& out) {
  Database db = load(o);
  auto rows = table(db, policy_of(o));
  out << (o.as_json ? table_json(rows, db) : table_text(rows));
  return 0;
}

int cmd_solve(const Options& o, std::ostream& out) {
  Database db = load(o);
  const CaseDecl& c = case_of(db, o);
  json arr = json::array();
  std::string text;
  for (const auto& asg : case_assignments(c, db, pins(o))) {
    GroupElement t = parse_point(o.tau, c, db, asg);
    GroupElement w = parse_point(o.omega, c, db, asg);
    auto wit = equivalent(c, t, w, db, asg);
    std::string label = "[" + asg.to_string(db) + "] ";
    if (wit) {
      text += label + "equivalent: lambda = " + lambda_string(c, db, wit->lambda) + ", sign " +
              (wit->sign > 0 ? "+1" : "-1") + "\n";
      arr.push_back(json{{"assignment", asg.to_string(db)},
                         {"equivalent", true},
                         {"lambda", wit->lambda.coords()},
                         {"lambda_expr", lambda_string(c, db, wit->lambda)},
                         {"sign", wit->sign}});
    } else {
      text += label + "not equivalent\n";
      arr.push_back(json{{"assignment", asg.to_string(db)}, {"equivalent", false}});
    }
  }
  out << (o.as_json ? arr.dump(2) + "\n" : text);
  return 0;
}

int cmd_explain(const Options& o, std::ostream& out) {
  Database db = load(o);
  const CaseDecl& c = case_of(db, o);
  const GroupDecl& ag = *db.group(c.attach_dims());
  json arr = json::array();
  std::string text;
  for (const auto& asg : case_assignments(c, db, pins(o))) {
    CaseContext ctx(db, c, asg);
    GroupElement t = parse_point(o.tau, c, db, asg);
    GroupElement w = parse_point(o.omega, c, db, asg);
    const GroupDecl& tg = ctx.twist_group();
    text += c.id() + " [" + asg.to_string(db) + "]\n";
    text += "  tau-bar = " + db.element_string(tg, t) + ", omega-bar = " + db.element_string(tg, w) + "\n";
    json rec{{"assignment", asg.to_string(db)}, {"tau", t.coords()}, {"omega", w.coords()}};
    auto wit = equivalent(c, t, w, db, asg);
    if (!wit) {
      std::string space = search_space(ctx, db);
      text += "  no witness; search space " + space + " exhausted\n";
      rec["witness"] = nullptr;
      rec["search_space"] = space;
      arr.push_back(rec);
      continue;
    }
    if (t == w && wit->lambda.is_zero() && wit->sign == 1)
      text += "  identity witness lambda = 0\n";
    else
      text += "  witness: lambda = " + lambda_string(c, db, wit->lambda) + " " + wit->lambda.to_string() + ", sign " +
              (wit->sign > 0 ? "+1" : "-1") + "\n";
    CriterionTerms ct = criterion_terms(c, t, w, wit->lambda, db, asg);
    GroupElement lhs = add(add(ct.f_tau, ct.lambda_f), ct.whitehead);
    GroupElement rhs = scale(wit->sign, ct.f_omega);
    auto line = [&](const std::string& name, const GroupElement& e) {
      std::string n = "  " + name;
      if (n.size() < 26) n.append(26 - n.size(), ' ');
      text += n + "= " + db.element_string(ag, e) + "  " + e.to_string() + "\n";
    };
    std::string m = std::to_string(c.m);
    line("f.tau-bar", ct.f_tau);
    line("lambda.S^" + std::to_string(c.k - 1) + "f", ct.lambda_f);
    line("[iota_" + m + ", lambda]", ct.whitehead);
    line("sum", lhs);
    line(std::string(wit->sign > 0 ? "+" : "-") + "f.omega-bar", rhs);
    text += "  in " + group_context(ag) + "\n";
    json trail = json::array();
    if (!ct.trace.relations_used.empty()) text += "  relations used:\n";
    for (std::size_t r : ct.trace.relations_used) {
      const RelationDecl& rel = db.relations[r];
      std::string s = rel.pos.file + ":" + std::to_string(rel.pos.line) + "  " + to_string(rel.lhs) + " = " +
                      to_string(rel.rhs) + (rel.citation.empty() ? "" : "  [" + rel.citation + "]");
      text += "    " + s + "\n";
      trail.push_back(s);
    }
    rec["witness"] = json{{"lambda", wit->lambda.coords()},
                          {"lambda_expr", lambda_string(c, db, wit->lambda)},
                          {"sign", wit->sign}};
    rec["terms"] = json{{"f_tau", ct.f_tau.coords()},
                        {"lambda_f", ct.lambda_f.coords()},
                        {"whitehead", ct.whitehead.coords()},
                        {"f_omega", ct.f_omega.coords()}};
    rec["citations"] = trail;
    arr.push_back(rec);
  }
  out << (o.as_json ? arr.dump(2) + "\n" : text);
  return 0;
}

int cmd_normalize(const Options& o, std::ostream& out) {
  Database db = load(o);
  Expr e;
  try {
    e = parse_expr(o.expr);
  } catch (const ExprParseError& x) {
    throw UsageError("cannot parse expression: " + std::string(x.what()));
  }
  auto d = expr_dims(e, db.types);
  if (!d) throw UsageError("the zero expression has no hom-group");
  const GroupDecl* g = db.group(*d);
  if (!g) throw DomainError("undeclared hom-group pi_" + std::to_string(d->dom) + "(S^" + std::to_string(d->cod) + ")");

  auto pinned = pins(o);
  ParameterAssignment base = default_assignment(db);
  for (const auto& [name, value] : pinned) {
    const ParameterDecl* p = db.parameter(name);
    if (!p) throw UsageError("unknown parameter '" + name + "'");
    bool found = false;
    for (std::size_t i = 0; i < p->domain_size(); ++i)
      if (p->value_string(i) == value) {
        base.choice[name] = i;
        found = true;
      }
    if (!found) throw UsageError("value '" + value + "' is not in the domain of '" + name + "'");
  }
  NormalizeTrace probe;
  normalize(e, db, base, {}, &probe);
  std::vector<std::string> free;
  for (const auto& p : probe.params_used)
    if (!pinned.count(p)) free.push_back(p);

  json arr = json::array();
  std::string text;
  for (const auto& a : assignments(db, free)) {
    ParameterAssignment asg = base;
    for (const auto& [k, v] : a.choice) asg.choice[k] = v;
    GroupElement v = normalize(e, db, asg);
    std::string prefix = free.empty() ? "" : "[" + a.to_string(db) + "] ";
    text += prefix + db.element_string(*g, v) + "\n";
    arr.push_back(json{{"assignment", a.to_string(db)},
                       {"expr", db.element_string(*g, v)},
                       {"coords", v.coords()},
                       {"group", group_context(*g)}});
  }
  text += "  in " + group_context(*g) + "\n";
  out << (o.as_json ? arr.dump(2) + "\n" : text);
  return 0;
}

int cmd_verify(const Options& o, std::ostream& out, std::ostream& err) {
  ParseResult r = load_database(o.db_path);
  if (!r.ok()) {
    if (o.as_json) {
      json arr = json::array();
      for (const auto& e : r.errors)
        arr.push_back(json{{"kind", "parse"}, {"location", e.pos.to_string()}, {"detail", e.message}});
      out << arr.dump(2) << "\n";
    } else {
      for (const auto& e : r.errors) err << e.to_string() << "\n";
    }
    return 1;
  }
  auto failures = validate(r.db);
  out << (o.as_json ? validation_json(failures) : validation_text(failures));
  return failures.empty() ? 0 : 1;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Gyration stability for CP2, HP2 and OP2", "gyrstab"};
  app.require_subcommand(1, 1);
  app.add_option("--db", o.db_path, "dataset directory or file (default: $GYRSTAB_DB, then the installed data)");
  app.add_flag("--json", o.as_json, "machine-readable output");

  auto case_opts = [&](CLI::App* s, bool need_case) {
    auto* p = s->add_option("--plane", o.plane, "CP2 | HP2 | OP2");
    auto* k = s->add_option("--k", o.k, "gyration index");
    if (need_case) {
      p->required();
      k->required();
    }
    s->add_option("--param", o.params, "pin a parameter, name=value")->take_all();
  };

  auto* classify_cmd = app.add_subcommand("classify", "orbit partition and homotopy-type count for one case");
  case_opts(classify_cmd, true);
  classify_cmd->add_option("--sign-policy", o.sign_policy, "global | per-prime");

  auto* table_cmd = app.add_subcommand("table", "full stability table");
  table_cmd->add_option("--sign-policy", o.sign_policy, "global | per-prime");

  auto* solve_cmd = app.add_subcommand("solve", "decide whether two twist classes give equivalent gyrations");
  case_opts(solve_cmd, true);
  solve_cmd->add_option("--tau", o.tau, "tau-bar coordinates or expression")->required();
  solve_cmd->add_option("--omega", o.omega, "omega-bar coordinates or expression")->required();

  auto* explain_cmd = app.add_subcommand("explain", "witness, criterion summands and citation trail");
  case_opts(explain_cmd, true);
  explain_cmd->add_option("--tau", o.tau, "tau-bar coordinates or expression")->required();
  explain_cmd->add_option("--omega", o.omega, "omega-bar coordinates or expression")->required();

  auto* norm_cmd = app.add_subcommand("normalize", "normal form of a homotopy-class expression");
  norm_cmd->add_option("expr", o.expr, "expression, e.g. \"eta(4).nu(5)\"")->required();
  norm_cmd->add_option("--param", o.params, "pin a parameter, name=value")->take_all();

  auto* verify_cmd = app.add_subcommand("verify-db", "parse and validate the dataset");

  // --json and --db are accepted after the subcommand as well.
  for (auto* s : {classify_cmd, table_cmd, solve_cmd, explain_cmd, norm_cmd, verify_cmd}) {
    s->add_flag("--json", o.as_json, "machine-readable output");
    s->add_option("--db", o.db_path, "dataset directory or file");
  }

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }

  try {
    if (*classify_cmd) return cmd_classify(o, out);
    if (*table_cmd) return cmd_table(o, out);
    if (*solve_cmd) return cmd_solve(o, out);
    if (*explain_cmd) return cmd_explain(o, out);
    if (*norm_cmd) return cmd_normalize(o, out);
    if (*verify_cmd) return cmd_verify(o, out, err);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

}  // namespace gyrstab::cli
