#include "support.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#ifndef GYRSTAB_TEST_DATA_DIR
#error "GYRSTAB_TEST_DATA_DIR must point at the shipped dataset"
#endif

namespace gyrstab::testing {

std::string data_dir() { return GYRSTAB_TEST_DATA_DIR; }

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<SourceText> shipped_sources() {
  return {{"toda.rdb", read_file(data_dir() + "/toda.rdb")}, {"cases.rdb", read_file(data_dir() + "/cases.rdb")}};
}

const Database& shipped_db() {
  static const Database db = [] {
    ParseResult r = parse_database(shipped_sources());
    if (!r.ok()) throw std::runtime_error("shipped dataset does not parse: " + r.errors.front().to_string());
    return std::move(r.db);
  }();
  return db;
}

Expr ex(const std::string& text) { return parse_expr(text); }

std::vector<CorpusItem> expression_corpus(const Database& db) {
  std::vector<CorpusItem> out;
  for (const auto& g : db.groups) {
    for (const auto& b : g.basis)
      if (b) out.push_back({"basis " + to_string(*b), *b, g.dims});
    if (g.suspension_subgroup)
      for (const auto& s : *g.suspension_subgroup) out.push_back({"subgroup " + to_string(s), s, g.dims});
  }
  for (const auto& r : db.relations) {
    Dims d = *expr_dims(r.lhs, db.types);
    if (!db.group(d)) continue;  // rewrite-only facts in undeclared groups
    out.push_back({"lhs " + to_string(r.lhs), r.lhs, d});
    out.push_back({"rhs " + to_string(r.rhs), r.rhs, d});
  }
  for (const auto& p : db.parameters)
    if (!p.is_scalar())
      for (const auto& v : p.element_values) out.push_back({"value " + to_string(v), v, *p.dims});
  for (const auto& c : db.cases) {
    const GroupDecl* tg = db.group(c.twist_dims());
    const GroupDecl* lg = db.group(c.lambda_dims());
    if (!tg || !lg) continue;
    for (const auto& t : tg->basis)
      if (t) out.push_back({c.id() + " f.tau", compose(c.f, *t, db.types), c.attach_dims()});
    for (const auto& t : c.image) out.push_back({c.id() + " image", t, c.twist_dims()});
    Expr sf = suspend(c.f, c.k - 1, db.types);
    Expr iota = Expr::of(Node::atom("iota", c.m));
    for (const auto& b : lg->basis) {
      if (!b) continue;
      out.push_back({c.id() + " lambda.Sf", compose(*b, sf, db.types), c.attach_dims()});
      out.push_back({c.id() + " [iota,lambda]", whitehead(iota, *b, db.types), c.attach_dims()});
    }
  }
  return out;
}

std::vector<ParameterAssignment> reading_assignments(const Expr& e, Dims d, const Database& db) {
  std::set<std::string> used;
  for (;;) {
    std::vector<ParameterAssignment> asgs =
        used.empty() ? std::vector<ParameterAssignment>{ParameterAssignment{}}
                     : assignments(db, std::vector<std::string>(used.begin(), used.end()));
    std::set<std::string> next = used;
    for (const auto& a : asgs) {
      NormalizeTrace trace;
      try {
        normalize(e, db, a, {}, &trace, d);
      } catch (const UnassignedParameterError& x) {
        next.insert(x.name());
      }
      next.insert(trace.params_used.begin(), trace.params_used.end());
    }
    if (next == used) return asgs;
    used = std::move(next);
  }
}

namespace {

bool replace_once(std::vector<SourceText>& srcs, const std::string& file, const std::string& from,
                  const std::string& to) {
  for (auto& s : srcs) {
    if (s.name != file) continue;
    auto at = s.text.find(from);
    if (at == std::string::npos) return false;
    s.text.replace(at, from.size(), to);
    return true;
  }
  return false;
}

bool drop_line(std::vector<SourceText>& srcs, const std::string& file, const std::string& prefix) {
  for (auto& s : srcs) {
    if (s.name != file) continue;
    auto at = s.text.find("\n" + prefix);
    if (at == std::string::npos) return false;
    auto end = s.text.find('\n', at + 1);
    s.text.erase(at, end - at);
    return true;
  }
  return false;
}

}  // namespace

std::vector<Mutation> mutation_suite() {
  std::vector<Mutation> out;
  auto replace = [](std::string file, std::string from, std::string to) {
    return [=](std::vector<SourceText> s) {
      if (!replace_once(s, file, from, to)) s.clear();
      return s;
    };
  };
  auto drop = [](std::string file, std::string prefix) {
    return [=](std::vector<SourceText> s) {
      if (!drop_line(s, file, prefix)) s.clear();
      return s;
    };
  };
  out.push_back({"order change: nuh(7) of order 4", "", replace("toda.rdb", "Z/8<nuh(7)>", "Z/4<nuh(7)>")});
  out.push_back({"order change: zeta(8) of order 4", "", replace("toda.rdb", "Z/8<zeta(8)>", "Z/4<zeta(8)>")});
  out.push_back({"sign flip: [iota8, iota8]", "",
                 replace("toda.rdb", "rel wh(iota(8), iota(8)) = 2*sigma(8) - Ssigma'(8)",
                         "rel wh(iota(8), iota(8)) = 2*sigma(8) + Ssigma'(8)")});
  out.push_back({"dropped relation: eta(4).nu(5)", "", drop("toda.rdb", "rel eta(4).nu(5) =")});
  out.push_back({"dropped relation: wh(iota(4), iota(4))", "", drop("toda.rdb", "rel wh(iota(4), iota(4)) =")});
  out.push_back({"k=3 case with twist group Z/2", "bott-table", [](std::vector<SourceText> s) {
                   for (auto& f : s)
                     if (f.name == "cases.rdb")
                       f.text += "case O k=3 twist Z/2<tau> image {0} f sigma(8) @ \"seeded mutation\"\n";
                   return s;
                 }});
  out.push_back({"undeclared parameter in a relation", "",
                 replace("toda.rdb", "sign4*2*nu(4).nuh(7)", "s4*2*nu(4).nuh(7)")});
  return out;
}

std::vector<MutationOutcome> run_mutations() {
  std::vector<MutationOutcome> out;
  for (const auto& m : mutation_suite()) {
    MutationOutcome o;
    o.name = m.name;
    auto srcs = m.apply(shipped_sources());
    o.applied = !srcs.empty();
    if (!o.applied) {
      o.detail = "mutation did not apply";
      out.push_back(o);
      continue;
    }
    ParseResult r = parse_database(srcs);
    if (!r.ok()) {
      o.detected = m.expected_kind.empty();
      o.detail = "parse error: " + r.errors.front().to_string();
    } else {
      auto fails = validate(r.db);
      if (m.expected_kind.empty()) {
        o.detected = !fails.empty();
      } else {
        o.detected = std::any_of(fails.begin(), fails.end(), [&](const auto& f) { return f.kind == m.expected_kind; });
      }
      o.detail = fails.empty() ? "no validation failure"
                               : std::to_string(fails.size()) + " failure(s), first " + fails.front().kind + ": " +
                                     fails.front().detail;
    }
    out.push_back(o);
  }
  return out;
}

namespace {

std::string label(const CorpusItem& it, const ParameterAssignment& a, const Database& db) {
  return it.label + " [" + a.to_string(db) + "]";
}

bool representable(const GroupDecl& g, const GroupElement& e) {
  for (std::size_t i = 0; i < e.coords().size(); ++i)
    if (e[i] != 0 && !g.named(i)) return false;
  return true;
}

}  // namespace

std::vector<std::string> idempotence_failures(const Database& db) {
  std::vector<std::string> out;
  for (const auto& it : expression_corpus(db)) {
    const GroupDecl* g = db.group(it.dims);
    for (const auto& a : reading_assignments(it.expr, it.dims, db)) {
      try {
        GroupElement once = normalize(it.expr, db, a, {}, nullptr, it.dims);
        if (!(normalize(once) == once)) out.push_back(label(it, a, db) + ": coordinates not canonical");
        if (!representable(*g, once)) continue;
        GroupElement twice = normalize(db.element_expr(*g, once), db, a, {}, nullptr, it.dims);
        if (!(twice == once))
          out.push_back(label(it, a, db) + ": " + once.to_string() + " renormalizes to " + twice.to_string());
      } catch (const std::exception& x) {
        out.push_back(label(it, a, db) + ": " + x.what());
      }
    }
  }
  return out;
}

std::vector<std::string> confluence_failures(const Database& db, int seeds) {
  std::vector<std::string> out;
  for (const auto& it : expression_corpus(db)) {
    for (const auto& a : reading_assignments(it.expr, it.dims, db)) {
      GroupElement ref;
      try {
        ref = normalize(it.expr, db, a, {}, nullptr, it.dims);
      } catch (const std::exception& x) {
        out.push_back(label(it, a, db) + ": " + x.what());
        continue;
      }
      for (int s = 0; s < seeds; ++s) {
        NormalizeOptions opts;
        opts.shuffle_seed = static_cast<std::uint64_t>(s) * 0x9e3779b97f4a7c15ULL + 1;
        try {
          GroupElement got = normalize(it.expr, db, a, opts, nullptr, it.dims);
          if (!(got == ref)) {
            out.push_back(label(it, a, db) + ": seed " + std::to_string(s) + " gives " + got.to_string() +
                          ", default order " + ref.to_string());
            break;
          }
        } catch (const std::exception& x) {
          out.push_back(label(it, a, db) + ": seed " + std::to_string(s) + ": " + x.what());
          break;
        }
      }
    }
  }
  return out;
}

std::vector<std::string> linearity_failures(const Database& db) {
  std::vector<std::string> out;
  auto corpus = expression_corpus(db);
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    for (std::size_t j = i; j < corpus.size(); ++j) {
      if (!(corpus[i].dims == corpus[j].dims)) continue;
      Expr sum = add(corpus[i].expr, corpus[j].expr);
      for (const auto& a : reading_assignments(sum, corpus[i].dims, db)) {
        try {
          GroupElement lhs = normalize(sum, db, a, {}, nullptr, corpus[i].dims);
          GroupElement x = normalize(corpus[i].expr, db, a, {}, nullptr, corpus[i].dims);
          GroupElement y = normalize(corpus[j].expr, db, a, {}, nullptr, corpus[i].dims);
          if (!(lhs == add(x, y)))
            out.push_back(corpus[i].label + " + " + corpus[j].label + " [" + a.to_string(db) + "]");
        } catch (const std::exception& x) {
          out.push_back(corpus[i].label + " + " + corpus[j].label + ": " + x.what());
        }
      }
    }
  }
  return out;
}

std::vector<std::string> order_annihilation_failures(const Database& db) {
  std::vector<std::string> out;
  for (const auto& g : db.groups) {
    for (std::size_t i = 0; i < g.basis.size(); ++i) {
      if (!g.named(i)) continue;
      const Expr& b = *g.basis[i];
      Int n = g.presentation->order(i);
      for (const auto& a : reading_assignments(b, g.dims, db)) {
        std::string where = to_string(b) + " [" + a.to_string(db) + "]";
        try {
          GroupElement e = normalize(b, db, a, {}, nullptr, g.dims);
          Coords unit(g.basis.size(), 0);
          unit[i] = 1;
          if (e.coords() != normalize(GroupElement(g.presentation, unit)).coords())
            out.push_back(where + ": basis element normalizes to " + e.to_string());
          if (n > 0) {
            GroupElement z = normalize(scale(n, b), db, a, {}, nullptr, g.dims);
            if (!z.is_zero()) out.push_back(where + ": " + std::to_string(n) + " times it is " + z.to_string());
            if (n > 1 && normalize(scale(n - 1, b), db, a, {}, nullptr, g.dims).is_zero())
              out.push_back(where + ": annihilated below its declared order");
          }
        } catch (const std::exception& x) {
          out.push_back(where + ": " + x.what());
        }
      }
    }
  }
  return out;
}

std::vector<std::string> equivalence_law_failures(const Database& db) {
  std::vector<std::string> out;
  for (const auto& c : db.cases) {
    for (const auto& a : case_assignments(c, db)) {
      CaseContext ctx(db, c, a);
      const auto& pts = ctx.twist_points();
      std::size_t n = pts.size();
      std::vector<std::vector<char>> rel(n, std::vector<char>(n, 0));
      std::string where = c.id() + " [" + a.to_string(db) + "]";
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) rel[i][j] = ctx.equivalent(pts[i], pts[j]).has_value();
      std::size_t before = out.size();
      for (std::size_t i = 0; i < n && out.size() - before < 5; ++i) {
        auto w = ctx.equivalent(pts[i], pts[i]);
        if (!w || !w->lambda.is_zero() || w->sign != 1)
          out.push_back(where + ": no identity witness at " + pts[i].to_string());
        for (std::size_t j = 0; j < n; ++j) {
          if (rel[i][j] != rel[j][i])
            out.push_back(where + ": not symmetric on " + pts[i].to_string() + ", " + pts[j].to_string());
          if (!rel[i][j]) continue;
          for (std::size_t k = 0; k < n; ++k)
            if (rel[j][k] && !rel[i][k]) {
              out.push_back(where + ": not transitive through " + pts[j].to_string());
              break;
            }
        }
      }
    }
  }
  return out;
}

std::vector<std::string> witness_replay_failures(const Database& db) {
  std::vector<std::string> out;
  for (const auto& c : db.cases) {
    for (const auto& a : case_assignments(c, db)) {
      CaseContext ctx(db, c, a);
      const auto& pts = ctx.twist_points();
      std::size_t n = pts.size();
      std::vector<AttachingMap> phi;
      for (const auto& p : pts) phi.push_back(attaching_map(c, p, db, a));
      std::set<std::pair<std::size_t, std::size_t>> pairs;
      for (std::size_t i = 0; i < n; ++i) {
        if (n <= 32) {
          for (std::size_t j = 0; j < n; ++j) pairs.insert({i, j});
        } else {
          for (std::size_t j : {std::size_t{0}, i, n - 1 - i, (i * 37 + 11) % n, (i * 101 + 5) % n}) pairs.insert({i, j});
        }
      }
      for (auto [i, j] : pairs) {
        auto w = ctx.equivalent(pts[i], pts[j]);
        if (!w) continue;
        AttachingMap got = apply_equivalence(c, SelfEquivalence{0, w->sign < 0 ? 1 : 0, w->lambda}, phi[i], db, a);
        AttachingMap want = phi[j];
        want.a = scale(w->sign, want.a);
        want.b *= w->sign;
        want.c *= w->sign;
        if (!(got == want))
          out.push_back(c.id() + " [" + a.to_string(db) + "]: witness " + w->lambda.to_string() + " for " +
                        pts[i].to_string() + " -> " + pts[j].to_string() + " does not replay");
      }
    }
  }
  return out;
}

bool brute_force_related(const CaseDecl& c, const GroupElement& tau_bar, const GroupElement& omega_bar,
                         const Database& db, const ParameterAssignment& asg, Int lambda_range) {
  const GroupDecl& lg = *db.group(c.lambda_dims());
  std::vector<std::vector<Int>> ranges;
  for (std::size_t i = 0; i < lg.basis.size(); ++i) {
    std::vector<Int> r;
    Int o = lg.presentation->order(i);
    if (!lg.named(i))
      r = {0};
    else if (o > 0)
      for (Int v = 0; v < o; ++v) r.push_back(v);
    else
      for (Int v = -lambda_range; v <= lambda_range; ++v) r.push_back(v);
    ranges.push_back(r);
  }
  AttachingMap from = attaching_map(c, tau_bar, db, asg);
  AttachingMap to = attaching_map(c, omega_bar, db, asg);
  Coords lam(ranges.size(), 0);
  std::function<bool(std::size_t)> loop = [&](std::size_t f) -> bool {
    if (f == ranges.size()) {
      GroupElement l(lg.presentation, lam);
      for (int s : {1, -1}) {
        AttachingMap got = apply_equivalence(c, SelfEquivalence{0, s < 0 ? 1 : 0, l}, from, db, asg);
        if (got.a == scale(s, to.a) && got.b == s * to.b && got.c == s * to.c) return true;
      }
      return false;
    }
    for (Int v : ranges[f]) {
      lam[f] = v;
      if (loop(f + 1)) return true;
    }
    return false;
  };
  return loop(0);
}

CoordPartition partition_of(const std::vector<Coords>& points,
                            const std::function<bool(const Coords&, const Coords&)>& related) {
  std::vector<std::size_t> parent(points.size());
  std::iota(parent.begin(), parent.end(), 0);
  std::function<std::size_t(std::size_t)> find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (std::size_t i = 0; i < points.size(); ++i)
    for (std::size_t j = i + 1; j < points.size(); ++j)
      if (related(points[i], points[j])) parent[find(i)] = find(j);
  std::map<std::size_t, std::set<Coords>> groups;
  for (std::size_t i = 0; i < points.size(); ++i) groups[find(i)].insert(points[i]);
  CoordPartition out;
  for (auto& [root, members] : groups) out.insert(std::move(members));
  return out;
}

CoordPartition engine_partition(const CaseContext& ctx, SignPolicy policy) {
  const auto& pts = ctx.twist_points();
  Partition p = orbit_partition(
      pts, [&](const GroupElement& x, const GroupElement& y) { return ctx.related(x, y, policy); });
  CoordPartition out;
  for (const auto& cls : p.classes) {
    std::set<Coords> members;
    for (std::size_t i : cls) members.insert(pts[i].coords());
    out.insert(std::move(members));
  }
  return out;
}

namespace {

bool congruent(Int a, Int b, Int m) { return mod_floor(a - b, m) == 0; }

bool any_sign(bool per_prime, const std::vector<std::function<bool(int)>>& parts) {
  if (per_prime) {
    for (const auto& p : parts)
      if (!p(1) && !p(-1)) return false;
    return true;
  }
  for (int s : {1, -1}) {
    bool ok = true;
    for (const auto& p : parts) ok = ok && p(s);
    if (ok) return true;
  }
  return false;
}

}  // namespace

bool op2_k4_related(const Coords& t, const Coords& u, Int xi, SignPolicy policy) {
  auto two = [&](int s) {
    for (Int x = 0; x < 8; ++x)
      if (congruent(t[0] + 2 * x, s * u[0], 8) && congruent((1 - xi) * x, 0, 8)) return true;
    return false;
  };
  auto three = [&](int s) {
    for (Int y = 0; y < 3; ++y)
      if (congruent(t[1] + 2 * y, s * u[1], 3)) return true;
    return false;
  };
  return any_sign(policy == SignPolicy::per_prime, {two, three});
}

bool op2_k12_related(const Coords& t, const Coords& u, Int theta, SignPolicy policy) {
  auto two = [&](int s) {
    for (Int w = 0; w < 8; ++w)
      if (congruent(t[0] + 2 * w, s * u[0], 8) && congruent((1 - theta) * w, 0, 8)) return true;
    return false;
  };
  auto three = [&](int s) {
    for (Int x = 0; x < 9; ++x)
      if (congruent(t[1] + 2 * x, s * u[1], 9) && congruent(x, 0, 3)) return true;
    return false;
  };
  auto seven = [&](int s) {
    for (Int y = 0; y < 7; ++y)
      if (congruent(t[2] + 2 * y, s * u[2], 7)) return true;
    return false;
  };
  return any_sign(policy == SignPolicy::per_prime, {two, three, seven});
}

bool hp2_k4_related(const Coords& t, const Coords& u, Int sign4) {
  for (int s : {1, -1})
    for (Int x = 0; x < 24; ++x)
      for (Int y = 0; y < 4; ++y)
        if (congruent(t[0] + x + 2 * sign4 * x + 4 * y, s * u[0], 8) && congruent(t[1] + x, s * u[1], 3)) return true;
  return false;
}

std::vector<Coords> box(const std::vector<Int>& orders) {
  std::vector<Coords> out{Coords{}};
  for (Int o : orders) {
    std::vector<Coords> next;
    for (const auto& c : out)
      for (Int v = 0; v < o; ++v) {
        Coords d = c;
        d.push_back(v);
        next.push_back(std::move(d));
      }
    out = std::move(next);
  }
  return out;
}

std::string join(const std::vector<std::string>& lines, std::size_t max) {
  std::string out;
  for (std::size_t i = 0; i < lines.size() && i < max; ++i) out += lines[i] + "\n";
  if (lines.size() > max) out += "... " + std::to_string(lines.size() - max) + " more\n";
  return out;
}

}  // namespace gyrstab::testing
