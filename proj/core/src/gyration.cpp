#include "gyrstab/gyration.hpp"

#include <algorithm>

namespace gyrstab {

namespace {

std::optional<Int> prime_of_power(Int n) {
  if (n < 2) return std::nullopt;
  Int p = 2;
  while (p * p <= n && n % p != 0) ++p;
  if (n % p != 0) p = n;
  while (n % p == 0) n /= p;
  if (n != 1) return std::nullopt;
  return p;
}

const GroupDecl& require_group(const Database& db, Dims d, const CaseDecl& c, const char* what) {
  const GroupDecl* g = db.group(d);
  if (!g) throw GyrationError(c.id() + ": " + what + " group pi_" + std::to_string(d.dom) + "(S^" +
                              std::to_string(d.cod) + ") is not declared");
  return *g;
}

void check_k(Plane p, int k) {
  int m = plane_m(p);
  if (k < 2 || k > 2 * m - 2)
    throw GyrationError("k=" + std::to_string(k) + " is outside [2, " + std::to_string(2 * m - 2) + "] for " +
                        plane_name(p) + ": the attaching-map description needs 2 <= k <= 2m-2");
}

Expr iota_expr(int m) { return Expr::of(Node::atom("iota", m)); }

GroupElement normalize_in(const Expr& e, const Database& db, const ParameterAssignment& asg, Dims d,
                          NormalizeTrace* trace) {
  return normalize(e, db, asg, {}, trace, d);
}

}  // namespace

std::string to_string(SignPolicy p) { return p == SignPolicy::global ? "global" : "per-prime"; }

std::vector<GroupElement> twist_image(const CaseDecl& c, const Database& db, const ParameterAssignment& asg) {
  const GroupDecl& g = require_group(db, c.twist_dims(), c, "twist");
  if (c.image_full) {
    if (!g.presentation->finite()) throw GyrationError(c.id() + ": full twist image in an infinite group");
    return enumerate(g.presentation);
  }
  Subgroup s{g.presentation, {}};
  for (const auto& e : c.image) s.generators.push_back(normalize(e, db, asg, {}, nullptr, c.twist_dims()));
  auto out = subgroup_elements(s);
  std::sort(out.begin(), out.end());
  return out;
}

AttachingMap attaching_map(const CaseDecl& c, const GroupElement& tau_bar, const Database& db,
                           const ParameterAssignment& asg, NormalizeTrace* trace) {
  check_k(c.plane, c.k);
  const GroupDecl& tg = require_group(db, c.twist_dims(), c, "twist");
  AttachingMap phi;
  phi.m = c.m;
  phi.k = c.k;
  phi.a = normalize_in(compose(c.f, db.element_expr(tg, tau_bar), db.types), db, asg, c.attach_dims(), trace);
  return phi;
}

AttachingMap apply_equivalence(const CaseDecl& c, const SelfEquivalence& eps, const AttachingMap& phi,
                               const Database& db, const ParameterAssignment& asg, NormalizeTrace* trace) {
  const GroupDecl& lg = require_group(db, c.lambda_dims(), c, "lambda");
  Expr lambda = db.element_expr(lg, eps.lambda);
  Expr sf = suspend(c.f, c.k - 1, db.types);
  GroupElement lf = normalize_in(compose(lambda, sf, db.types), db, asg, c.attach_dims(), trace);
  GroupElement wh = normalize_in(whitehead(iota_expr(c.m), lambda, db.types), db, asg, c.attach_dims(), trace);
  Int si = eps.sign_i % 2 ? -1 : 1;
  Int sj = eps.sign_j % 2 ? -1 : 1;
  AttachingMap out = phi;
  out.a = add(add(scale(si, phi.a), lf), scale(si, wh));
  out.b = sj * phi.b;
  out.c = si * sj * phi.c;
  return out;
}

CaseContext::CaseContext(const Database& db, const CaseDecl& c, ParameterAssignment asg)
    : db_(&db), case_(&c), asg_(std::move(asg)) {
  check_k(c.plane, c.k);
  twist_ = &require_group(db, c.twist_dims(), c, "twist");
  attach_ = &require_group(db, c.attach_dims(), c, "attaching");
  lambda_ = &require_group(db, c.lambda_dims(), c, "lambda");

  if (c.image_full) {
    points_ = twist_image(c, db, asg_);
  } else {
    Subgroup s{twist_->presentation, {}};
    for (const auto& e : c.image) s.generators.push_back(normalize(e, db, asg_, {}, &trace_, c.twist_dims()));
    points_ = subgroup_elements(s);
    std::sort(points_.begin(), points_.end());
  }
  for (const auto& p : points_)
    a_.push_back(normalize_in(compose(c.f, db.element_expr(*twist_, p), db.types), db, asg_, c.attach_dims(), &trace_));

  const GroupRef& target = attach_->presentation;
  Int ex = exponent(*target);
  Expr sf = suspend(c.f, c.k - 1, db.types);
  for (std::size_t i = 0; i < lambda_->basis.size(); ++i) {
    if (!lambda_->named(i)) continue;
    const Expr& b = *lambda_->basis[i];
    GroupElement lf = normalize_in(compose(b, sf, db.types), db, asg_, c.attach_dims(), &trace_);
    GroupElement wh = normalize_in(whitehead(iota_expr(c.m), b, db.types), db, asg_, c.attach_dims(), &trace_);
    lambda_factors_.push_back(i);
    delta_.push_back(add(lf, wh));
    Int o = lambda_->presentation->order(i);
    bounds_.push_back(o > 0 ? o : ex);
  }
  if (delta_.empty())
    reach_ = ReachableSet(target, {{GroupElement::zero(target).coords(), Coords{}}});
  else
    reach_ = reachable_set(delta_, bounds_);

  // Primary decomposition of the reachable subgroup, for the per-prime policy.
  bool primary = true;
  for (const auto& f : target->factors()) {
    auto p = f.order > 0 ? prime_of_power(f.order) : std::nullopt;
    if (!p) {
      primary = false;
      break;
    }
    if (std::find(primes_.begin(), primes_.end(), *p) == primes_.end()) primes_.push_back(*p);
  }
  if (!primary) primes_.clear();
  std::sort(primes_.begin(), primes_.end());
  for (Int p : primes_) {
    std::set<Coords> proj;
    for (const auto& [coords, w] : reach_.table()) {
      Coords x = coords;
      for (std::size_t f = 0; f < x.size(); ++f)
        if (*prime_of_power(target->order(f)) != p) x[f] = 0;
      proj.insert(std::move(x));
    }
    reach_by_prime_.push_back(std::move(proj));
  }
}

std::size_t CaseContext::point_index(const GroupElement& tau_bar) const {
  GroupElement t = normalize(tau_bar);
  auto it = std::lower_bound(points_.begin(), points_.end(), t);
  if (it == points_.end() || !(*it == t))
    throw GyrationError(case_->id() + ": " + tau_bar.to_string() + " is not in the twist image");
  return static_cast<std::size_t>(it - points_.begin());
}

GroupElement CaseContext::attach_a(const GroupElement& tau_bar) const { return a_[point_index(tau_bar)]; }

GroupElement CaseContext::lambda_element(const Coords& coefs) const {
  Coords c(lambda_->presentation->rank(), 0);
  for (std::size_t i = 0; i < coefs.size(); ++i) c[lambda_factors_[i]] = coefs[i];
  return normalize(GroupElement(lambda_->presentation, std::move(c)));
}

std::optional<Witness> CaseContext::equivalent(const GroupElement& tau_bar, const GroupElement& omega_bar) const {
  const GroupElement& at = attach_a(tau_bar);
  const GroupElement& aw = attach_a(omega_bar);
  for (int s : {1, -1}) {
    GroupElement target = sub(scale(s, aw), at);
    if (reach_.contains(target)) return Witness{lambda_element(reach_.witness(target)), s};
  }
  return std::nullopt;
}

bool CaseContext::equivalent_per_prime(const GroupElement& tau_bar, const GroupElement& omega_bar) const {
  if (primes_.empty() && attach_->presentation->rank() > 0)
    throw GyrationError(case_->id() + ": per-prime signs need a primary decomposition of the attaching group");
  const GroupElement& at = attach_a(tau_bar);
  const GroupElement& aw = attach_a(omega_bar);
  const GroupRef& target = attach_->presentation;
  for (std::size_t pi = 0; pi < primes_.size(); ++pi) {
    bool ok = false;
    for (int s : {1, -1}) {
      Coords x = sub(scale(s, aw), at).coords();
      for (std::size_t f = 0; f < x.size(); ++f)
        if (*prime_of_power(target->order(f)) != primes_[pi]) x[f] = 0;
      if (reach_by_prime_[pi].count(x)) {
        ok = true;
        break;
      }
    }
    if (!ok) return false;
  }
  return true;
}

bool CaseContext::related(const GroupElement& tau_bar, const GroupElement& omega_bar, SignPolicy policy) const {
  return policy == SignPolicy::global ? equivalent(tau_bar, omega_bar).has_value()
                                      : equivalent_per_prime(tau_bar, omega_bar);
}

namespace {

void verify_witness(const CaseDecl& c, const GroupElement& tau_bar, const GroupElement& omega_bar, const Witness& w,
                    const Database& db, const ParameterAssignment& asg) {
  AttachingMap phi = attaching_map(c, tau_bar, db, asg);
  SelfEquivalence eps{0, w.sign < 0 ? 1 : 0, w.lambda};
  AttachingMap got = apply_equivalence(c, eps, phi, db, asg);
  AttachingMap want = attaching_map(c, omega_bar, db, asg);
  want.a = scale(w.sign, want.a);
  want.b *= w.sign;
  want.c *= w.sign;
  if (!(got == want))
    throw GyrationError(c.id() + ": witness lambda=" + w.lambda.to_string() + " sign=" + std::to_string(w.sign) +
                        " fails re-verification for " + tau_bar.to_string() + " ~ " + omega_bar.to_string());
}

}  // namespace

std::optional<Witness> equivalent(const CaseDecl& c, const GroupElement& tau_bar, const GroupElement& omega_bar,
                                  const Database& db, const ParameterAssignment& asg) {
  CaseContext ctx(db, c, asg);
  auto w = ctx.equivalent(tau_bar, omega_bar);
  if (w) verify_witness(c, tau_bar, omega_bar, *w, db, asg);
  return w;
}

CriterionTerms criterion_terms(const CaseDecl& c, const GroupElement& tau_bar, const GroupElement& omega_bar,
                               const GroupElement& lambda, const Database& db, const ParameterAssignment& asg) {
  CriterionTerms t;
  const GroupDecl& tg = require_group(db, c.twist_dims(), c, "twist");
  const GroupDecl& lg = require_group(db, c.lambda_dims(), c, "lambda");
  Expr l = db.element_expr(lg, lambda);
  t.f_tau = normalize_in(compose(c.f, db.element_expr(tg, tau_bar), db.types), db, asg, c.attach_dims(), &t.trace);
  t.lambda_f = normalize_in(compose(l, suspend(c.f, c.k - 1, db.types), db.types), db, asg, c.attach_dims(), &t.trace);
  t.whitehead = normalize_in(whitehead(iota_expr(c.m), l, db.types), db, asg, c.attach_dims(), &t.trace);
  t.f_omega = normalize_in(compose(c.f, db.element_expr(tg, omega_bar), db.types), db, asg, c.attach_dims(), &t.trace);
  return t;
}

std::vector<std::string> case_parameters(const CaseDecl& c, const Database& db) {
  std::set<std::string> found;
  while (true) {
    std::set<std::string> next = found;
    std::vector<std::string> restrict(found.begin(), found.end());
    for (auto a : assignments(db, restrict)) {
      ParameterAssignment full = default_assignment(db);
      for (const auto& [k, v] : a.choice) full.choice[k] = v;
      CaseContext ctx(db, c, full);
      next.insert(ctx.params_used().begin(), ctx.params_used().end());
    }
    if (next == found) break;
    found = std::move(next);
  }
  std::vector<std::string> out;
  for (const auto& p : db.parameters)
    if (found.count(p.name)) out.push_back(p.name);
  return out;
}

std::vector<ParameterAssignment> case_assignments(const CaseDecl& c, const Database& db,
                                                  const std::map<std::string, std::string>& pins) {
  std::map<std::string, std::size_t> pinned;
  for (const auto& [name, value] : pins) {
    const ParameterDecl* p = db.parameter(name);
    if (!p) throw GyrationError("unknown parameter '" + name + "'");
    std::optional<std::size_t> idx;
    for (std::size_t i = 0; i < p->domain_size(); ++i) {
      std::string v = p->value_string(i);
      if (v == value || (value.size() > 1 && value[0] == '+' && v == value.substr(1))) idx = i;
    }
    if (!idx) throw GyrationError("value '" + value + "' is not in the domain of parameter '" + name + "'");
    pinned[name] = *idx;
  }
  std::vector<std::string> free;
  for (const auto& p : case_parameters(c, db))
    if (!pinned.count(p)) free.push_back(p);
  auto out = assignments(db, free);
  for (auto& a : out)
    for (const auto& [name, idx] : pinned) a.choice[name] = idx;
  return out;
}

std::string StabilityReport::case_id() const { return plane_name(plane) + " k=" + std::to_string(k); }

std::map<std::size_t, std::vector<std::size_t>> StabilityReport::aggregate() const {
  std::map<std::size_t, std::vector<std::size_t>> out;
  for (std::size_t i = 0; i < results.size(); ++i) out[results[i].count()].push_back(i);
  return out;
}

bool StabilityReport::gsi() const {
  return std::all_of(results.begin(), results.end(), [](const AssignmentResult& r) { return r.count() == 1; });
}

StabilityReport classify(Plane plane, int k, const Database& db, SignPolicy policy,
                         const std::map<std::string, std::string>& pins) {
  check_k(plane, k);
  StabilityReport rep;
  rep.plane = plane;
  rep.m = plane_m(plane);
  rep.k = k;
  rep.policy = policy;
  if (bott_order(k) == 1) {
    rep.trivial_twist = true;
    rep.note = "trivial twist group";
    AssignmentResult r;
    r.classes.push_back(ClassInfo{0, {0}, {}});
    rep.results.push_back(std::move(r));
    return rep;
  }
  const CaseDecl* c = db.find_case(plane, k);
  if (!c) throw GyrationError("no case declared for " + plane_name(plane) + " k=" + std::to_string(k));
  if (c->image_full)
    rep.assumptions.push_back("twist image taken to be all of pi_" + std::to_string(c->twist_dims().dom) + "(S^" +
                              std::to_string(c->twist_dims().cod) + "): " + c->citation);
  rep.parameters = case_parameters(*c, db);
  for (const auto& asg : case_assignments(*c, db, pins)) {
    CaseContext ctx(db, *c, asg);
    AssignmentResult r;
    r.assignment = asg;
    r.points = ctx.twist_points();
    for (std::size_t i = 0; i < r.points.size(); ++i) r.attach.push_back(ctx.attach_a(i));
    Partition part = orbit_partition(
        r.points, [&](const GroupElement& x, const GroupElement& y) { return ctx.related(x, y, policy); });
    for (std::size_t ci = 0; ci < part.count(); ++ci) {
      ClassInfo info;
      info.representative = part.representatives[ci];
      info.members = part.classes[ci];
      for (std::size_t mbr : info.members) {
        if (policy != SignPolicy::global) {
          info.witnesses.push_back(std::nullopt);
          continue;
        }
        auto w = ctx.equivalent(r.points[info.representative], r.points[mbr]);
        if (!w)
          throw GyrationError(c->id() + ": relation is not transitive at " + r.points[mbr].to_string());
        verify_witness(*c, r.points[info.representative], r.points[mbr], *w, db, asg);
        info.witnesses.push_back(w);
      }
      r.classes.push_back(std::move(info));
    }
    rep.results.push_back(std::move(r));
  }
  return rep;
}

std::vector<TableRow> table(const Database& db, SignPolicy policy) {
  std::vector<TableRow> rows;
  const std::vector<std::pair<Plane, int>> paper_rows = {{Plane::C, 2}, {Plane::H, 2}, {Plane::H, 4},
                                                         {Plane::O, 2}, {Plane::O, 4}, {Plane::O, 8},
                                                         {Plane::O, 9}, {Plane::O, 10}, {Plane::O, 12}};
  for (auto [p, k] : paper_rows) {
    StabilityReport r = classify(p, k, db, policy);
    TableRow row;
    row.manifold = plane_name(p);
    row.k = k;
    row.gsi = r.gsi();
    auto agg = r.aggregate();
    for (const auto& [count, idx] : agg) row.counts.push_back(count);
    if (agg.size() == 1) {
      row.detail = r.results.size() == 1 ? "" : "all " + std::to_string(r.results.size()) + " assignments";
    } else {
      for (const auto& [count, idx] : agg) {
        if (!row.detail.empty()) row.detail += "; ";
        row.detail += std::to_string(count) + " for ";
        for (std::size_t i = 0; i < idx.size(); ++i)
          row.detail += (i ? " | " : "") + r.results[idx[i]].assignment.to_string(db);
      }
    }
    row.report = std::move(r);
    rows.push_back(std::move(row));
  }
  for (Plane p : {Plane::C, Plane::H, Plane::O}) {
    int m = plane_m(p);
    for (int k = 2; k <= 2 * m - 2; ++k) {
      if (bott_order(k) != 1) continue;
      rows.push_back(TableRow{plane_name(p), k, true, {1}, "trivial twist group", std::nullopt});
    }
  }
  rows.push_back(TableRow{"S^n", 0, true, {1}, "top-cell attaches to a point", std::nullopt});
  return rows;
}

std::vector<TheoremACheck> theorem_a_check(const Database& db) {
  std::vector<TheoremACheck> out;
  for (Plane p : {Plane::C, Plane::H, Plane::O}) {
    TheoremACheck chk{p, true, ""};
    const CaseDecl* c = db.find_case(p, 2);
    if (!c) {
      chk.ok = false;
      chk.detail = "no k=2 case declared";
      out.push_back(chk);
      continue;
    }
    std::size_t pairs = 0;
    auto asgs = case_assignments(*c, db);
    for (const auto& asg : asgs) {
      CaseContext ctx(db, *c, asg);
      const auto& pts = ctx.twist_points();
      for (const auto& x : pts)
        for (const auto& y : pts) {
          bool eq = ctx.equivalent(x, y).has_value();
          bool want = p == Plane::C ? true : x == y;
          ++pairs;
          if (eq != want && chk.ok) {
            chk.ok = false;
            chk.detail = "pair " + x.to_string() + ", " + y.to_string() + " under " + asg.to_string(db) +
                         (eq ? " is equivalent" : " is not equivalent");
          }
        }
    }
    if (chk.ok)
      chk.detail = std::string(p == Plane::C ? "all pairs equivalent" : "only diagonal pairs equivalent") + " (" +
                   std::to_string(pairs) + " pairs over " + std::to_string(asgs.size()) + " assignments)";
    out.push_back(chk);
  }
  return out;
}

}  // namespace gyrstab
