#include "gyrstab/report.hpp"

#include "json.hpp"

namespace gyrstab {

using nlohmann::json;

namespace {

const GroupDecl* twist_decl(const StabilityReport& r, const Database& db) {
  const CaseDecl* c = db.find_case(r.plane, r.k);
  return c ? db.group(c->twist_dims()) : nullptr;
}

const GroupDecl* lambda_decl(const StabilityReport& r, const Database& db) {
  const CaseDecl* c = db.find_case(r.plane, r.k);
  return c ? db.group(c->lambda_dims()) : nullptr;
}

std::string point_label(const GroupDecl* g, const GroupElement& p, const Database& db) {
  return g ? db.element_string(*g, p) : p.to_string();
}

json assignment_json(const ParameterAssignment& a, const Database& db) {
  json out = json::object();
  for (const auto& p : db.parameters) {
    auto it = a.choice.find(p.name);
    if (it == a.choice.end()) continue;
    if (p.is_scalar())
      out[p.name] = p.scalar_values[it->second];
    else
      out[p.name] = p.value_string(it->second);
  }
  return out;
}

}  // namespace

std::string gsii_summary(const StabilityReport& r, const Database& db) {
  auto agg = r.aggregate();
  if (r.trivial_twist) return "GSII = 1 (trivial twist group)";
  if (agg.size() == 1) return "GSII = " + std::to_string(agg.begin()->first) + " (all assignments)";
  std::string out = "GSII = ";
  bool first = true;
  for (const auto& [count, idx] : agg) {
    out += (first ? "" : "; ") + std::to_string(count) + " for ";
    first = false;
    for (std::size_t i = 0; i < idx.size(); ++i) out += (i ? " | " : "") + r.results[idx[i]].assignment.to_string(db);
  }
  return out;
}

std::string report_text(const StabilityReport& r, const Database& db) {
  std::string out = r.case_id() + "\n";
  if (r.trivial_twist) {
    out += "count 1 (trivial twist group)\nGSI: yes\n";
    return out;
  }
  if (r.policy != SignPolicy::global) out += "sign policy: " + to_string(r.policy) + " (diagnostic, no witnesses)\n";
  if (!r.parameters.empty()) {
    out += "parameters:";
    for (const auto& p : r.parameters) out += " " + p;
    out += "\n";
  }
  for (const auto& a : r.assumptions) out += "assumption: " + a + "\n";
  const GroupDecl* tg = twist_decl(r, db);
  const GroupDecl* lg = lambda_decl(r, db);
  for (const auto& res : r.results) {
    out += "[" + res.assignment.to_string(db) + "] " + std::to_string(res.points.size()) + " twist classes, count " +
           std::to_string(res.count()) + "\n";
    for (const auto& cls : res.classes) {
      out += "  class of " + point_label(tg, res.points[cls.representative], db) + " (" +
             std::to_string(cls.members.size()) + " member" + (cls.members.size() == 1 ? "" : "s") + ")";
      if (cls.members.size() <= 8 && cls.members.size() > 1) {
        out += ":";
        for (std::size_t i = 0; i < cls.members.size(); ++i) {
          out += " " + point_label(tg, res.points[cls.members[i]], db);
          if (!cls.witnesses.empty() && cls.witnesses[i] && cls.members[i] != cls.representative) {
            const Witness& w = *cls.witnesses[i];
            out += " [lambda=" + (lg ? db.element_string(*lg, w.lambda) : w.lambda.to_string()) +
                   (w.sign < 0 ? ", sign -1]" : "]");
          }
          if (i + 1 < cls.members.size()) out += ",";
        }
      }
      out += "\n";
    }
  }
  out += gsii_summary(r, db) + "\n";
  out += std::string("GSI: ") + (r.gsi() ? "yes" : "no") + "\n";
  return out;
}

std::string report_json(const StabilityReport& r, const Database& db) {
  json arr = json::array();
  const GroupDecl* tg = twist_decl(r, db);
  const GroupDecl* lg = lambda_decl(r, db);
  for (const auto& res : r.results) {
    json rec;
    rec["plane"] = plane_name(r.plane);
    rec["k"] = r.k;
    rec["assignment"] = assignment_json(res.assignment, db);
    rec["sign_policy"] = to_string(r.policy);
    json reps = json::array();
    json wits = json::array();
    for (const auto& cls : res.classes) {
      if (r.trivial_twist) {
        reps.push_back(json{{"coords", json::array()}, {"expr", "0"}, {"size", 1}});
        continue;
      }
      const GroupElement& p = res.points[cls.representative];
      reps.push_back(json{{"coords", p.coords()}, {"expr", point_label(tg, p, db)}, {"size", cls.members.size()}});
      for (std::size_t i = 0; i < cls.witnesses.size(); ++i) {
        if (!cls.witnesses[i]) continue;
        const Witness& w = *cls.witnesses[i];
        wits.push_back(json{{"from", p.coords()},
                            {"to", res.points[cls.members[i]].coords()},
                            {"lambda", w.lambda.coords()},
                            {"lambda_expr", lg ? db.element_string(*lg, w.lambda) : w.lambda.to_string()},
                            {"sign", w.sign}});
      }
    }
    rec["class_representatives"] = reps;
    rec["witnesses"] = wits;
    rec["count"] = res.count();
    rec["gsi"] = res.count() == 1;
    if (r.trivial_twist) rec["note"] = "trivial twist group";
    if (!r.assumptions.empty()) rec["assumptions"] = r.assumptions;
    arr.push_back(rec);
  }
  return arr.dump(2) + "\n";
}

std::string table_text(const std::vector<TableRow>& rows) {
  std::string out = "manifold  k    GSI  GSII       detail\n";
  for (const auto& row : rows) {
    std::string k = row.k ? std::to_string(row.k) : "any";
    std::string counts;
    for (std::size_t i = 0; i < row.counts.size(); ++i) counts += (i ? "," : "") + std::to_string(row.counts[i]);
    auto pad = [](std::string s, std::size_t w) {
      if (s.size() < w) s.append(w - s.size(), ' ');
      return s;
    };
    out += pad(row.manifold, 10) + pad(k, 5) + pad(row.gsi ? "yes" : "no", 5) + pad(counts, 11) + row.detail;
    while (!out.empty() && out.back() == ' ') out.pop_back();
    out += "\n";
  }
  return out;
}

std::string table_json(const std::vector<TableRow>& rows, const Database& db) {
  json arr = json::array();
  for (const auto& row : rows) {
    json rec{{"manifold", row.manifold}, {"gsi", row.gsi}, {"counts", row.counts}, {"detail", row.detail}};
    rec["k"] = row.k ? json(row.k) : json("any");
    if (row.report) {
      json per = json::array();
      for (const auto& res : row.report->results)
        per.push_back(json{{"assignment", assignment_json(res.assignment, db)}, {"count", res.count()}});
      rec["assignments"] = per;
    }
    arr.push_back(rec);
  }
  return arr.dump(2) + "\n";
}

std::string validation_text(const std::vector<ValidationFailure>& failures) {
  if (failures.empty()) return "ok: no validation failures\n";
  std::string out;
  for (const auto& f : failures) out += f.location + ": " + f.kind + ": " + f.detail + "\n";
  out += std::to_string(failures.size()) + " failure" + (failures.size() == 1 ? "" : "s") + "\n";
  return out;
}

std::string validation_json(const std::vector<ValidationFailure>& failures) {
  json arr = json::array();
  for (const auto& f : failures) arr.push_back(json::parse(f.to_json()));
  return arr.dump(2) + "\n";
}

}  // namespace gyrstab
