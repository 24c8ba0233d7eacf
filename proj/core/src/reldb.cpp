#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "gyrstab/reldb.hpp"

namespace gyrstab {

namespace fs = std::filesystem;

std::string ParameterDecl::value_string(std::size_t i) const {
  return is_scalar() ? std::to_string(scalar_values.at(i)) : to_string(element_values.at(i));
}

int plane_m(Plane p) {
  switch (p) {
    case Plane::C: return 2;
    case Plane::H: return 4;
    case Plane::O: return 8;
  }
  return 0;
}

std::string plane_name(Plane p) { return std::string(1, plane_letter(p)) + "P2"; }

char plane_letter(Plane p) {
  switch (p) {
    case Plane::C: return 'C';
    case Plane::H: return 'H';
    case Plane::O: return 'O';
  }
  return '?';
}

std::optional<Plane> parse_plane(std::string_view s) {
  if (s == "C" || s == "CP2") return Plane::C;
  if (s == "H" || s == "HP2") return Plane::H;
  if (s == "O" || s == "OP2") return Plane::O;
  return std::nullopt;
}

std::string CaseDecl::id() const { return plane_name(plane) + " k=" + std::to_string(k); }

Int bott_order(int k) {
  switch (((k % 8) + 8) % 8) {
    case 1:
    case 2: return 2;
    case 0:
    case 4: return 0;
    default: return 1;
  }
}

const GroupDecl* Database::group(Dims d) const {
  for (const auto& g : groups)
    if (g.dims == d) return &g;
  return nullptr;
}

const ParameterDecl* Database::parameter(std::string_view name) const {
  for (const auto& p : parameters)
    if (p.name == name) return &p;
  return nullptr;
}

const CaseDecl* Database::find_case(Plane p, int k) const {
  for (const auto& c : cases)
    if (c.plane == p && c.k == k) return &c;
  return nullptr;
}

Expr Database::element_expr(const GroupDecl& g, const GroupElement& e) const {
  Expr out;
  for (std::size_t i = 0; i < e.coords().size(); ++i) {
    if (e[i] == 0) continue;
    if (!g.named(i)) throw ExprError("element " + e.to_string() + " has a component in an unnamed summand");
    for (const auto& t : g.basis[i]->terms) out.terms.push_back(Term{t.coef * e[i], t.scalars, t.chain});
  }
  return out;
}

std::string Database::element_string(const GroupDecl& g, const GroupElement& e) const {
  std::string out;
  for (std::size_t i = 0; i < e.coords().size(); ++i) {
    Int c = e[i];
    if (c == 0) continue;
    std::string name = g.named(i) ? to_string(*g.basis[i]) : "_" + std::to_string(i);
    Int mag = c < 0 ? -c : c;
    if (out.empty())
      out += c < 0 ? "-" : "";
    else
      out += c < 0 ? " - " : " + ";
    if (mag != 1) out += std::to_string(mag) + "*";
    out += name;
  }
  return out.empty() ? "0" : out;
}

std::string ParameterAssignment::to_string(const Database& db) const {
  if (choice.empty()) return "-";
  std::string out;
  // Database declaration order reads better than alphabetical.
  for (const auto& p : db.parameters) {
    auto it = choice.find(p.name);
    if (it == choice.end()) continue;
    if (!out.empty()) out += ", ";
    out += p.name + "=" + p.value_string(it->second);
  }
  return out;
}

std::vector<ParameterAssignment> assignments(const Database& db, const std::optional<std::vector<std::string>>& restrict) {
  std::vector<const ParameterDecl*> ps;
  for (const auto& p : db.parameters)
    if (!restrict || std::find(restrict->begin(), restrict->end(), p.name) != restrict->end()) ps.push_back(&p);
  std::vector<ParameterAssignment> out{ParameterAssignment{}};
  // First declared parameter varies slowest.
  for (const ParameterDecl* p : ps) {
    std::vector<ParameterAssignment> next;
    for (const auto& a : out)
      for (std::size_t i = 0; i < p->domain_size(); ++i) {
        ParameterAssignment b = a;
        b.choice[p->name] = i;
        next.push_back(std::move(b));
      }
    out = std::move(next);
  }
  return out;
}

ParameterAssignment default_assignment(const Database& db) {
  ParameterAssignment a;
  for (const auto& p : db.parameters) a.choice[p.name] = 0;
  return a;
}

std::string ValidationFailure::to_json() const {
  nlohmann::json j{{"kind", kind}, {"location", location}, {"detail", detail}};
  return j.dump();
}

std::optional<std::string> resolve_dataset_path(const std::string& path) {
  std::vector<std::string> candidates;
  if (!path.empty()) {
    candidates.push_back(path);
  } else {
    if (const char* env = std::getenv("GYRSTAB_DB"); env && *env) candidates.emplace_back(env);
    candidates.emplace_back(GYRSTAB_SOURCE_DATA_DIR);
    candidates.emplace_back(GYRSTAB_INSTALL_DATA_DIR);
  }
  for (const auto& c : candidates) {
    std::error_code ec;
    if (fs::is_regular_file(c, ec)) return c;
    if (fs::is_directory(c, ec) && fs::is_regular_file(fs::path(c) / "toda.rdb", ec)) return c;
    if (!path.empty()) return std::nullopt;
  }
  return std::nullopt;
}

ParseResult load_database(const std::string& path) {
  auto resolved = resolve_dataset_path(path);
  if (!resolved) {
    ParseResult r;
    r.errors.push_back({SourcePos{path, 0, 0}, path.empty() ? "no dataset found (set GYRSTAB_DB or pass --db)"
                                                           : "dataset not found: " + path});
    return r;
  }
  std::vector<fs::path> files;
  if (fs::is_directory(*resolved)) {
    for (const char* name : {"toda.rdb", "cases.rdb"})
      if (fs::is_regular_file(fs::path(*resolved) / name)) files.push_back(fs::path(*resolved) / name);
  } else {
    files.emplace_back(*resolved);
  }
  std::vector<SourceText> sources;
  for (const auto& f : files) {
    std::ifstream in(f, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    sources.push_back(SourceText{f.filename().string(), ss.str()});
  }
  return parse_database(sources);
}

}  // namespace gyrstab
