#include "equistab/system_io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace equistab::app {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

[[noreturn]] void schema_fail(const std::string& where, const std::string& what) {
  throw SchemaError("schema error at " + (where.empty() ? std::string("/") : where) + ": " + what);
}

const json& member(const json& obj, const std::string& key, const std::string& where) {
  if (!obj.is_object()) schema_fail(where, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) schema_fail(where + "/" + key, "missing required field");
  return *it;
}

double as_real(const json& v, const std::string& where) {
  if (!v.is_number()) schema_fail(where, "expected a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) schema_fail(where, "number is not finite");
  return d;
}

std::string as_string(const json& v, const std::string& where) {
  if (!v.is_string()) schema_fail(where, "expected a string");
  return v.get<std::string>();
}

Polynomial parse_polynomial(const json& terms, std::size_t dim, const std::string& where) {
  if (!terms.is_array()) schema_fail(where, "expected an array of {\"c\", \"e\"} terms");
  std::vector<fields::Term> out;
  for (std::size_t t = 0; t < terms.size(); ++t) {
    const std::string tw = where + "/" + std::to_string(t);
    const double c = as_real(member(terms[t], "c", tw), tw + "/c");
    const json& e = member(terms[t], "e", tw);
    if (!e.is_array()) schema_fail(tw + "/e", "expected an exponent array");
    if (e.size() != dim) {
      schema_fail(tw + "/e", "exponent vector has length " + std::to_string(e.size()) + ", expected dim = " +
                                 std::to_string(dim));
    }
    fields::Exponents powers;
    for (std::size_t k = 0; k < e.size(); ++k) {
      if (!e[k].is_number_integer() || e[k].get<long long>() < 0) {
        schema_fail(tw + "/e/" + std::to_string(k), "exponent must be a non-negative integer");
      }
      powers.push_back(static_cast<int>(e[k].get<long long>()));
    }
    out.push_back({c, std::move(powers)});
  }
  return Polynomial(dim, out);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SchemaError("cannot open system file '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

std::vector<Polynomial> SystemDefinition::constant_fields() const {
  std::vector<Polynomial> out;
  for (const auto& c : constants) out.push_back(c.field);
  return out;
}

std::vector<std::string> SystemDefinition::constant_names() const {
  std::vector<std::string> out;
  for (const auto& c : constants) out.push_back(c.name);
  return out;
}

const NamedEquilibrium& SystemDefinition::equilibrium(const std::string& eq_name) const {
  for (const auto& e : equilibria) {
    if (e.name == eq_name) return e;
  }
  std::string known;
  for (const auto& e : equilibria) known += (known.empty() ? "" : ", ") + e.name;
  throw ValidationError("system '" + name + "' has no equilibrium named '" + eq_name + "' (known: " + known + ")");
}

bool SystemValidation::passed() const {
  if (!conservation.passed) return false;
  for (const auto& e : equilibria) {
    if (!e.ok) return false;
  }
  return true;
}

std::string SystemValidation::describe_failure(const SystemDefinition& def) const {
  std::ostringstream os;
  os.precision(17);
  for (const auto& e : conservation.entries) {
    if (e.conserved) continue;
    os << "constant '" << def.constants[e.index].name << "' is not conserved: L_f C has residual monomials";
    for (const auto& t : e.offending) os << " " << t.coeff << "*" << fields::monomial_to_string(t.powers);
    return os.str();
  }
  for (const auto& e : equilibria) {
    if (e.ok) continue;
    os << "equilibrium '" << e.name << "' has ||f(x_e)|| = " << e.residual << " > " << e.bound;
    return os.str();
  }
  return {};
}

SystemValidation validate_system(const SystemDefinition& def) {
  SystemValidation v;
  v.conservation = fields::validate_conservation(def.vector_field, def.constant_fields());
  for (const auto& e : def.equilibria) {
    EquilibriumCheck c;
    c.name = e.name;
    c.residual = numkit::norm2(def.vector_field.eval(e.coords));
    c.bound = fields::kTolEquilibrium * (1.0 + numkit::norm2(e.coords));
    c.ok = c.residual <= c.bound;
    v.equilibria.push_back(std::move(c));
  }
  return v;
}

SystemDefinition parse_system(const json& doc) {
  if (!doc.is_object()) schema_fail("", "expected a JSON object");
  if (auto it = doc.find("schema"); it != doc.end()) {
    if (as_string(*it, "/schema") != kSystemSchemaId) {
      schema_fail("/schema", "unsupported schema '" + it->get<std::string>() + "', expected " + kSystemSchemaId);
    }
  }

  const std::string name = as_string(member(doc, "name", ""), "/name");
  const json& dim_j = member(doc, "dim", "");
  if (!dim_j.is_number_integer() || dim_j.get<long long>() < 1) schema_fail("/dim", "expected a positive integer");
  const auto dim = static_cast<std::size_t>(dim_j.get<long long>());

  std::map<std::string, double> params;
  if (auto it = doc.find("parameters"); it != doc.end()) {
    if (!it->is_object()) schema_fail("/parameters", "expected an object of name -> number");
    for (const auto& [k, v] : it->items()) params[k] = as_real(v, "/parameters/" + k);
  }

  const json& vf_j = member(doc, "vector_field", "");
  if (!vf_j.is_array()) schema_fail("/vector_field", "expected an array of polynomials");
  if (vf_j.size() != dim) {
    schema_fail("/vector_field", "has " + std::to_string(vf_j.size()) + " components, expected dim = " +
                                     std::to_string(dim));
  }
  std::vector<Polynomial> comps;
  for (std::size_t k = 0; k < dim; ++k) comps.push_back(parse_polynomial(vf_j[k], dim, "/vector_field/" + std::to_string(k)));

  std::vector<NamedConstant> constants;
  const json& cs = member(doc, "constants", "");
  if (!cs.is_array()) schema_fail("/constants", "expected an array");
  for (std::size_t j = 0; j < cs.size(); ++j) {
    const std::string w = "/constants/" + std::to_string(j);
    constants.push_back({as_string(member(cs[j], "name", w), w + "/name"),
                         parse_polynomial(member(cs[j], "terms", w), dim, w + "/terms")});
  }

  std::vector<NamedEquilibrium> equilibria;
  if (auto it = doc.find("equilibria"); it != doc.end()) {
    if (!it->is_array()) schema_fail("/equilibria", "expected an array");
    for (std::size_t q = 0; q < it->size(); ++q) {
      const std::string w = "/equilibria/" + std::to_string(q);
      const json& coords = member((*it)[q], "coords", w);
      if (!coords.is_array() || coords.size() != dim) {
        schema_fail(w + "/coords", "expected an array of dim = " + std::to_string(dim) + " numbers");
      }
      Vector x;
      for (std::size_t k = 0; k < dim; ++k) x.push_back(as_real(coords[k], w + "/coords/" + std::to_string(k)));
      equilibria.push_back({as_string(member((*it)[q], "name", w), w + "/name"), std::move(x)});
    }
  }

  return SystemDefinition{name, dim, std::move(params), PolyVectorField(std::move(comps)), std::move(constants),
                          std::move(equilibria)};
}

SystemDefinition parse_system_text(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    // Translate the byte offset into line/column.
    std::size_t line = 1, col = 1;
    const std::size_t stop = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    for (std::size_t i = 0; i < stop; ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw SchemaError("JSON syntax error at line " + std::to_string(line) + ", column " + std::to_string(col) +
                      ": " + e.what());
  }
  return parse_system(doc);
}

SystemDefinition read_system(const std::filesystem::path& path) { return parse_system_text(read_file(path)); }

SystemDefinition load_system(const std::filesystem::path& path) {
  SystemDefinition def = read_system(path);
  const SystemValidation v = validate_system(def);
  if (!v.passed()) throw ValidationError(path.string() + ": " + v.describe_failure(def));
  return def;
}

ordered_json polynomial_to_json(const Polynomial& p) {
  ordered_json arr = ordered_json::array();
  for (const auto& t : p.terms()) arr.push_back(ordered_json{{"c", t.coeff}, {"e", t.powers}});
  return arr;
}

ordered_json system_to_json(const SystemDefinition& def) {
  ordered_json doc;
  doc["schema"] = kSystemSchemaId;
  doc["name"] = def.name;
  doc["dim"] = def.dim;
  doc["parameters"] = ordered_json::object();
  for (const auto& [k, v] : def.parameters) doc["parameters"][k] = v;
  doc["vector_field"] = ordered_json::array();
  for (const auto& c : def.vector_field.components()) doc["vector_field"].push_back(polynomial_to_json(c));
  doc["constants"] = ordered_json::array();
  for (const auto& c : def.constants) {
    doc["constants"].push_back(ordered_json{{"name", c.name}, {"terms", polynomial_to_json(c.field)}});
  }
  doc["equilibria"] = ordered_json::array();
  for (const auto& e : def.equilibria) doc["equilibria"].push_back(ordered_json{{"name", e.name}, {"coords", e.coords}});
  return doc;
}

void save_system(const SystemDefinition& def, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << system_to_json(def).dump(2) << "\n";
}

}  // namespace equistab::app
