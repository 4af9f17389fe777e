#pragma once

// System-definition files.
//
//   {
//     "schema": "equistab.system/1",
//     "name": "rigid_body",
//     "dim": 3,
//     "parameters": {"I1": 3, "I2": 2, "I3": 1, "M": 1},
//     "vector_field": [[{"c": 0.5, "e": [0, 1, 1]}], ...],
//     "constants": [{"name": "C1", "terms": [{"c": 0.5, "e": [2, 0, 0]}, ...]}, ...],
//     "equilibria": [{"name": "spin-major", "coords": [1, 0, 0]}, ...]
//   }
//
// The canonical form lists monomials in lexicographic exponent order with
// duplicates merged and exact zeros dropped. docs/system.schema.json is the
// machine-readable version of this layout.

#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "equistab/polynomial.hpp"

namespace equistab::app {

using fields::Polynomial;
using fields::PolyVectorField;
using numkit::Vector;

inline constexpr const char* kSystemSchemaId = "equistab.system/1";

/// Malformed input. what() carries "line L, column C" for syntax errors or a
/// JSON pointer ("/constants/1/terms/0/e") for schema violations.
class SchemaError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Well-formed input that breaks a system invariant (non-conserved constant,
/// equilibrium residual too large).
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct NamedConstant {
  std::string name;
  Polynomial field;
};

struct NamedEquilibrium {
  std::string name;
  Vector coords;
};

struct SystemDefinition {
  std::string name;
  std::size_t dim = 0;
  std::map<std::string, double> parameters;
  PolyVectorField vector_field;
  std::vector<NamedConstant> constants;
  std::vector<NamedEquilibrium> equilibria;

  std::vector<Polynomial> constant_fields() const;
  std::vector<std::string> constant_names() const;
  /// Throws ValidationError naming the available equilibria if absent.
  const NamedEquilibrium& equilibrium(const std::string& name) const;
};

struct EquilibriumCheck {
  std::string name;
  double residual = 0.0;
  double bound = 0.0;
  bool ok = true;
};

struct SystemValidation {
  fields::ConservationReport conservation;
  std::vector<EquilibriumCheck> equilibria;
  bool passed() const;
  /// First failing invariant, worded for an error message; empty if passed.
  std::string describe_failure(const SystemDefinition& def) const;
};

SystemValidation validate_system(const SystemDefinition& def);

/// Structural parse only (no conservation/equilibrium checks).
SystemDefinition parse_system(const nlohmann::json& doc);
SystemDefinition parse_system_text(const std::string& text);
/// Reads, parses and validates; throws SchemaError or ValidationError.
SystemDefinition load_system(const std::filesystem::path& path);
/// Reads and parses without validating (for reporting on broken systems).
SystemDefinition read_system(const std::filesystem::path& path);

nlohmann::ordered_json polynomial_to_json(const Polynomial& p);
nlohmann::ordered_json system_to_json(const SystemDefinition& def);
void save_system(const SystemDefinition& def, const std::filesystem::path& path);

}  // namespace equistab::app
