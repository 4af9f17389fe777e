#pragma once

// Command-level operations (analyze / probe / validate / list) and their
// report JSON. docs/report.schema.json describes every document produced here.

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "equistab/dynamics.hpp"
#include "equistab/methods.hpp"
#include "equistab/system_io.hpp"

namespace equistab::app {

inline constexpr const char* kReportSchemaId = "equistab.report/1";

enum ExitCode : int {
  kExitStable = 0,
  kExitError = 1,
  kExitIndecisive = 2,
  kExitInconsistent = 3,
};

struct AnalyzeOptions {
  std::string equilibrium;
  std::optional<std::size_t> pivot;  // nullopt: every pivot 1..k
  std::vector<methods::Method> methods{methods::Method::Arnold, methods::Method::EnergyCasimir,
                                       methods::Method::OrtegaRatiu};
  std::optional<numkit::Vector> multiplier_override;  // requires a fixed pivot
  bool run_probe = true;
  dynamics::ProbeSettings probe;
};

struct CommandResult {
  int exit_code = kExitError;
  nlohmann::ordered_json report;
};

CommandResult analyze(const SystemDefinition& system, const AnalyzeOptions& options);
CommandResult probe(const SystemDefinition& system, const std::string& equilibrium,
                    const dynamics::ProbeSettings& settings);
CommandResult validate(const SystemDefinition& system);
CommandResult list_systems();

nlohmann::ordered_json verdict_to_json(const methods::MethodVerdict& v);
nlohmann::ordered_json certificate_to_json(const methods::StabilityCertificate& c,
                                           const std::vector<std::string>& constant_names);
nlohmann::ordered_json probe_to_json(const dynamics::ProbeReport& r, const std::vector<std::string>& constant_names);

/// Plain-text rendering of any report produced above.
std::string render_text(const nlohmann::ordered_json& report);

std::optional<methods::Method> parse_method(const std::string& name);

}  // namespace equistab::app
