#include "equistab/report.hpp"

#include <algorithm>
#include <sstream>

#include "equistab/registry.hpp"

namespace equistab::app {

using methods::Method;
using methods::MethodVerdict;
using methods::StabilityCertificate;
using nlohmann::ordered_json;

namespace {

ordered_json header(const char* kind) {
  ordered_json j;
  j["schema"] = kReportSchemaId;
  j["kind"] = kind;
  return j;
}

ordered_json subspace_to_json(const numkit::SubspaceBasis& b) {
  ordered_json j;
  j["ambient_dim"] = b.ambient_dim;
  j["dimension"] = b.size();
  j["basis"] = b.basis;
  return j;
}

bool is_full_harness(const std::vector<Method>& ms) {
  auto has = [&](Method m) { return std::find(ms.begin(), ms.end(), m) != ms.end(); };
  return has(Method::Arnold) && has(Method::EnergyCasimir) && has(Method::OrtegaRatiu);
}

}  // namespace

std::optional<Method> parse_method(const std::string& name) {
  if (name == "arnold") return Method::Arnold;
  if (name == "ec" || name == "energy_casimir" || name == "energy-casimir") return Method::EnergyCasimir;
  if (name == "or" || name == "ortega_ratiu" || name == "ortega-ratiu") return Method::OrtegaRatiu;
  return std::nullopt;
}

ordered_json verdict_to_json(const MethodVerdict& v) {
  ordered_json j;
  j["method"] = methods::to_string(v.method);
  j["outcome"] = methods::to_string(v.outcome);
  j["sign"] = v.sign == 0 ? ordered_json(nullptr) : ordered_json(v.sign);
  j["failure_stage"] = methods::to_string(v.failure_stage);

  const auto& m = v.evidence.multipliers;
  j["multipliers"] = {{"lambdas", m.lambdas},
                      {"residual_norm", m.residual_norm},
                      {"threshold", m.threshold},
                      {"rank", m.rank},
                      {"unique", m.unique}};
  if (v.method != Method::Arnold && v.failure_stage != methods::FailureStage::ConditionI) {
    const auto profile = methods::CurvatureProfile::from_multipliers(m, v.evidence.alpha.value_or(0.0));
    j["curvature_profile"] = {{"slopes", profile.slopes}, {"alpha", profile.alpha}};
  }
  j["subspace"] = v.failure_stage == methods::FailureStage::ConditionI ? ordered_json(nullptr)
                                                                       : subspace_to_json(v.evidence.subspace);
  j["eigenvalues"] = v.evidence.eigenvalues;
  j["alpha"] = v.evidence.alpha ? ordered_json(*v.evidence.alpha) : ordered_json(nullptr);
  j["margin"] = v.evidence.margin;
  return j;
}

ordered_json certificate_to_json(const StabilityCertificate& c, const std::vector<std::string>& names) {
  ordered_json j;
  j["pivot"] = c.pivot;
  j["pivot_constant"] = names.at(c.pivot - 1);
  j["status"] = methods::to_string(c.status);
  j["agreement"] = c.agreement;
  j["margin"] = c.margin;
  j["verdicts"] = ordered_json::array();
  for (const auto& v : c.verdicts) j["verdicts"].push_back(verdict_to_json(v));
  if (!c.lyapunov_note.empty()) j["lyapunov_note"] = c.lyapunov_note;
  return j;
}

ordered_json probe_to_json(const dynamics::ProbeReport& r, const std::vector<std::string>& names) {
  ordered_json j;
  j["sample_count"] = r.sample_count;
  j["delta"] = r.delta;
  j["epsilon"] = r.epsilon;
  j["max_deviation"] = r.max_deviation;
  j["escapes"] = r.escapes;
  j["diverged"] = r.diverged;
  j["max_conservation_drift"] = ordered_json::array();
  for (std::size_t i = 0; i < r.max_conservation_drift.size(); ++i) {
    j["max_conservation_drift"].push_back(
        {{"constant", i < names.size() ? names[i] : "C" + std::to_string(i + 1)}, {"drift", r.max_conservation_drift[i]}});
  }
  j["seed"] = r.seed;
  j["rng_algorithm"] = r.rng_algorithm;
  j["integrator"] = {{"method", "rk4"}, {"step", r.integrator.step}, {"horizon", r.integrator.horizon}};
  return j;
}

CommandResult analyze(const SystemDefinition& system, const AnalyzeOptions& options) {
  const auto& eq = system.equilibrium(options.equilibrium);
  if (system.constants.empty()) throw ValidationError("system '" + system.name + "' declares no constants of motion");
  if (options.methods.empty()) throw ValidationError("no methods selected");
  if (options.multiplier_override && !options.pivot) {
    throw ValidationError("a multiplier override needs an explicit pivot");
  }

  const methods::AnalysisProblem base(system.vector_field, system.constant_fields(), options.pivot.value_or(1),
                                      fields::EquilibriumPoint(system.vector_field, eq.coords));
  const auto names = system.constant_names();
  const bool full = is_full_harness(options.methods);
  methods::CheckOptions check_opts;
  check_opts.multiplier_override = options.multiplier_override;

  ordered_json rep = header("analysis");
  rep["system"] = system.name;
  rep["equilibrium"] = {{"name", eq.name}, {"coords", eq.coords}, {"residual", base.equilibrium().residual()}};
  rep["constants"] = names;
  rep["methods"] = ordered_json::array();
  for (Method m : options.methods) rep["methods"].push_back(methods::to_string(m));

  const auto indep = methods::gradient_independence_report(base);
  rep["gradient_independence"] = {
      {"rank", indep.rank}, {"k", indep.k}, {"independent", indep.independent}, {"note", indep.note}};

  bool any_stable = false;
  bool any_inconsistent = false;
  ordered_json certificate_pivot = nullptr;
  rep["pivots"] = ordered_json::array();

  if (full) {
    std::vector<StabilityCertificate> certs;
    if (options.pivot) {
      certs.push_back(methods::equivalence_harness(base, check_opts));
    } else {
      certs = methods::analyze_all_pivots(base);
    }
    for (const auto& c : certs) {
      rep["pivots"].push_back(certificate_to_json(c, names));
      any_inconsistent = any_inconsistent || c.status == methods::CertificateStatus::Inconsistent;
      if (c.status == methods::CertificateStatus::Stable && certificate_pivot.is_null()) certificate_pivot = c.pivot;
      any_stable = any_stable || c.status == methods::CertificateStatus::Stable;
    }
  } else {
    std::vector<std::size_t> pivots;
    if (options.pivot) {
      pivots.push_back(*options.pivot);
    } else {
      for (std::size_t p = 1; p <= base.k(); ++p) pivots.push_back(p);
    }
    for (std::size_t p : pivots) {
      const auto problem = base.with_pivot(p);
      ordered_json pj;
      pj["pivot"] = p;
      pj["pivot_constant"] = names.at(p - 1);
      pj["verdicts"] = ordered_json::array();
      bool pivot_stable = false;
      for (Method m : options.methods) {
        const auto v = methods::run_check(m, problem, check_opts);
        pivot_stable = pivot_stable || v.stable();
        pj["verdicts"].push_back(verdict_to_json(v));
      }
      pj["status"] = pivot_stable ? "stable" : "indecisive";
      if (pivot_stable && certificate_pivot.is_null()) certificate_pivot = p;
      any_stable = any_stable || pivot_stable;
      rep["pivots"].push_back(std::move(pj));
    }
  }
  rep["certificate_pivot"] = certificate_pivot;

  if (options.run_probe) {
    const auto pr = dynamics::stability_probe(system.vector_field, eq.coords, options.probe, system.constant_fields());
    rep["probe"] = probe_to_json(pr, names);
  }

  CommandResult out;
  if (any_inconsistent) {
    rep["overall"] = "inconsistent";
    out.exit_code = kExitInconsistent;
  } else if (any_stable) {
    rep["overall"] = "stable";
    out.exit_code = kExitStable;
  } else {
    rep["overall"] = "indecisive";
    out.exit_code = kExitIndecisive;
  }
  rep["exit_code"] = out.exit_code;
  out.report = std::move(rep);
  return out;
}

CommandResult probe(const SystemDefinition& system, const std::string& equilibrium,
                    const dynamics::ProbeSettings& settings) {
  const auto& eq = system.equilibrium(equilibrium);
  const fields::EquilibriumPoint x_e(system.vector_field, eq.coords);
  const auto pr = dynamics::stability_probe(system.vector_field, x_e.coords(), settings, system.constant_fields());

  CommandResult out;
  out.exit_code = 0;
  out.report = header("probe");
  out.report["system"] = system.name;
  out.report["equilibrium"] = {{"name", eq.name}, {"coords", eq.coords}, {"residual", x_e.residual()}};
  out.report["probe"] = probe_to_json(pr, system.constant_names());
  return out;
}

CommandResult validate(const SystemDefinition& system) {
  const auto v = validate_system(system);
  ordered_json rep = header("validation");
  rep["system"] = system.name;
  rep["dim"] = system.dim;
  rep["passed"] = v.passed();
  rep["constants"] = ordered_json::array();
  for (const auto& e : v.conservation.entries) {
    ordered_json c;
    c["name"] = system.constants[e.index].name;
    c["conserved"] = e.conserved;
    c["max_abs_coefficient"] = e.max_abs_coefficient;
    c["offending_terms"] = ordered_json::array();
    for (const auto& t : e.offending) {
      c["offending_terms"].push_back({{"c", t.coeff}, {"e", t.powers}, {"monomial", fields::monomial_to_string(t.powers)}});
    }
    rep["constants"].push_back(std::move(c));
  }
  rep["equilibria"] = ordered_json::array();
  for (const auto& e : v.equilibria) {
    rep["equilibria"].push_back({{"name", e.name}, {"residual", e.residual}, {"bound", e.bound}, {"ok", e.ok}});
  }
  if (!v.passed()) rep["failure"] = v.describe_failure(system);

  CommandResult out;
  out.exit_code = v.passed() ? 0 : kExitError;
  out.report = std::move(rep);
  return out;
}

CommandResult list_systems() {
  ordered_json rep = header("system_list");
  rep["systems"] = ordered_json::array();
  for (const auto& name : builtin_system_names()) {
    const auto def = *find_builtin(name);
    ordered_json s;
    s["name"] = def.name;
    s["dim"] = def.dim;
    s["parameters"] = ordered_json::object();
    for (const auto& [k, v] : def.parameters) s["parameters"][k] = v;
    s["constants"] = def.constant_names();
    s["equilibria"] = ordered_json::array();
    for (const auto& e : def.equilibria) s["equilibria"].push_back(e.name);
    rep["systems"].push_back(std::move(s));
  }
  CommandResult out;
  out.exit_code = 0;
  out.report = std::move(rep);
  return out;
}

// ---------------------------------------------------------------------------
// Text rendering

namespace {

std::string vec_str(const ordered_json& arr) {
  std::ostringstream os;
  os.precision(10);
  os << "(";
  for (std::size_t i = 0; i < arr.size(); ++i) {
    if (i) os << ", ";
    if (arr[i].is_number()) {
      os << arr[i].get<double>();
    } else {
      os << arr[i].dump();
    }
  }
  os << ")";
  return os.str();
}

void render_probe(std::ostringstream& os, const ordered_json& p) {
  os << "  probe: " << p["sample_count"].get<std::size_t>() << " samples, delta=" << p["delta"].get<double>()
     << ", epsilon=" << p["epsilon"].get<double>() << ", T=" << p["integrator"]["horizon"].get<double>()
     << ", step=" << p["integrator"]["step"].get<double>() << ", seed=" << p["seed"].get<std::uint64_t>() << "\n";
  os << "    escapes: " << p["escapes"].get<std::size_t>() << " (diverged " << p["diverged"].get<std::size_t>()
     << "), max deviation " << p["max_deviation"].get<double>() << "\n";
  for (const auto& d : p["max_conservation_drift"]) {
    os << "    drift " << d["constant"].get<std::string>() << ": " << d["drift"].get<double>() << "\n";
  }
}

}  // namespace

std::string render_text(const ordered_json& r) {
  std::ostringstream os;
  os.precision(10);
  const std::string kind = r.value("kind", "");

  if (kind == "analysis") {
    os << "system " << r["system"].get<std::string>() << " at " << r["equilibrium"]["name"].get<std::string>() << " "
       << vec_str(r["equilibrium"]["coords"]) << "\n";
    os << "  " << r["gradient_independence"]["note"].get<std::string>() << "\n";
    for (const auto& p : r["pivots"]) {
      os << "  pivot " << p["pivot"].get<std::size_t>() << " (" << p["pivot_constant"].get<std::string>()
         << "): " << p["status"].get<std::string>();
      if (p.contains("agreement")) {
        os << ", agreement " << (p["agreement"].get<bool>() ? "yes" : "NO") << ", margin " << p["margin"].get<double>();
      }
      os << "\n";
      for (const auto& v : p["verdicts"]) {
        os << "    " << v["method"].get<std::string>() << ": " << v["outcome"].get<std::string>();
        if (!v["sign"].is_null()) os << " (sign " << v["sign"].get<int>() << ")";
        if (v["failure_stage"] != "none") os << " [" << v["failure_stage"].get<std::string>() << " fails]";
        os << "\n      lambda " << vec_str(v["multipliers"]["lambdas"]) << ", residual "
           << v["multipliers"]["residual_norm"].get<double>();
        if (!v["subspace"].is_null()) os << ", subspace dim " << v["subspace"]["dimension"].get<std::size_t>();
        if (!v["alpha"].is_null()) os << ", alpha " << v["alpha"].get<double>();
        os << "\n";
        if (!v["eigenvalues"].empty()) os << "      eigenvalues " << vec_str(v["eigenvalues"]) << "\n";
      }
      if (p.contains("lyapunov_note")) os << "    " << p["lyapunov_note"].get<std::string>() << "\n";
    }
    if (r.contains("probe")) render_probe(os, r["probe"]);
    os << "overall: " << r["overall"].get<std::string>() << "\n";
  } else if (kind == "probe") {
    os << "system " << r["system"].get<std::string>() << " at " << r["equilibrium"]["name"].get<std::string>() << " "
       << vec_str(r["equilibrium"]["coords"]) << "\n";
    render_probe(os, r["probe"]);
  } else if (kind == "validation") {
    os << "system " << r["system"].get<std::string>() << ": " << (r["passed"].get<bool>() ? "PASS" : "FAIL") << "\n";
    for (const auto& c : r["constants"]) {
      os << "  constant " << c["name"].get<std::string>() << ": " << (c["conserved"].get<bool>() ? "conserved" : "NOT conserved");
      for (const auto& t : c["offending_terms"]) os << " " << t["c"].get<double>() << "*" << t["monomial"].get<std::string>();
      os << "\n";
    }
    for (const auto& e : r["equilibria"]) {
      os << "  equilibrium " << e["name"].get<std::string>() << ": residual " << e["residual"].get<double>()
         << (e["ok"].get<bool>() ? "" : " (too large)") << "\n";
    }
  } else if (kind == "system_list") {
    for (const auto& s : r["systems"]) {
      os << s["name"].get<std::string>() << " (dim " << s["dim"].get<std::size_t>() << "), equilibria:";
      for (const auto& e : s["equilibria"]) os << " " << e.get<std::string>();
      os << "\n";
    }
  } else {
    os << r.dump(2) << "\n";
  }
  return os.str();
}

}  // namespace equistab::app
