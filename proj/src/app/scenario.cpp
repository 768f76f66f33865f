#include "subrep/scenario.hpp"

#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

namespace subrep {

using io::json;

namespace {

[[noreturn]] void bad(const std::string& msg) { throw ValidationError(msg); }

void only_keys(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
  for (auto it = obj.begin(); it != obj.end(); ++it)
    if (!allowed.count(it.key())) bad(where + ": unknown field '" + it.key() + "'");
}

double as_number(const json& j, const std::string& what) {
  if (!j.is_number()) bad(what + " must be a number");
  return j.get<double>();
}

// Real entries are numbers; complex entries are numbers or [re, im] pairs.
Vector parse_vector(const json& j, const AmbientSpace& amb, const std::string& what) {
  if (!j.is_array()) bad(what + " must be an array");
  if (static_cast<int>(j.size()) != amb.dim())
    bad(what + " has " + std::to_string(j.size()) + " entries, expected " + std::to_string(amb.dim()));
  Vector v = Vector::Zero(amb.real_dim());
  for (int i = 0; i < amb.dim(); ++i) {
    const json& e = j[static_cast<std::size_t>(i)];
    const std::string at = what + "[" + std::to_string(i) + "]";
    if (amb.is_complex()) {
      if (e.is_array()) {
        if (e.size() != 2) bad(at + " must be [re, im]");
        v(2 * i) = as_number(e[0], at);
        v(2 * i + 1) = as_number(e[1], at);
      } else {
        v(2 * i) = as_number(e, at);
      }
    } else {
      v(i) = as_number(e, at);
    }
  }
  if (!v.allFinite()) bad(what + " has non-finite entries");
  return v;
}

Subspace parse_subspace(const json& j, const AmbientSpace& amb, double rank_tol, const std::string& what) {
  if (!j.is_array()) bad(what + " must be a list of basis vectors");
  std::vector<Vector> vs;
  for (std::size_t i = 0; i < j.size(); ++i) vs.push_back(parse_vector(j[i], amb, what + "[" + std::to_string(i) + "]"));
  return orthonormalize(std::span<const Vector>(vs), amb, rank_tol);
}

std::vector<Subspace> parse_subspaces(const json& j, const AmbientSpace& amb, double rank_tol, const std::string& what) {
  if (!j.is_array() || j.empty()) bad(what + " must be a non-empty list of subspaces");
  std::vector<Subspace> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(parse_subspace(j[i], amb, rank_tol, what + "[" + std::to_string(i) + "]"));
  return out;
}

AmbientSpace parse_space(const json& j) {
  if (!j.is_object()) bad("space must be an object");
  only_keys(j, {"dim", "field", "p"}, "space");
  if (!j.contains("dim") || !j["dim"].is_number_integer()) bad("space.dim must be an integer");
  const int dim = j["dim"].get<int>();
  Field field = Field::Real;
  if (j.contains("field")) {
    const json& f = j["field"];
    if (f == "real")
      field = Field::Real;
    else if (f == "complex")
      field = Field::Complex;
    else
      bad("space.field must be \"real\" or \"complex\"");
  }
  NormKind p = NormKind::L2;
  if (j.contains("p")) {
    const json& pj = j["p"];
    if (pj.is_number_integer() && pj.get<int>() == 1)
      p = NormKind::L1;
    else if (pj.is_number_integer() && pj.get<int>() == 2)
      p = NormKind::L2;
    else if (pj == "inf")
      p = NormKind::Linf;
    else
      bad("space.p must be 1, 2 or \"inf\"");
  }
  return AmbientSpace(dim, field, p);
}

// --- task parameters -------------------------------------------------------

struct Params {
  const json& j;
  const Scenario& sc;

  bool has(const char* k) const { return j.contains(k); }
  double num(const char* k) const {
    if (!has(k)) bad(std::string("task.params.") + k + " is required");
    return as_number(j[k], std::string("task.params.") + k);
  }
  double num(const char* k, double dflt) const { return has(k) ? num(k) : dflt; }
  int integer(const char* k) const {
    if (!has(k) || !j[k].is_number_integer()) bad(std::string("task.params.") + k + " must be an integer");
    return j[k].get<int>();
  }
  int integer(const char* k, int dflt) const { return has(k) ? integer(k) : dflt; }
  bool flag(const char* k, bool dflt) const {
    if (!has(k)) return dflt;
    if (!j[k].is_boolean()) bad(std::string("task.params.") + k + " must be a boolean");
    return j[k].get<bool>();
  }
  Vector vec(const char* k) const {
    if (!has(k)) bad(std::string("task.params.") + k + " is required");
    return parse_vector(j[k], sc.space, std::string("task.params.") + k);
  }
  std::vector<int> ints(const char* k) const {
    if (!has(k) || !j[k].is_array()) bad(std::string("task.params.") + k + " must be a list of integers");
    std::vector<int> out;
    for (const auto& e : j[k]) {
      if (!e.is_number_integer()) bad(std::string("task.params.") + k + " must be a list of integers");
      out.push_back(e.get<int>());
    }
    return out;
  }
  std::string text(const char* k, const std::string& dflt) const {
    if (!has(k)) return dflt;
    if (!j[k].is_string()) bad(std::string("task.params.") + k + " must be a string");
    return j[k].get<std::string>();
  }
};

struct Task {
  std::set<std::string> params;
  std::function<json(const Scenario&, const Params&, RunOutcome&)> run;
};

SearchOptions search_options(const Scenario& sc) {
  SearchOptions so;
  so.seed = sc.seed;
  return so;
}

ThetaOptions theta_options(const Scenario& sc) {
  ThetaOptions o;
  o.search.seed = sc.seed;
  return o;
}

SubspaceSystem perturbed_system(const Scenario& sc, const Params& p) {
  if (!p.has("perturbed")) bad("task.params.perturbed is required");
  return SubspaceSystem(sc.space, parse_subspaces(p.j["perturbed"], sc.space, sc.tol.rank, "task.params.perturbed"),
                        sc.cyclic);
}

std::string system_id(const Scenario& sc, const Params& p) {
  return p.text("id", io::hash_tag(sc.canonical.dump()).substr(8, 8));
}

const std::map<std::string, Task>& tasks() {
  static const std::map<std::string, Task> table = {
      {"greedy",
       {{"x", "max_terms", "stop_tol"},
        [](const Scenario& sc, const Params& p, RunOutcome&) {
          return io::to_json(greedy_decompose(sc.system(), p.vec("x"), p.integer("max_terms", 100),
                                              p.num("stop_tol", sc.tol.solver)));
        }}},
      {"alternating",
       {{"x", "steps"},
        [](const Scenario& sc, const Params& p, RunOutcome&) {
          return io::to_json(alternating_decompose(sc.system(), p.vec("x"), p.integer("steps", 20)));
        }}},
      {"halperin",
       {{"x", "map", "steps"},
        [](const Scenario& sc, const Params& p, RunOutcome&) {
          const SubspaceSystem H = halperin_system(sc.subspaces, p.ints("map"));
          return io::to_json(alternating_decompose(H, p.vec("x"), p.integer("steps", 20)));
        }}},
      {"replication",
       {{"x", "generators", "stages", "closeness", "n_cap", "r_cap"},
        [](const Scenario& sc, const Params& p, RunOutcome&) {
          ReplicationSchedule rs;
          if (p.has("generators")) {
            for (int k : p.ints("generators")) {
              if (k < 1 || k > static_cast<int>(sc.subspaces.size())) bad("generator index out of range");
              rs.generators.push_back(sc.subspaces[static_cast<std::size_t>(k - 1)]);
            }
          } else {
            rs.generators = sc.subspaces;
          }
          rs.stages = p.integer("stages", rs.stages);
          rs.closeness = p.num("closeness", rs.closeness);
          rs.n_cap = p.integer("n_cap", rs.n_cap);
          rs.r_cap = p.integer("r_cap", rs.r_cap);
          const SubspaceSystem S = sc.system();
          const ReplicationResult r = replication_decompose(S, p.vec("x"), rs);
          json j = io::to_json(r);
          j["verification"] = io::to_json(verify_representation(S, r.decomposition));
          return j;
        }}},
      {"psr_margin",
       {{}, [](const Scenario& sc, const Params&, RunOutcome&) { return io::to_json(psr_margin(sc.system(), search_options(sc))); }}},
      {"apss_margin",
       {{}, [](const Scenario& sc, const Params&, RunOutcome&) { return io::to_json(apss_margin(sc.system(), search_options(sc))); }}},
      {"lambda_S",
       {{}, [](const Scenario& sc, const Params&, RunOutcome&) { return io::to_json(lambda_S(sc.system(), search_options(sc))); }}},
      {"schauder_block_margin",
       {{},
        [](const Scenario& sc, const Params&, RunOutcome&) {
          return io::to_json(schauder_block_margin(sc.system(), search_options(sc)));
        }}},
      {"finite_codim_margin",
       {{"Y"},
        [](const Scenario& sc, const Params& p, RunOutcome&) {
          if (!p.has("Y")) bad("task.params.Y is required");
          const Subspace Y = parse_subspace(p.j["Y"], sc.space, sc.tol.rank, "task.params.Y");
          return io::to_json(finite_codim_margin(sc.system(), Y, search_options(sc)));
        }}},
      {"check_net",
       {{"tau", "lambda"},
        [](const Scenario& sc, const Params& p, RunOutcome&) {
          return io::to_json(check_net(sc.system(), p.num("tau"), p.num("lambda"), search_options(sc)));
        }}},
      {"delta_membership",
       {{"x", "tol"},
        [](const Scenario& sc, const Params& p, RunOutcome&) {
          return io::to_json(delta_membership(sc.system(), p.vec("x"), p.num("tol", sc.tol.solver)));
        }}},
      {"gap",
       {{"i", "j"},
        [](const Scenario& sc, const Params& p, RunOutcome&) {
          const SubspaceSystem S = sc.system();
          const int i = p.integer("i"), j = p.integer("j");
          if (i < 1 || j < 1 || i > S.size() || j > S.size()) bad("gap indices out of range");
          return json{{"gap_rho0", io::number(gap_rho0(S.at(i), S.at(j)))},
                      {"gap_rho0_reverse", io::number(gap_rho0(S.at(j), S.at(i)))}};
        }}},
      {"theta_tuple",
       {{"P"},
        [](const Scenario& sc, const Params& p, RunOutcome&) {
          if (!p.has("P") || !p.j["P"].is_array()) bad("task.params.P must be a list of vectors");
          std::vector<Vector> P;
          for (std::size_t i = 0; i < p.j["P"].size(); ++i)
            P.push_back(parse_vector(p.j["P"][i], sc.space, "task.params.P[" + std::to_string(i) + "]"));
          const TupleTheta t = theta_tuple(sc.system(), P);
          return json{{"value", io::number(t.value)}, {"sum", io::to_json(t.sum)}};
        }}},
      {"theta_x_eps",
       {{"x", "eps", "n"},
        [](const Scenario& sc, const Params& p, RunOutcome&) {
          const ThetaOptions o = theta_options(sc);
          const SubspaceSystem S = sc.system();
          return io::to_json(theta_x_eps(S, p.vec("x"), p.num("eps"), p.integer("n", theta_horizon(S, o)), o));
        }}},
      {"theta_star",
       {{"x"},
        [](const Scenario& sc, const Params& p, RunOutcome&) {
          return io::to_json(theta_star(sc.system(), p.vec("x"), theta_options(sc)));
        }}},
      {"theta_bar",
       {{}, [](const Scenario& sc, const Params&, RunOutcome&) { return io::to_json(theta_bar(sc.system(), theta_options(sc))); }}},
      {"theta_report",
       {{"x", "eps", "n", "with_bar"},
        [](const Scenario& sc, const Params& p, RunOutcome&) {
          const ThetaOptions o = theta_options(sc);
          const SubspaceSystem S = sc.system();
          return io::to_json(theta_report(S, p.vec("x"), p.num("eps"), p.integer("n", theta_horizon(S, o)),
                                          p.flag("with_bar", false), o));
        }}},
      {"psr_equivalence",
       {{"samples"},
        [](const Scenario& sc, const Params& p, RunOutcome&) {
          return io::to_json(psr_equivalence_report(sc.system(), p.integer("samples", 100), sc.seed, theta_options(sc)));
        }}},
      {"psr_stability",
       {{"perturbed", "id", "certificate_samples"},
        [](const Scenario& sc, const Params& p, RunOutcome& out) {
          const PsrStability r = psr_stability_check(sc.system(), perturbed_system(sc, p), theta_options(sc),
                                                     p.integer("certificate_samples", 20));
          if (!r.within_budget) out.exit_code = kExitOutsideBudget;
          out.csv = "id,sum_gap,theta_bar,budget,perturbed_margin\n" + system_id(sc, p) + "," + io::fmt(r.sum_gap) +
                    "," + io::fmt(r.theta_bar) + "," + io::fmt(r.budget) + "," + io::fmt(r.perturbed_margin) + "\n";
          return io::to_json(r);
        }}},
      {"apss_stability",
       {{"perturbed", "id"},
        [](const Scenario& sc, const Params& p, RunOutcome& out) {
          const ApssStability r = apss_stability_check(sc.system(), perturbed_system(sc, p), search_options(sc));
          if (!r.within_budget) out.exit_code = kExitOutsideBudget;
          out.csv = "id,eps,d,bound,measured\n" + r.csv_row(system_id(sc, p)) + "\n";
          return io::to_json(r);
        }}},
      {"c_constant",
       {{"n", "complex_phases", "starts", "phases"},
        [](const Scenario& sc, const Params& p, RunOutcome&) {
          CConvOptions o;
          o.seed = sc.seed;
          o.starts = p.integer("starts", o.starts);
          o.phases = p.integer("phases", o.phases);
          const int n = p.integer("n");
          return io::to_json(p.flag("complex_phases", false) ? c_constant_complex(sc.space, n, o)
                                                             : c_constant(sc.space, n, o));
        }}},
      {"removal",
       {{"families", "m"},
        [](const Scenario& sc, const Params& p, RunOutcome& out) {
          if (!p.has("families") || !p.j["families"].is_array()) bad("task.params.families must be a list of index lists");
          std::vector<std::vector<int>> fams;
          for (const auto& f : p.j["families"]) {
            if (!f.is_array()) bad("task.params.families must be a list of index lists");
            std::vector<int> I;
            for (const auto& e : f) {
              if (!e.is_number_integer()) bad("family entries must be integers");
              I.push_back(e.get<int>());
            }
            fams.push_back(I);
          }
          const RemovalReport r = removal_experiment(sc.system(), fams, p.integer("m"), search_options(sc));
          if (!r.lemma_holds) out.exit_code = kExitOutsideBudget;
          return io::to_json(r);
        }}},
  };
  return table;
}

json error_json(const std::string& kind, const std::string& message) {
  return {{"kind", kind}, {"message", message}};
}

json bare_report(const std::string& status, json error) {
  return {{"schema_version", io::kSchemaVersion}, {"status", status}, {"error", std::move(error)}};
}

}  // namespace

std::vector<std::string> task_names() {
  std::vector<std::string> out;
  for (const auto& [name, t] : tasks()) out.push_back(name);
  return out;
}

Scenario parse_scenario(const json& doc, const ScenarioOverrides& over) {
  if (!doc.is_object()) bad("scenario must be a JSON object");
  only_keys(doc, {"space", "subspaces", "cyclic", "task", "seed", "tolerances", "id", "description"}, "scenario");
  Scenario sc;
  if (!doc.contains("space")) bad("scenario.space is required");
  sc.space = parse_space(doc["space"]);

  if (doc.contains("tolerances")) {
    const json& t = doc["tolerances"];
    if (!t.is_object()) bad("tolerances must be an object");
    only_keys(t, {"rank", "solver"}, "tolerances");
    if (t.contains("rank")) sc.tol.rank = as_number(t["rank"], "tolerances.rank");
    if (t.contains("solver")) sc.tol.solver = as_number(t["solver"], "tolerances.solver");
  }
  if (over.tol) sc.tol.solver = *over.tol;
  if (!(sc.tol.rank > 0) || !(sc.tol.solver > 0)) bad("tolerances must be positive");

  if (!doc.contains("subspaces")) bad("scenario.subspaces is required");
  sc.subspaces = parse_subspaces(doc["subspaces"], sc.space, sc.tol.rank, "subspaces");

  if (doc.contains("cyclic")) {
    if (!doc["cyclic"].is_boolean()) bad("cyclic must be a boolean");
    sc.cyclic = doc["cyclic"].get<bool>();
  }
  if (doc.contains("seed")) {
    const json& s = doc["seed"];
    if (!s.is_number_unsigned()) bad("seed must be a non-negative integer");
    sc.seed = s.get<std::uint64_t>();
  }
  if (over.seed) sc.seed = *over.seed;

  if (!doc.contains("task") || !doc["task"].is_object()) bad("scenario.task must be an object");
  const json& task = doc["task"];
  only_keys(task, {"name", "params"}, "task");
  if (!task.contains("name") || !task["name"].is_string()) bad("task.name must be a string");
  sc.task = task["name"].get<std::string>();
  const auto it = tasks().find(sc.task);
  if (it == tasks().end()) bad("unknown task '" + sc.task + "'");
  if (task.contains("params")) {
    if (!task["params"].is_object()) bad("task.params must be an object");
    sc.params = task["params"];
  }
  only_keys(sc.params, it->second.params, "task.params");

  json space = {{"dim", sc.space.dim()}, {"field", to_string(sc.space.field())}};
  space["p"] = sc.space.p() == NormKind::Linf ? json("inf") : json(sc.space.p() == NormKind::L1 ? 1 : 2);
  sc.canonical = {{"space", space},
                  {"subspaces", doc["subspaces"]},
                  {"cyclic", sc.cyclic},
                  {"task", {{"name", sc.task}, {"params", sc.params}}},
                  {"seed", sc.seed},
                  {"tolerances", {{"rank", sc.tol.rank}, {"solver", sc.tol.solver}}}};
  return sc;
}

Scenario load_scenario(const std::filesystem::path& file, const ScenarioOverrides& over) {
  std::ifstream in(file);
  if (!in) bad("cannot read scenario file " + file.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    bad(std::string("malformed JSON: ") + e.what());
  }
  return parse_scenario(doc, over);
}

json scenario_schema() {
  json vec = {{"type", "array"},
              {"items", {{"oneOf", json::array({{{"type", "number"}},
                                                {{"type", "array"}, {"items", {{"type", "number"}}}, {"minItems", 2}, {"maxItems", 2}}})}}}};
  json names = json::array();
  for (const auto& n : task_names()) names.push_back(n);
  return {{"$schema", "https://json-schema.org/draft/2020-12/schema"},
          {"title", "subrep scenario"},
          {"schema_version", io::kSchemaVersion},
          {"type", "object"},
          {"required", {"space", "subspaces", "task"}},
          {"additionalProperties", false},
          {"properties",
           {{"space",
             {{"type", "object"},
              {"required", {"dim"}},
              {"additionalProperties", false},
              {"properties",
               {{"dim", {{"type", "integer"}, {"minimum", 1}}},
                {"field", {{"enum", {"real", "complex"}}}},
                {"p", {{"enum", json::array({1, 2, "inf"})}}}}}}},
            {"subspaces", {{"type", "array"}, {"minItems", 1}, {"items", {{"type", "array"}, {"items", vec}}}}},
            {"cyclic", {{"type", "boolean"}}},
            {"task",
             {{"type", "object"},
              {"required", {"name"}},
              {"additionalProperties", false},
              {"properties", {{"name", {{"enum", names}}}, {"params", {{"type", "object"}}}}}}},
            {"seed", {{"type", "integer"}, {"minimum", 0}}},
            {"tolerances",
             {{"type", "object"},
              {"additionalProperties", false},
              {"properties", {{"rank", {{"type", "number"}}}, {"solver", {{"type", "number"}}}}}}},
            {"id", {{"type", "string"}}},
            {"description", {{"type", "string"}}}}}};
}

RunOutcome run_scenario(const Scenario& sc) {
  RunOutcome out;
  json report = {{"schema_version", io::kSchemaVersion},
                 {"scenario_hash", io::hash_tag(sc.canonical.dump())},
                 {"task", sc.task},
                 {"seed", sc.seed}};
  const Task& task = tasks().at(sc.task);
  const Params params{sc.params, sc};
  try {
    report["result"] = task.run(sc, params, out);
    report["status"] = out.exit_code == kExitOutsideBudget ? "outside_budget" : "ok";
  } catch (const StagnationError& e) {
    out.exit_code = kExitNumeric;
    json err = error_json("stagnation", e.what());
    err["partial"] = io::to_json(e.partial());
    report["status"] = "numeric_error";
    report["error"] = err;
  } catch (const BudgetError& e) {
    out.exit_code = kExitNumeric;
    report["status"] = "budget_exceeded";
    report["error"] = error_json("budget", e.what());
  } catch (const NumericError& e) {
    out.exit_code = kExitNumeric;
    report["status"] = "numeric_error";
    report["error"] = error_json("numeric", e.what());
  } catch (const ValidationError& e) {
    out.exit_code = kExitValidation;
    report["status"] = "validation_error";
    report["error"] = error_json("validation", e.what());
  }
  out.report = std::move(report);
  return out;
}

RunOutcome run_scenario_file(const std::filesystem::path& file, const ScenarioOverrides& over) {
  try {
    return run_scenario(load_scenario(file, over));
  } catch (const ValidationError& e) {
    RunOutcome out;
    out.exit_code = kExitValidation;
    out.report = bare_report("validation_error", error_json("validation", e.what()));
    return out;
  }
}

std::string report_text(const json& report) { return report.dump(2) + "\n"; }

}  // namespace subrep
