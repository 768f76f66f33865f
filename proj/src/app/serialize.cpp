#include "subrep/serialize.hpp"

#include <cmath>
#include <cstdio>

namespace subrep::io {

json number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

json to_json(const Vector& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(number(v(i)));
  return a;
}

json to_json(const std::vector<double>& v) {
  json a = json::array();
  for (double x : v) a.push_back(number(x));
  return a;
}

json to_json(const Decomposition& d) {
  json terms = json::array();
  for (const auto& t : d.terms) terms.push_back({{"index", t.index}, {"component", to_json(t.component)}});
  return {{"terms", terms},
          {"residuals", to_json(d.residual_trace)},
          {"target", to_json(d.target)},
          {"max_ratio", number(d.max_ratio)}};
}

json to_json(const ReplicationResult& r) {
  json devs = json::array();
  for (const auto& dv : r.deviations)
    devs.push_back({{"prefix", dv.prefix}, {"stage", dv.stage}, {"delta", number(dv.delta)}, {"bound", number(dv.bound)}});
  json sizes = json::array();
  for (const auto& [n, rr] : r.stage_sizes) sizes.push_back({{"pieces", n}, {"replication", rr}});
  return {{"decomposition", to_json(r.decomposition)}, {"deviations", devs}, {"stages", sizes}, {"scale", number(r.scale)}};
}

json to_json(const RepresentationReport& r) {
  return {{"final_residual", number(r.final_residual)},
          {"sup_partial_sum", number(r.sup_partial_sum)},
          {"absolute_sum", number(r.absolute_sum)},
          {"membership", to_json(r.membership)},
          {"max_membership", number(r.max_membership)},
          {"members_ok", r.members_ok},
          {"trace_ok", r.trace_ok}};
}

json to_json(const MarginReport& r) {
  json j = {{"value", number(r.value)},
            {"witness", to_json(r.witness)},
            {"method", to_string(r.method)},
            {"certified_dim", r.certified_dim},
            {"defined", r.defined},
            {"spanning", r.spanning},
            {"dense_value", number(r.dense_value)},
            {"multistart_value", number(r.multistart_value)}};
  if (!r.witness_blocks.empty()) j["witness_blocks"] = r.witness_blocks;
  return j;
}

json to_json(const NetCheck& r) {
  return {{"covering_radius", number(r.covering_radius)},
          {"apss", number(r.apss)},
          {"predicted_radius", number(r.predicted_radius)},
          {"is_net", r.is_net},
          {"predicted_net", r.predicted_net}};
}

json to_json(const DeltaMembership& r) {
  return {{"member", r.member}, {"min_distance", number(r.min_distance)}, {"argmin", r.argmin}, {"profile", to_json(r.profile)}};
}

namespace {
json trace_json(const SolverTrace& t) {
  return {{"solver", t.solver}, {"status", t.status}, {"iterations", t.iterations}};
}
json opt(const std::optional<double>& v) { return v ? number(*v) : json(nullptr); }
}  // namespace

json to_json(const ThetaSolve& r) {
  json tuple = json::array();
  for (const auto& x : r.tuple) tuple.push_back(to_json(x));
  return {{"value", number(r.value)}, {"feasible", r.feasible}, {"tuple", tuple}, {"solver_trace", trace_json(r.trace)}};
}

json to_json(const ThetaStar& r) {
  return {{"value", number(r.value)},
          {"eps", to_json(r.eps)},
          {"values", to_json(r.values)},
          {"monotone", r.monotone},
          {"diagnostic", r.diagnostic}};
}

json to_json(const ThetaBar& r) {
  return {{"value", number(r.value)},
          {"witness", to_json(r.witness)},
          {"method", to_string(r.method)},
          {"certified_dim", r.certified_dim},
          {"dense_value", number(r.dense_value)},
          {"multistart_value", number(r.multistart_value)},
          {"spanning", r.spanning},
          {"lower_estimate", true}};
}

json to_json(const ThetaReport& r) {
  json tr = json::array();
  for (const auto& t : r.solver_trace) tr.push_back(trace_json(t));
  return {{"theta_tuple_value", opt(r.theta_tuple_value)},
          {"theta_x_eps_value", opt(r.theta_x_eps_value)},
          {"theta_star_value", opt(r.theta_star_value)},
          {"theta_bar_value", opt(r.theta_bar_value)},
          {"tuple_length", r.tuple_length},
          {"solver_trace", tr}};
}

json to_json(const PsrEquivalence& r) {
  return {{"spanning", r.spanning},
          {"alpha", number(r.alpha)},
          {"B", number(r.B)},
          {"bounded", r.bounded},
          {"star_finite", r.star_finite},
          {"theta_bar", number(r.theta_bar)},
          {"bar_finite", r.bar_finite},
          {"samples", r.samples},
          {"lemma_violations", r.lemma_violations},
          {"lemma_min_slack", number(r.lemma_min_slack)},
          {"consistent", r.consistent}};
}

json to_json(const PsrStability& r) {
  return {{"sum_gap", number(r.sum_gap)},
          {"theta_bar", number(r.theta_bar)},
          {"budget", number(r.budget)},
          {"within_budget", r.within_budget},
          {"perturbed_spans", r.perturbed_spans},
          {"perturbed_margin", number(r.perturbed_margin)},
          {"holds", r.holds},
          {"alpha", number(r.alpha)},
          {"B", number(r.B)},
          {"certificate_samples", r.certificate_samples},
          {"certificate_failures", r.certificate_failures}};
}

json to_json(const ApssStability& r) {
  return {{"eps", number(r.eps)},
          {"d", number(r.d)},
          {"bound", number(r.bound)},
          {"measured", number(r.measured)},
          {"within_budget", r.within_budget},
          {"holds", r.holds}};
}

json to_json(const CConstantReport& r) {
  json ws = json::array();
  for (const auto& y : r.witness_vectors) ws.push_back(to_json(y));
  json j = {{"n", r.n},
            {"value", number(r.value)},
            {"witness_vectors", ws},
            {"method", to_string(r.method)},
            {"dense_value", number(r.dense_value)},
            {"multistart_value", number(r.multistart_value)}};
  if (r.complex_phases)
    j["witness_phases"] = to_json(r.witness_phases);
  else
    j["witness_signs"] = r.witness_signs;
  return j;
}

json to_json(const RemovalReport& r) {
  return {{"horizon", r.horizon},
          {"base_margin", number(r.base_margin)},
          {"margins", to_json(r.margins)},
          {"lemma_holds", r.lemma_holds},
          {"tail_margins", to_json(r.tail_margins)},
          {"tail_holds", r.tail_holds},
          {"note", r.note}};
}

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hash_tag(const std::string& bytes) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "fnv1a64:%016llx", static_cast<unsigned long long>(fnv1a64(bytes)));
  return buf;
}

std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

}  // namespace subrep::io
