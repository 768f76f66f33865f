#include "subrep/decompose.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

namespace subrep {

namespace {

// Member k of S with finite systems padded by {0}.
Subspace member(const SubspaceSystem& S, int k) {
  if (S.cyclic() || k <= S.size()) return S.at(k);
  return Subspace::zero(S.ambient());
}

void require_euclidean(const AmbientSpace& amb, const char* what) {
  if (amb.p() != NormKind::L2) throw ValidationError(std::string(what) + " requires the Euclidean norm (p = 2)");
}

}  // namespace

Vector Decomposition::partial_sum(std::size_t count) const {
  Vector s = Vector::Zero(target.size());
  for (std::size_t t = 0; t < std::min(count, terms.size()); ++t) s += terms[t].component;
  return s;
}

Decomposition greedy_decompose(const SubspaceSystem& S, const Vector& x, int max_terms, double stop_tol) {
  const AmbientSpace& amb = S.ambient();
  amb.check_vector(x, "decomposition target");
  if (max_terms < 0) throw ValidationError("max_terms must be nonnegative");
  Decomposition dec;
  dec.target = x;
  const double xn = amb.norm(x);
  if (xn == 0.0) return dec;

  Vector y = x;
  double yn = xn;
  int flat_steps = 0;
  for (int step = 0; step < max_terms && yn > stop_tol * xn; ++step) {
    int best = 1;
    double best_d = distance(y, S.at(1));
    for (int i = 2; i <= S.size(); ++i) {
      const double d = distance(y, S.at(i));
      if (d < best_d - 1e-12 * yn) {
        best = i;
        best_d = d;
      }
    }
    const Subspace& X = S.at(best);
    Vector comp = amb.p() == NormKind::L2 ? project(y, X) : best_approximation(y, X);
    const bool zero_step = amb.norm(comp) == 0.0;
    y -= comp;
    const double next = amb.norm(y);
    const double ratio = next / yn;
    dec.max_ratio = std::max(dec.max_ratio, ratio);
    dec.terms.push_back({best, std::move(comp)});
    dec.residual_trace.push_back(next);
    flat_steps = ratio >= 1.0 - 1e-12 ? flat_steps + 1 : 0;
    // A zero component leaves the residual unchanged forever.
    if (zero_step || flat_steps >= 3) {
      std::ostringstream msg;
      msg << "system not lambda-contracting at x: residual stalled at " << next << " after step " << step + 1;
      throw StagnationError(msg.str(), dec);
    }
    yn = next;
  }
  return dec;
}

Decomposition alternating_decompose(const SubspaceSystem& S, const Vector& x, int n_steps) {
  const AmbientSpace& amb = S.ambient();
  require_euclidean(amb, "alternating projections");
  amb.check_vector(x, "decomposition target");
  if (n_steps < 0) throw ValidationError("n_steps must be nonnegative");
  Decomposition dec;
  dec.target = x;
  Vector e = x;
  const std::vector<Subspace> seq = S.unrolled(n_steps);
  for (int n = 0; n < n_steps; ++n) {
    Vector comp = project(e, seq[static_cast<std::size_t>(n)]);
    e -= comp;
    dec.terms.push_back({n + 1, std::move(comp)});
    dec.residual_trace.push_back(e.norm());
  }
  return dec;
}

SubspaceSystem halperin_system(const std::vector<Subspace>& H, const std::vector<int>& index_map) {
  if (H.empty()) throw ValidationError("halperin_system needs at least one subspace");
  if (index_map.empty()) throw ValidationError("halperin_system needs a nonempty index map");
  const AmbientSpace& amb = H.front().ambient();
  require_euclidean(amb, "halperin_system");
  for (const auto& h : H)
    if (!(h.ambient() == amb)) throw ValidationError("halperin_system subspaces must share the ambient space");
  const int N = static_cast<int>(H.size());
  std::vector<bool> seen(static_cast<std::size_t>(N), false);
  const std::size_t L = index_map.size();
  for (std::size_t k = 0; k < L; ++k) {
    const int i = index_map[k];
    if (i < 1 || i > N) throw ValidationError("index map value " + std::to_string(i) + " outside 1.." + std::to_string(N));
    seen[static_cast<std::size_t>(i - 1)] = true;
    if (index_map[(k + 1) % L] == i)
      throw ValidationError("index map repeats " + std::to_string(i) + " at adjacent positions " +
                            std::to_string(k + 1) + " and " + std::to_string((k + 1) % L + 1));
  }
  for (int m = 0; m < N; ++m)
    if (!seen[static_cast<std::size_t>(m)])
      throw ValidationError("index map never uses " + std::to_string(m + 1));
  std::vector<Subspace> xs;
  xs.reserve(L);
  for (int i : index_map) xs.push_back(orthogonal_complement(H[static_cast<std::size_t>(i - 1)]));
  return SubspaceSystem(amb, std::move(xs), true);
}

ReplicationResult replication_decompose(const SubspaceSystem& S, const Vector& x,
                                        const ReplicationSchedule& schedule) {
  const AmbientSpace& amb = S.ambient();
  require_euclidean(amb, "replication_decompose");
  amb.check_vector(x, "decomposition target");
  if (!S.cyclic()) throw ValidationError("replication_decompose needs a cyclic system");
  const auto& gens = schedule.generators;
  if (gens.empty()) throw ValidationError("replication schedule has no generators");
  if (schedule.stages < 1) throw ValidationError("replication schedule needs at least one stage");
  if (!(schedule.closeness > 0.0 && schedule.closeness < 1.0))
    throw ValidationError("replication closeness must lie in (0, 1)");
  for (std::size_t j = 0; j < gens.size(); ++j) {
    if (!(gens[j].ambient() == amb)) throw ValidationError("generator " + std::to_string(j + 1) + " has another ambient");
    if (gens[j].is_trivial()) throw ValidationError("generator " + std::to_string(j + 1) + " is trivial");
    double g = std::numeric_limits<double>::infinity();
    for (int k = 1; k <= S.size(); ++k) g = std::min(g, gap_rho0(gens[j], S.at(k)));
    if (g > schedule.recurrence_tol)
      throw ValidationError("generator " + std::to_string(j + 1) + " is not recurrently approximable (gap " +
                            std::to_string(g) + ")");
  }
  if (sum_dimension(gens) < amb.real_dim()) throw ValidationError("generators do not span the ambient space");

  ReplicationResult res;
  Decomposition& dec = res.decomposition;
  dec.target = x;
  double scale = 1.0;
  while (x.norm() * scale >= 1.0) scale *= 0.5;
  res.scale = scale;
  const Vector xs = x * scale;

  Matrix G(amb.real_dim(), 0);
  std::vector<Eigen::Index> offsets;
  for (const auto& g : gens) {
    offsets.push_back(G.cols());
    G.conservativeResize(Eigen::NoChange, G.cols() + g.basis().cols());
    G.rightCols(g.basis().cols()) = g.basis();
  }
  const Eigen::CompleteOrthogonalDecomposition<Matrix> cod(G);

  const int period = S.size();
  int last = 0;
  Vector z = xs;
  std::vector<int> stage_of_term;
  int final_stage = schedule.stages + 1;
  for (int k = 1; k <= schedule.stages; ++k) {
    const double budget = std::ldexp(1.0, -k);
    if (z.norm() <= 1e-15) {
      final_stage = k;
      break;
    }
    const Vector c = cod.solve(z);
    std::vector<std::pair<std::size_t, Vector>> pieces;
    Vector approx = Vector::Zero(z.size());
    for (std::size_t j = 0; j < gens.size(); ++j) {
      Vector piece = gens[j].basis() * c.segment(offsets[j], gens[j].basis().cols());
      approx += piece;
      if (piece.norm() > 1e-15) pieces.emplace_back(j, std::move(piece));
    }
    const double eta = (z - approx).norm();
    if (!(eta < budget)) throw NumericError("stage " + std::to_string(k) + " approximation misses 2^-k");
    if (pieces.empty()) {
      final_stage = k;
      break;
    }
    const int N = static_cast<int>(pieces.size());
    if (N > schedule.n_cap)
      throw BudgetError("stage " + std::to_string(k) + " needs " + std::to_string(N) + " pieces, cap is " +
                        std::to_string(schedule.n_cap));
    double max_piece = 0.0;
    for (const auto& [j, p] : pieces) max_piece = std::max(max_piece, p.norm());
    const double r_real = std::floor(max_piece * N / budget) + 1.0;
    if (r_real > schedule.r_cap)
      throw BudgetError("stage " + std::to_string(k) + " needs r = " + std::to_string(r_real) + ", cap is " +
                        std::to_string(schedule.r_cap));
    const int r = static_cast<int>(r_real);
    res.stage_sizes.emplace_back(N, r);
    const double tau = schedule.closeness * (budget - eta) / (static_cast<double>(r) * N);

    for (int i = 0; i < r; ++i) {
      for (const auto& [j, p] : pieces) {
        const Vector w = p / static_cast<double>(r);
        int best = 0;
        double best_d = std::numeric_limits<double>::infinity();
        for (int idx = last + 1; idx <= last + period; ++idx) {
          const double d = distance(w, S.at(idx));
          if (d < best_d) {
            best_d = d;
            best = idx;
          }
        }
        if (best_d > tau)
          throw ValidationError("schedule infeasible: generator " + std::to_string(j + 1) + " at stage " +
                                std::to_string(k) + " has no member within " + std::to_string(tau));
        Vector y = project(w, S.at(best));
        z -= y;
        last = best;
        dec.terms.push_back({best, y / scale});
        dec.residual_trace.push_back(z.norm() / scale);
        stage_of_term.push_back(k);
      }
    }
    if (!(z.norm() < budget)) throw NumericError("stage " + std::to_string(k) + " residual is not below 2^-k");
  }

  // Prefix s belongs to the stage of term s+1; the full sum opens the next stage.
  Vector partial = Vector::Zero(xs.size());
  for (std::size_t s = 0; s <= dec.terms.size(); ++s) {
    const int stage = s < dec.terms.size() ? stage_of_term[s] : final_stage;
    if (s > 0) partial += dec.terms[s - 1].component * scale;
    const PrefixDeviation dev{s, stage, (xs - partial).norm(), 6.0 * std::ldexp(1.0, -stage)};
    if (!(dev.delta < dev.bound))
      throw NumericError("prefix deviation " + std::to_string(dev.delta) + " breaks 6*2^-k at s = " +
                         std::to_string(s));
    res.deviations.push_back(dev);
  }
  return res;
}

RepresentationReport verify_representation(const SubspaceSystem& S, const Decomposition& dec) {
  const AmbientSpace& amb = S.ambient();
  RepresentationReport rep;
  Vector partial = Vector::Zero(dec.target.size());
  const double slack = 1e-9 * std::max(1.0, amb.norm(dec.target));
  if (dec.residual_trace.size() != dec.terms.size()) rep.trace_ok = false;
  for (std::size_t t = 0; t < dec.terms.size(); ++t) {
    const auto& term = dec.terms[t];
    partial += term.component;
    rep.absolute_sum += amb.norm(term.component);
    rep.sup_partial_sum = std::max(rep.sup_partial_sum, amb.norm(partial));
    const double d = term.index >= 1 ? distance(term.component, member(S, term.index))
                                     : std::numeric_limits<double>::infinity();
    rep.membership.push_back(d);
    rep.max_membership = std::max(rep.max_membership, d);
    if (t < dec.residual_trace.size() &&
        std::abs(dec.residual_trace[t] - amb.norm(dec.target - partial)) > slack)
      rep.trace_ok = false;
  }
  rep.final_residual = amb.norm(dec.target - partial);
  rep.members_ok = rep.max_membership <= 1e-9;
  return rep;
}

std::vector<std::pair<int, Vector>> group_by_subspace(const Decomposition& dec) {
  std::map<int, Vector> groups;
  for (const auto& t : dec.terms) {
    auto [it, fresh] = groups.try_emplace(t.index, t.component);
    if (!fresh) it->second += t.component;
  }
  return {groups.begin(), groups.end()};
}

}  // namespace subrep
