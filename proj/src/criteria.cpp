#include "subrep/criteria.hpp"

#include "subrep/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace subrep {

namespace {

MarginReport from_search(const SearchResult& r) {
  MarginReport rep;
  rep.value = r.value;
  rep.witness = r.point;
  rep.method = r.method;
  rep.certified_dim = r.dense_ran ? r.certified_dim : 0;
  rep.dense_value = r.dense_value;
  rep.multistart_value = r.multistart_value;
  return rep;
}

MarginReport exact(double value, Vector witness) {
  MarginReport rep;
  rep.value = value;
  rep.witness = std::move(witness);
  rep.method = SearchMethod::ClosedForm;
  rep.dense_value = value;
  rep.multistart_value = value;
  return rep;
}

Matrix stacked(const std::vector<Subspace>& parts, int rows) {
  Eigen::Index cols = 0;
  for (const auto& s : parts) cols += s.basis().cols();
  Matrix M(rows, cols);
  Eigen::Index at = 0;
  for (const auto& s : parts) {
    M.middleCols(at, s.basis().cols()) = s.basis();
    at += s.basis().cols();
  }
  return M;
}

// A nonzero functional inside span(Q) that vanishes on every member of S,
// scaled to unit dual norm; empty when there is none.
Vector annihilating_functional(const SubspaceSystem& S, const Matrix& Q) {
  const AmbientSpace& amb = S.ambient();
  if (Q.cols() == 0) return {};
  const Matrix M = stacked(S.subspaces(), amb.real_dim());
  if (M.cols() == 0) {
    Vector phi = Q.col(0);
    return phi / amb.dual_norm(phi);
  }
  const Matrix C = M.transpose() * Q;
  Eigen::FullPivLU<Matrix> lu(C);
  lu.setThreshold(1e-10);
  if (lu.rank() == Q.cols()) return {};
  Vector phi = Q * lu.kernel().col(0);
  return phi / amb.dual_norm(phi);
}

std::vector<int> range(int from, int to) {
  std::vector<int> r;
  for (int i = from; i <= to; ++i) r.push_back(i);
  return r;
}

// Restriction norms of every interval span {i..j} of one period.
class IntervalNorms {
public:
  explicit IntervalNorms(const SubspaceSystem& S) : n_(S.size()) {
    for (int i = 1; i <= n_; ++i)
      for (int j = i; j <= n_; ++j) {
        const std::vector<int> idx = range(i, j);
        evals_.emplace_back(span_closure(S, idx));
      }
  }

  int size() const { return n_; }

  double at(int i, int j, const Vector& phi) const { return evals_[offset(i) + static_cast<std::size_t>(j - i)](phi); }

  double psr(const Vector& phi, Partition* argmin) const {
    // best[j]: cheapest composition of {1..j}; cut[j]: start of its last block.
    std::vector<double> best(static_cast<std::size_t>(n_ + 1), std::numeric_limits<double>::infinity());
    std::vector<int> cut(static_cast<std::size_t>(n_ + 1), 1);
    best[0] = 0.0;
    for (int j = 1; j <= n_; ++j)
      for (int i = 1; i <= j; ++i) {
        const double c = best[static_cast<std::size_t>(i - 1)] + at(i, j, phi);
        if (c < best[static_cast<std::size_t>(j)]) {
          best[static_cast<std::size_t>(j)] = c;
          cut[static_cast<std::size_t>(j)] = i;
        }
      }
    if (argmin) {
      argmin->blocks.clear();
      for (int j = n_; j >= 1; j = cut[static_cast<std::size_t>(j)] - 1)
        argmin->blocks.insert(argmin->blocks.begin(), range(cut[static_cast<std::size_t>(j)], j));
      argmin->tail = true;
    }
    return best[static_cast<std::size_t>(n_)];
  }

private:
  std::size_t offset(int i) const {
    // Intervals starting before i: sum_{a<i} (n - a + 1).
    const std::size_t a = static_cast<std::size_t>(i - 1);
    return a * static_cast<std::size_t>(n_) - a * (a - 1) / 2;
  }

  int n_;
  std::vector<RestrictionNormEval> evals_;
};

std::vector<RestrictionNormEval> member_norms(const SubspaceSystem& S) {
  std::vector<RestrictionNormEval> out;
  for (const auto& X : S.subspaces()) out.emplace_back(X);
  return out;
}

double max_norm(const std::vector<RestrictionNormEval>& evals, const Vector& phi) {
  double m = 0.0;
  for (const auto& e : evals) m = std::max(m, e(phi));
  return m;
}

}  // namespace

std::vector<Partition> sequential_partitions(int n) {
  if (n < 1) throw ValidationError("sequential_partitions needs n >= 1");
  if (n > 20) throw BudgetError("sequential_partitions is capped at n = 20");
  std::vector<Partition> out;
  const unsigned long total = 1UL << (n - 1);
  out.reserve(total);
  for (unsigned long mask = 0; mask < total; ++mask) {
    Partition p;
    std::vector<int> block = {1};
    for (int k = 2; k <= n; ++k) {
      if ((mask >> (k - 2)) & 1UL) {
        p.blocks.push_back(std::move(block));
        block.clear();
      }
      block.push_back(k);
    }
    p.blocks.push_back(std::move(block));
    out.push_back(std::move(p));
  }
  return out;
}

double F1(const SubspaceSystem& S, const Partition& pi, const Functional& phi) {
  int next = 1;
  for (const auto& b : pi.blocks) {
    if (b.empty()) throw ValidationError("partition has an empty block");
    for (int k : b)
      if (k != next++) throw ValidationError("partition blocks must be consecutive and start at 1");
  }
  if (next - 1 != S.size()) throw ValidationError("partition does not cover the system");
  double total = 0.0;
  for (const auto& b : pi.blocks) total += restriction_norm(phi, span_closure(S, b));
  return total;
}

double psr_objective(const SubspaceSystem& S, const Vector& phi, Partition* argmin) {
  return IntervalNorms(S).psr(phi, argmin);
}

MarginReport psr_margin(const SubspaceSystem& S, const SearchOptions& opts) {
  const AmbientSpace& amb = S.ambient();
  const int d = amb.real_dim();
  const IntervalNorms norms(S);
  MarginReport rep;
  const Vector zero_witness = annihilating_functional(S, Matrix::Identity(d, d));
  if (zero_witness.size() > 0) {
    rep = exact(0.0, zero_witness);
    rep.spanning = false;
  } else {
    const Matrix I = Matrix::Identity(d, d);
    const NormKind q = dual(amb.p());
    auto objective = [&](const Vector& phi) { return norms.psr(phi, nullptr); };
    rep = from_search(minimize_on_sphere(I, q, objective, opts));
    // inf_phi min_pi F1 = min_pi inf_phi F1_pi. The unsplit block makes the
    // combined objective flat at ||phi|| over wide regions, so random starts
    // also run on each split partition, where narrow dips are visible.
    if (S.size() >= 2 && S.size() <= 7) {
      const auto parts = sequential_partitions(S.size());
      SearchOptions local = opts;
      local.dense = false;
      local.starts = std::max(8, opts.starts / static_cast<int>(parts.size() - 1));
      for (std::size_t k = 1; k < parts.size(); ++k) {
        local.seed = mix_seed(opts.seed, 0x9a27 + k);
        const auto& blocks = parts[k].blocks;
        const SearchResult r = minimize_on_sphere(
            I, q,
            [&](const Vector& phi) {
              double f = 0.0;
              for (const auto& b : blocks) f += norms.at(b.front(), b.back(), phi);
              return f;
            },
            local);
        const double v = objective(r.point);
        rep.multistart_value = std::min(rep.multistart_value, v);
        if (v < rep.value) {
          rep.value = v;
          rep.witness = r.point;
          rep.method = SearchMethod::Multistart;
        }
      }
    }
  }
  Partition best;
  norms.psr(rep.witness, &best);
  rep.witness_blocks = best.blocks;
  return rep;
}

double apss_objective(const SubspaceSystem& S, const Vector& phi) { return max_norm(member_norms(S), phi); }

MarginReport apss_margin(const SubspaceSystem& S, const SearchOptions& opts) {
  const int d = S.ambient().real_dim();
  const Vector zero_witness = annihilating_functional(S, Matrix::Identity(d, d));
  if (zero_witness.size() > 0) {
    MarginReport rep = exact(0.0, zero_witness);
    rep.spanning = false;
    return rep;
  }
  const auto evals = member_norms(S);
  return from_search(minimize_on_sphere(Matrix::Identity(d, d), dual(S.ambient().p()),
                                        [&](const Vector& phi) { return max_norm(evals, phi); }, opts));
}

double lambda_objective(const SubspaceSystem& S, const Vector& x) {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& X : S.subspaces()) m = std::min(m, DistanceEval(X)(x));
  return m;
}

MarginReport lambda_S(const SubspaceSystem& S, const SearchOptions& opts) {
  const AmbientSpace& amb = S.ambient();
  const int d = amb.real_dim();
  const Vector phi = annihilating_functional(S, Matrix::Identity(d, d));
  if (phi.size() > 0) {
    // phi(x) = ||x|| = 1 and phi vanishes on the sum, so d(x, X_k) >= 1.
    MarginReport rep = exact(1.0, norming_vector(phi, amb));
    rep.spanning = false;
    return rep;
  }
  std::vector<DistanceEval> evals;
  for (const auto& X : S.subspaces()) evals.emplace_back(X);
  return from_search(maximize_on_sphere(Matrix::Identity(d, d), amb.p(),
                                        [&](const Vector& x) {
                                          double m = std::numeric_limits<double>::infinity();
                                          for (const auto& e : evals) m = std::min(m, e(x));
                                          return m;
                                        },
                                        opts));
}

double net_radius(double tau, double eps) {
  if (!(tau > 0.0)) throw ValidationError("net_radius needs tau > 0");
  if (!(eps > 0.0 && eps <= 1.0)) throw ValidationError("net_radius needs eps in (0, 1]");
  return std::sqrt(std::max(0.0, 1.0 + tau * tau - 2.0 * tau * eps));
}

NetCheck check_net(const SubspaceSystem& S, double tau, double lambda, const SearchOptions& opts) {
  const AmbientSpace& amb = S.ambient();
  if (amb.p() != NormKind::L2) throw ValidationError("check_net is Euclidean only");
  if (!(tau > 0.0)) throw ValidationError("check_net needs tau > 0");
  const int d = amb.real_dim();
  const double far = std::sqrt(1.0 + tau * tau);
  // Distance from phi to the nearest point of tau * (unit sphere of X_k).
  auto gap = [&](const Vector& phi) {
    double best = far;
    for (const auto& X : S.subspaces()) {
      const Vector p = project(phi, X);
      const double pn = p.norm();
      if (pn > 0.0) best = std::min(best, (phi - tau * p / pn).norm());
    }
    return best;
  };
  NetCheck out;
  out.covering_radius = maximize_on_sphere(Matrix::Identity(d, d), NormKind::L2, gap, opts).value;
  out.apss = apss_margin(S, opts).value;
  out.predicted_radius = out.apss > 0.0 ? net_radius(tau, std::min(1.0, out.apss)) : far;
  out.is_net = out.covering_radius <= lambda;
  out.predicted_net = out.apss >= (1.0 + tau * tau - lambda * lambda) / (2.0 * tau);
  return out;
}

MarginReport schauder_block_margin(const SubspaceSystem& S, const SearchOptions& opts) {
  const AmbientSpace& amb = S.ambient();
  const int N = S.size();
  const int d = amb.real_dim();
  std::vector<Subspace> ann;
  bool any = false;
  for (int k = 1; k <= N; ++k) {
    ann.push_back(annihilator(S, k));
    any = any || !ann.back().is_trivial();
  }
  MarginReport rep;
  rep.spanning = S.spans();
  if (!any) {
    rep.defined = false;
    rep.value = 0.0;
    rep.witness = Vector::Zero(d);
    return rep;
  }

  auto sum_of = [&](int from, int to) {
    const std::vector<Subspace> parts(ann.begin() + from - 1, ann.begin() + to);
    const Matrix M = stacked(parts, d);
    std::vector<Vector> cols;
    for (Eigen::Index c = 0; c < M.cols(); ++c) cols.push_back(M.col(c));
    return orthonormalize(std::span<const Vector>(cols), amb);
  };

  // The split n = N (psi = 0) always contributes ratio 1.
  const Subspace all = sum_of(1, N);
  rep = exact(1.0, all.basis().col(0) / amb.dual_norm(all.basis().col(0)));
  rep.witness_blocks = {range(1, N)};
  rep.spanning = S.spans();
  for (int n = 1; n < N; ++n) {
    const Subspace A = sum_of(1, n);
    const Subspace B = sum_of(n + 1, N);
    if (A.is_trivial() || B.is_trivial()) continue;
    MarginReport cand;
    if (amb.p() == NormKind::L2) {
      const Matrix R = A.basis() - B.basis() * (B.basis().transpose() * A.basis());
      Eigen::JacobiSVD<Matrix> svd(R, Eigen::ComputeFullV);
      const Eigen::Index last = svd.singularValues().size() - 1;
      cand = exact(svd.singularValues()(last), A.basis() * svd.matrixV().col(last));
    } else {
      const DistanceEval to_B(in_dual(B));
      cand = from_search(minimize_on_sphere(A.basis(), dual(amb.p()), to_B, opts));
    }
    if (cand.value < rep.value) {
      const bool spanning = rep.spanning;
      rep = cand;
      rep.spanning = spanning;
      rep.witness_blocks = {range(1, n), range(n + 1, N)};
    }
  }
  return rep;
}

MarginReport finite_codim_margin(const SubspaceSystem& S, const Subspace& Y, const SearchOptions& opts) {
  const AmbientSpace& amb = S.ambient();
  if (!(Y.ambient() == amb)) throw ValidationError("finite_codim_margin: Y lives in another space");
  if (Y.real_dim() == amb.real_dim()) throw ValidationError("finite_codim_margin: Y is the whole space");
  if (Y.is_trivial()) return apss_margin(S, opts);
  const Subspace Yperp = orthogonal_complement(Y);
  const Vector zero_witness = annihilating_functional(S, Yperp.basis());
  if (zero_witness.size() > 0) {
    MarginReport rep = exact(0.0, zero_witness);
    rep.spanning = S.spans();
    return rep;
  }
  const auto evals = member_norms(S);
  MarginReport rep = from_search(minimize_on_sphere(Yperp.basis(), dual(amb.p()),
                                                    [&](const Vector& phi) { return max_norm(evals, phi); }, opts));
  rep.spanning = S.spans();
  return rep;
}

DeltaMembership delta_membership(const SubspaceSystem& S, const Vector& x, double tol) {
  if (!S.cyclic()) throw ValidationError("delta_membership needs a cyclic system");
  S.ambient().check_vector(x, "delta_membership");
  DeltaMembership out;
  out.min_distance = std::numeric_limits<double>::infinity();
  for (int k = 1; k <= S.size(); ++k) {
    const double dk = distance(x, S.at(k));
    out.profile.push_back(dk);
    if (dk < out.min_distance) {
      out.min_distance = dk;
      out.argmin = k;
    }
  }
  out.member = out.min_distance <= tol;
  return out;
}

}  // namespace subrep
