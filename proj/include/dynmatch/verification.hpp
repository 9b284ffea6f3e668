// Executable forms of the analytical objects used to certify the
// sparsifier: kernel property checks over Monte Carlo draws, the z/y and
// f^H fractional witnesses, and tail-bound test oracles for negatively
// associated sums. Estimates carry binomial/standard-error sigmas and the
// checks apply three-sigma slack.

#ifndef DYNMATCH_VERIFICATION_HPP
#define DYNMATCH_VERIFICATION_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <ostream>
#include <unordered_set>
#include <vector>

#include "dynmatch/core.hpp"
#include "dynmatch/matching.hpp"

namespace dynmatch {

using EdgeSet = std::unordered_set<EdgeKey, EdgeKeyHash>;
using SubgraphSampler = std::function<std::vector<EdgeKey>(Rng&)>;

inline double binomial_sigma(double p, int trials) {
  p = std::clamp(p, 0.0, 1.0);
  return std::sqrt(p * (1.0 - p) / trials);
}

struct KernelEdgeStat {
  EdgeKey edge{};
  int absent_draws = 0;
  double pr_absent = 0.0;
  double sigma_absent = 0.0;
  bool property2_applicable = false;  // Pr[absent] > eps + 3 sigma
  double cond_mean_max_degree = 0.0;  // E[max endpoint degree | absent]
  double cond_sigma = 0.0;
  bool property2_pass = true;
};

struct KernelReport {
  double c = 1.0, d = 1.0, eps = 0.0;
  int trials = 0;
  int degree_violations = 0;  // draws with some vertex above d
  int max_observed_degree = 0;
  int property2_checked = 0;
  int property2_violations = 0;
  double fitted_slack = 0.0;  // smallest C with cond means >= d/(c(1+C eps)) - 3 sigma
  std::vector<KernelEdgeStat> edges;

  bool pass() const { return degree_violations == 0 && property2_violations == 0; }

  void write_csv(std::ostream& os) const {
    os << "edge_u,edge_v,pr_absent,sigma_absent,applicable,cond_mean_max_degree,cond_sigma,pass\n";
    for (const auto& s : edges)
      os << s.edge.u << ',' << s.edge.v << ',' << s.pr_absent << ',' << s.sigma_absent << ','
         << (s.property2_applicable ? 1 : 0) << ',' << s.cond_mean_max_degree << ','
         << s.cond_sigma << ',' << (s.property2_pass ? 1 : 0) << '\n';
  }
};

// Monte Carlo check of both kernel properties over independent draws of
// the sampler. Property 2 is estimated by rejection (draws where the edge
// is present are discarded); extra draws are appended until every
// applicable edge has at least min_conditioned conditioned draws, capped
// at 8x the requested trials.
inline KernelReport check_kernel(const SubgraphSampler& sampler, int n,
                                 const std::vector<EdgeKey>& graph_edges, double c, double d,
                                 double eps, int trials, Rng& rng, int min_conditioned = 500,
                                 double allowed_slack_c = 0.0) {
  if (trials < 1000) throw Error(Errc::invalid_value, "kernel check needs >= 1000 trials");
  KernelReport report;
  report.c = c;
  report.d = d;
  report.eps = eps;

  const size_t m = graph_edges.size();
  std::vector<long long> absent(m, 0);
  std::vector<double> cond_sum(m, 0.0), cond_sq(m, 0.0);
  std::vector<int> deg(static_cast<size_t>(n), 0);

  auto run_draw = [&](int /*t*/) {
    auto h = sampler(rng);
    std::fill(deg.begin(), deg.end(), 0);
    EdgeSet members;
    members.reserve(h.size() * 2);
    for (const EdgeKey& e : h) {
      ++deg[e.u];
      ++deg[e.v];
      members.insert(e);
    }
    int max_deg = 0;
    for (int v = 0; v < n; ++v) max_deg = std::max(max_deg, deg[v]);
    report.max_observed_degree = std::max(report.max_observed_degree, max_deg);
    if (max_deg > d) ++report.degree_violations;
    for (size_t i = 0; i < m; ++i) {
      if (members.count(graph_edges[i])) continue;
      ++absent[i];
      double md = std::max(deg[graph_edges[i].u], deg[graph_edges[i].v]);
      cond_sum[i] += md;
      cond_sq[i] += md * md;
    }
  };

  int done = 0;
  for (; done < trials; ++done) run_draw(done);

  // top up until conditioned subsamples are large enough
  for (int guard = 0; guard < 7 * trials; ++guard) {
    bool need_more = false;
    for (size_t i = 0; i < m && !need_more; ++i) {
      double pr = static_cast<double>(absent[i]) / done;
      double sig = binomial_sigma(pr, done);
      if (pr > eps + 3 * sig && absent[i] < min_conditioned) need_more = true;
    }
    if (!need_more) break;
    run_draw(done++);
  }

  report.trials = done;
  report.edges.resize(m);
  for (size_t i = 0; i < m; ++i) {
    KernelEdgeStat& s = report.edges[i];
    s.edge = graph_edges[i];
    s.absent_draws = static_cast<int>(absent[i]);
    s.pr_absent = static_cast<double>(absent[i]) / done;
    s.sigma_absent = binomial_sigma(s.pr_absent, done);
    s.property2_applicable = s.pr_absent > eps + 3 * s.sigma_absent;
    if (!s.property2_applicable || absent[i] == 0) continue;
    ++report.property2_checked;
    s.cond_mean_max_degree = cond_sum[i] / absent[i];
    double var = std::max(0.0, cond_sq[i] / absent[i] - s.cond_mean_max_degree * s.cond_mean_max_degree);
    s.cond_sigma = std::sqrt(var / absent[i]);
    double floor_value = d / (c * (1.0 + allowed_slack_c * eps)) - 3 * s.cond_sigma;
    s.property2_pass = s.cond_mean_max_degree >= floor_value;
    if (!s.property2_pass) ++report.property2_violations;
    // smallest C with cond_mean + 3 sigma >= d / (c (1 + C eps))
    double lhs = s.cond_mean_max_degree + 3 * s.cond_sigma;
    if (lhs > 0 && eps > 0) {
      double needed = (d / (c * lhs) - 1.0) / eps;
      report.fitted_slack = std::max(report.fitted_slack, needed);
    }
  }
  return report;
}

// z / y construction: z scales each sampled edge's value by
// (1-3 eps)/min(1, x d); y zeroes small-value edges at endpoints whose z
// load exceeds one, making y a feasible fractional matching on H.
struct ZYWitness {
  double x_sum = 0.0;
  double z_sum = 0.0;
  double y_sum = 0.0;
  std::vector<double> z;  // aligned with the input edge list
  std::vector<double> y;
};

inline ZYWitness build_zy_witness(const std::vector<std::pair<EdgeKey, double>>& x,
                                  const EdgeSet& h_members, int n, double eps, double d) {
  ZYWitness w;
  w.z.resize(x.size(), 0.0);
  w.y.resize(x.size(), 0.0);
  std::vector<double> z_load(static_cast<size_t>(n), 0.0);
  for (size_t i = 0; i < x.size(); ++i) {
    const auto& [e, xe] = x[i];
    w.x_sum += xe;
    if (!h_members.count(e)) continue;
    double ze = xe * (1.0 - 3.0 * eps) / std::min(1.0, xe * d);
    w.z[i] = ze;
    w.z_sum += ze;
    z_load[e.u] += ze;
    z_load[e.v] += ze;
  }
  for (size_t i = 0; i < x.size(); ++i) {
    const auto& [e, xe] = x[i];
    if (w.z[i] == 0.0) continue;
    bool drop = xe < 1.0 / d && std::max(z_load[e.u], z_load[e.v]) > 1.0;
    w.y[i] = drop ? 0.0 : w.z[i];
    w.y_sum += w.y[i];
  }
  return w;
}

inline bool fractional_matching_feasible(const std::vector<std::pair<EdgeKey, double>>& edges,
                                         const std::vector<double>& values, int n,
                                         double slack = 1e-9) {
  std::vector<double> load(static_cast<size_t>(n), 0.0);
  for (size_t i = 0; i < edges.size(); ++i) {
    if (values[i] < 0) return false;
    load[edges[i].first.u] += values[i];
    load[edges[i].first.v] += values[i];
  }
  for (double l : load)
    if (l > 1.0 + slack) return false;
  return true;
}

// f^H witness: 1/d on kernel edges off the optimal matching, the residual
// capacity max(1 - (d_H(u)+d_H(v)-2)/d, 0) on kernel edges of it.
struct FHWitness {
  double value = 0.0;
  std::vector<double> f;  // aligned with h_edges
};

inline FHWitness build_fh_witness(int n, const std::vector<EdgeKey>& h_edges,
                                  const Matching& optimal, double d) {
  std::vector<int> deg(static_cast<size_t>(n), 0);
  for (const EdgeKey& e : h_edges) {
    ++deg[e.u];
    ++deg[e.v];
  }
  for (int v = 0; v < n; ++v)
    if (deg[v] > d)
      throw Error(Errc::degree_bound_violated, "H has a vertex of degree above d");
  FHWitness w;
  w.f.resize(h_edges.size());
  for (size_t i = 0; i < h_edges.size(); ++i) {
    const EdgeKey& e = h_edges[i];
    double f = optimal.has(e)
                   ? std::max(1.0 - (deg[e.u] + deg[e.v] - 2) / d, 0.0)
                   : 1.0 / d;
    w.f[i] = f;
    w.value += f;
  }
  return w;
}

// Tail-bound oracles for empirical samples of a sum statistic. The check
// passes when the empirical tail frequency at the bound's threshold stays
// within the bound plus three binomial sigmas.
enum class NaBoundKind { chernoff_upper, chernoff_lower, bernstein_upper };

struct NaCheckParams {
  double expectation = 0.0;     // E[X] (or the bound kappa >= E[X] for chernoff_upper)
  double delta = 0.0;           // relative deviation for Chernoff
  double deviation = 0.0;       // absolute deviation a for Bernstein
  double range_bound = 1.0;     // M with |X_i| <= M
  double variance_bound = 0.0;  // sum of Var(X_i)
};

struct NaCheckResult {
  double threshold = 0.0;
  double bound = 0.0;
  double empirical_frequency = 0.0;
  double sigma = 0.0;
  bool pass = false;
};

inline NaCheckResult na_concentration_check(const std::vector<double>& samples, NaBoundKind kind,
                                            const NaCheckParams& p) {
  if (samples.size() < 1) throw Error(Errc::invalid_value, "no samples");
  NaCheckResult r;
  switch (kind) {
    case NaBoundKind::chernoff_upper:
      r.threshold = (1.0 + p.delta) * p.expectation;
      r.bound = std::exp(-p.expectation * p.delta * p.delta / 3.0);
      break;
    case NaBoundKind::chernoff_lower:
      r.threshold = (1.0 - p.delta) * p.expectation;
      r.bound = std::exp(-p.expectation * p.delta * p.delta / 2.0);
      break;
    case NaBoundKind::bernstein_upper:
      r.threshold = p.expectation + p.deviation;
      r.bound = std::exp(-p.deviation * p.deviation /
                         (2.0 * (p.variance_bound + p.deviation * p.range_bound / 3.0)));
      break;
  }
  long long hits = 0;
  for (double s : samples) {
    bool tail = kind == NaBoundKind::chernoff_lower ? s <= r.threshold : s >= r.threshold;
    if (tail) ++hits;
  }
  r.empirical_frequency = static_cast<double>(hits) / samples.size();
  r.sigma = binomial_sigma(std::min(1.0, r.bound), static_cast<int>(samples.size()));
  r.pass = r.empirical_frequency <= r.bound + 3.0 * r.sigma;
  return r;
}

// Runs a Monte Carlo predicate, retrying once at 4x trials on failure to
// keep the suite's false-alarm rate negligible.
inline bool with_retry(const std::function<bool(int)>& check, int trials) {
  if (check(trials)) return true;
  return check(4 * trials);
}

}  // namespace dynmatch

#endif  // DYNMATCH_VERIFICATION_HPP
