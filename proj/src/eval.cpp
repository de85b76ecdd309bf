#include "wsc/eval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "wsc/error.hpp"
#include "wsc/mincostflow.hpp"
#include "wsc/rng.hpp"

namespace wsc::eval {

namespace {

double pow_z(double d, double z) {
  if (z == 1.0) return d;
  if (z == 2.0) return d * d;
  return std::pow(d, z);
}

void check_weighted(std::span<const int> points, std::span<const double> weights,
                    std::span<const int> centers, int n) {
  if (points.size() != weights.size())
    throw PreconditionError("points and weights must have equal length");
  if (centers.empty()) throw PreconditionError("need at least one center");
  for (int p : points)
    if (p < 0 || p >= n) throw PreconditionError("point index out of range");
  for (int c : centers)
    if (c < 0 || c >= n) throw PreconditionError("center index out of range");
  for (double w : weights)
    if (!(w >= 0) || !std::isfinite(w)) throw PreconditionError("weights must be nonnegative");
}

bool near_integral(double v) {
  return std::isfinite(v) && std::abs(v) < 4.0e15 && std::abs(v - std::round(v)) <= 1e-9;
}

nlohmann::json finite_or_inf(double v) {
  if (std::isfinite(v)) return v;
  return "inf";
}

long long choose_capped(long long n, long long k, long long cap) {
  if (k < 0 || k > n) return 0;
  long long r = 1;
  for (long long i = 1; i <= k; ++i) {
    r = r * (n - k + i) / i;
    if (r > cap) return cap + 1;
  }
  return r;
}

// Nonnegative integers summing to `total`, one per weight, proportional to
// the weights with largest-remainder rounding.
std::vector<long long> proportional_integers(const std::vector<double>& raw, long long total) {
  const double sum = std::accumulate(raw.begin(), raw.end(), 0.0);
  std::vector<long long> out(raw.size(), 0);
  if (!(sum > 0) || total <= 0) {
    if (!out.empty() && total > 0) out[0] = total;
    return out;
  }
  long long used = 0;
  std::vector<std::pair<double, size_t>> frac;
  for (size_t i = 0; i < raw.size(); ++i) {
    const double share = raw[i] / sum * double(total);
    out[i] = (long long)std::floor(share);
    used += out[i];
    frac.push_back({share - std::floor(share), i});
  }
  std::sort(frac.begin(), frac.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  });
  for (long long r = 0; r < total - used; ++r) out[frac[size_t(r) % frac.size()].second] += 1;
  return out;
}

}  // namespace

double clustering_cost(const Dataset& ds, std::span<const int> points,
                       std::span<const double> weights, std::span<const int> centers, double z) {
  check_weighted(points, weights, centers, ds.size());
  double total = 0;
  for (size_t i = 0; i < points.size(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    for (int c : centers) best = std::min(best, ds.distance(points[i], c));
    total += weights[i] * pow_z(best, z);
  }
  return total;
}

std::vector<int> nearest_center(const Dataset& ds, std::span<const int> points,
                                std::span<const int> centers) {
  if (centers.empty()) throw PreconditionError("need at least one center");
  std::vector<int> out(points.size());
  for (size_t i = 0; i < points.size(); ++i) {
    int arg = 0;
    double best = ds.distance(points[i], centers[0]);
    for (size_t j = 1; j < centers.size(); ++j) {
      const double d = ds.distance(points[i], centers[j]);
      if (d < best) {
        best = d;
        arg = int(j);
      }
    }
    out[i] = arg;
  }
  return out;
}

std::vector<int> all_points(const Dataset& ds) {
  std::vector<int> v(ds.size());
  std::iota(v.begin(), v.end(), 0);
  return v;
}

std::vector<double> dataset_weights(const Dataset& ds) {
  std::vector<double> w(ds.size());
  for (int i = 0; i < ds.size(); ++i) w[i] = ds.weight(i);
  return w;
}

nlohmann::json CostReport::to_json() const {
  nlohmann::json j;
  j["status"] = lp::status_name(status);
  j["cost"] = finite_or_inf(cost);
  j["per_center"] = per_center;
  j["sigma"] = nlohmann::json::array();
  for (const auto& [p, c, m] : sigma) {
    nlohmann::json js;
    js["point"] = p;
    js["center"] = c;
    js["mass"] = m;
    j["sigma"].push_back(js);
  }
  return j;
}

CostReport constrained_cost(const Dataset& ds, std::span<const int> points,
                            std::span<const double> weights, std::span<const int> centers,
                            double z, std::span<const double> gamma) {
  check_weighted(points, weights, centers, ds.size());
  if (gamma.size() != centers.size())
    throw PreconditionError("gamma must have one entry per center");
  for (double g : gamma)
    if (!(g >= 0) || !std::isfinite(g)) throw PreconditionError("gamma must be nonnegative");

  const int P = int(points.size());
  const int K = int(centers.size());
  const double tw = std::accumulate(weights.begin(), weights.end(), 0.0);
  const double tg = std::accumulate(gamma.begin(), gamma.end(), 0.0);
  if (std::abs(tw - tg) > 1e-6 * std::max(1.0, tw))
    throw PreconditionError("gamma must distribute exactly the total weight");

  bool integral = true;
  for (double w : weights) integral = integral && near_integral(w);
  for (double g : gamma) integral = integral && near_integral(g);
  const double sw = integral ? 1.0 : 1e6;

  std::vector<long long> wi(P), gi(K);
  long long sum_w = 0, sum_g = 0;
  for (int i = 0; i < P; ++i) sum_w += wi[i] = llround(weights[i] * sw);
  for (int j = 0; j < K; ++j) sum_g += gi[j] = llround(gamma[j] * sw);
  if (sum_w != sum_g) {
    const int jmax = int(std::max_element(gi.begin(), gi.end()) - gi.begin());
    gi[jmax] += sum_w - sum_g;
    if (gi[jmax] < 0) throw PreconditionError("gamma rounding drift exceeds the largest demand");
  }

  std::vector<double> dz(size_t(P) * K);
  double max_c = 0;
  bool cost_integral = true;
  for (int i = 0; i < P; ++i)
    for (int j = 0; j < K; ++j) {
      const double c = pow_z(ds.distance(points[i], centers[j]), z);
      dz[size_t(i) * K + j] = c;
      max_c = std::max(max_c, c);
      cost_integral = cost_integral && near_integral(c);
    }
  double sc = cost_integral ? 1.0 : 1e6;
  while (sc > 1.0 && max_c * sc > 1e15) sc /= 10.0;

  flow::MinCostFlow net(P + K + 2);
  const int src = P + K, snk = P + K + 1;
  std::vector<int> eid(size_t(P) * K, -1);
  for (int i = 0; i < P; ++i)
    if (wi[i] > 0) net.add_edge(src, i, wi[i], 0);
  for (int i = 0; i < P; ++i)
    for (int j = 0; j < K; ++j) {
      if (wi[i] == 0) continue;
      eid[size_t(i) * K + j] = net.add_edge(i, P + j, wi[i], llround(dz[size_t(i) * K + j] * sc));
    }
  for (int j = 0; j < K; ++j)
    if (gi[j] > 0) net.add_edge(P + j, snk, gi[j], 0);

  const auto [flow_sent, raw_cost] = net.solve(src, snk, sum_g);
  (void)raw_cost;

  CostReport rep;
  if (flow_sent != sum_g) return rep;
  rep.status = lp::SolveStatus::optimal;
  rep.per_center.assign(size_t(K), 0.0);
  double cost = 0;
  for (int i = 0; i < P; ++i)
    for (int j = 0; j < K; ++j) {
      const int id = eid[size_t(i) * K + j];
      if (id < 0) continue;
      const long long f = net.edge_flow(id);
      if (f == 0) continue;
      const double mass = double(f) / sw;
      const double part = mass * dz[size_t(i) * K + j];
      rep.sigma.push_back({points[i], centers[j], mass});
      rep.per_center[size_t(j)] += part;
      cost += part;
    }
  rep.cost = cost;
  return rep;
}

CostReport fair_cost(const Dataset& ds, std::span<const int> points,
                     std::span<const double> weights, std::span<const int> group,
                     std::span<const int> centers, double z, const FairSpec& spec) {
  check_weighted(points, weights, centers, ds.size());
  if (group.size() != points.size())
    throw PreconditionError("group labels must align with points");
  if (spec.alpha.size() != spec.beta.size())
    throw PreconditionError("alpha and beta must cover the same groups");
  const int G = int(spec.alpha.size());
  for (int g : group)
    if (g < 0 || g >= G) throw PreconditionError("group id outside the fairness spec");
  for (int g = 0; g < G; ++g) {
    if (!(spec.alpha[g] >= 0) || !(spec.beta[g] <= 1) || spec.alpha[g] > spec.beta[g])
      throw PreconditionError("fairness spec needs 0 <= alpha <= beta <= 1 per group");
  }

  // Columns at distance zero with equal group are interchangeable in any
  // assignment, so they merge into one column with the summed weight; the
  // optimum is unchanged and duplicate-heavy inputs stay solvable. Masses in
  // sigma land on the first point of each merged class.
  std::vector<int> mpts;
  std::vector<double> mws;
  std::vector<int> mgrp;
  for (size_t a = 0; a < points.size(); ++a) {
    int owner = -1;
    for (size_t m = 0; m < mpts.size(); ++m)
      if (mgrp[m] == group[a] && ds.distance(points[a], mpts[m]) == 0.0) {
        owner = int(m);
        break;
      }
    if (owner >= 0) {
      mws[size_t(owner)] += weights[a];
    } else {
      mpts.push_back(points[a]);
      mws.push_back(weights[a]);
      mgrp.push_back(group[a]);
    }
  }
  points = mpts;
  weights = mws;
  group = mgrp;

  const int P = int(points.size());
  const int K = int(centers.size());
  std::vector<double> dz(size_t(P) * K);
  lp::DenseSimplex lp;
  for (int i = 0; i < P; ++i)
    for (int j = 0; j < K; ++j) {
      dz[size_t(i) * K + j] = pow_z(ds.distance(points[i], centers[j]), z);
      lp.add_var(dz[size_t(i) * K + j]);
    }

  const std::vector<int> nearest = nearest_center(ds, points, centers);
  for (int i = 0; i < P; ++i) {
    std::vector<lp::DenseSimplex::Entry> row(K);
    for (int j = 0; j < K; ++j) row[size_t(j)] = {i * K + j, 1.0};
    lp.add_eq_row(std::move(row), weights[i], i * K + nearest[i]);
  }
  for (int j = 0; j < K; ++j) {
    for (int g = 0; g < G; ++g) {
      // share of group g in center j's mass stays within [alpha, beta]
      if (spec.alpha[g] > 0) {
        std::vector<lp::DenseSimplex::Entry> row(P);
        for (int i = 0; i < P; ++i)
          row[size_t(i)] = {i * K + j, (group[i] == g ? 1.0 : 0.0) - spec.alpha[g]};
        lp.add_ge_row(std::move(row), 0.0);
      }
      if (spec.beta[g] < 1) {
        std::vector<lp::DenseSimplex::Entry> row(P);
        for (int i = 0; i < P; ++i)
          row[size_t(i)] = {i * K + j, spec.beta[g] - (group[i] == g ? 1.0 : 0.0)};
        lp.add_ge_row(std::move(row), 0.0);
      }
    }
  }

  const lp::Solution s = lp.solve();
  CostReport rep;
  rep.status = s.status;
  if (s.status != lp::SolveStatus::optimal) return rep;
  rep.cost = s.objective;
  rep.per_center.assign(size_t(K), 0.0);
  for (int i = 0; i < P; ++i)
    for (int j = 0; j < K; ++j) {
      const double mass = s.x[size_t(i) * K + j];
      if (mass <= 0) continue;
      rep.sigma.push_back({points[i], centers[j], mass});
      rep.per_center[size_t(j)] += mass * dz[size_t(i) * K + j];
    }
  return rep;
}

double brute_force_opt(const Dataset& ds, std::span<const int> points,
                       std::span<const double> weights, std::span<const int> candidates, int k,
                       double z, std::vector<int>* best_centers, long long subset_cap) {
  if (k < 1 || k > int(candidates.size()))
    throw PreconditionError("k must be between 1 and the candidate count");
  if (choose_capped(int(candidates.size()), k, subset_cap) > subset_cap)
    throw PreconditionError("too many center subsets to enumerate");

  std::vector<int> idx(k);
  std::iota(idx.begin(), idx.end(), 0);
  std::vector<int> centers(k);
  double best = std::numeric_limits<double>::infinity();
  const int n = int(candidates.size());
  while (true) {
    for (int i = 0; i < k; ++i) centers[i] = candidates[idx[i]];
    const double c = clustering_cost(ds, points, weights, centers, z);
    if (c < best) {
      best = c;
      if (best_centers) *best_centers = centers;
    }
    int pos = k - 1;
    while (pos >= 0 && idx[pos] == n - k + pos) --pos;
    if (pos < 0) break;
    ++idx[pos];
    for (int i = pos + 1; i < k; ++i) idx[i] = idx[i - 1] + 1;
  }
  return best;
}

nlohmann::json VerifyReport::to_json() const {
  nlohmann::json j;
  j["pass"] = pass;
  j["max_rel_dev"] = finite_or_inf(max_rel_dev);
  j["probes"] = probes;
  j["exhaustive"] = exhaustive;
  j["worst"] = nlohmann::json::array();
  for (const Witness& w : worst) {
    nlohmann::json jw;
    jw["centers"] = w.centers;
    if (!w.gamma.empty()) jw["gamma"] = w.gamma;
    jw["coreset_cost"] = w.coreset_cost;
    jw["full_cost"] = w.full_cost;
    jw["rel_dev"] = finite_or_inf(w.rel_dev);
    j["worst"].push_back(jw);
  }
  return j;
}

VerifyReport verify_coreset(const Dataset& ds, std::span<const int> coreset_points,
                            std::span<const double> coreset_weights, const VerifyOptions& opt) {
  const int n = ds.size();
  if (opt.k < 1 || opt.k > n) throw PreconditionError("verify: k out of range");
  const std::vector<int> xs = all_points(ds);
  const std::vector<double> xw = dataset_weights(ds);

  std::vector<std::vector<int>> center_sets;
  const bool exhaustive = choose_capped(n, opt.k, opt.exhaustive_cap) <= opt.exhaustive_cap;
  if (exhaustive) {
    std::vector<int> idx(opt.k);
    std::iota(idx.begin(), idx.end(), 0);
    while (true) {
      center_sets.push_back(idx);
      int pos = opt.k - 1;
      while (pos >= 0 && idx[pos] == n - opt.k + pos) --pos;
      if (pos < 0) break;
      ++idx[pos];
      for (int i = pos + 1; i < opt.k; ++i) idx[i] = idx[i - 1] + 1;
    }
  } else {
    Rng rng(mix64({opt.seed, 0x76657269ULL}));
    std::vector<int> pool(n);
    for (int t = 0; t < opt.sample_sets; ++t) {
      std::iota(pool.begin(), pool.end(), 0);
      std::vector<int> set(opt.k);
      for (int i = 0; i < opt.k; ++i) {
        const int r = i + int(rng.next_below(std::uint64_t(n - i)));
        std::swap(pool[i], pool[r]);
        set[i] = pool[i];
      }
      std::sort(set.begin(), set.end());
      center_sets.push_back(std::move(set));
    }
  }

  const double wx = std::accumulate(xw.begin(), xw.end(), 0.0);
  const double ws = std::accumulate(coreset_weights.begin(), coreset_weights.end(), 0.0);
  if (opt.gamma_sets > 0 && std::abs(wx - ws) > 1e-6 * std::max(1.0, wx))
    throw PreconditionError("constrained probes require the coreset to keep the total weight");

  auto rel = [](double cs, double cx) {
    if (cx > 1e-12) return std::abs(cs - cx) / cx;
    return cs <= 1e-12 ? 0.0 : std::numeric_limits<double>::infinity();
  };

  // Mass profiles are integers summing to the (integral) dataset weight: a
  // k=2 profile sweeps an even grid from (0, W) to (W, 0); larger k rounds
  // exponential splits proportionally.
  const long long W = llround(wx);
  const bool integral_mass = near_integral(wx);

  VerifyReport rep;
  rep.exhaustive = exhaustive;
  std::vector<Witness> all;
  Rng grng(mix64({opt.seed, 0x67616d6dULL}));
  for (size_t si = 0; si < center_sets.size(); ++si) {
    const std::vector<int>& c = center_sets[si];
    Witness w;
    w.centers = c;
    w.full_cost = clustering_cost(ds, xs, xw, c, opt.z);
    w.coreset_cost = clustering_cost(ds, coreset_points, coreset_weights, c, opt.z);
    w.rel_dev = rel(w.coreset_cost, w.full_cost);
    ++rep.probes;
    all.push_back(w);

    if (int(si) >= opt.gamma_sets) continue;
    std::vector<std::vector<double>> profiles;
    if (opt.k == 2 && integral_mass) {
      long long prev = -1;
      for (int t = 0; t < opt.gamma_grid; ++t) {
        const long long g0 = opt.gamma_grid < 2
                                 ? W / 2
                                 : llround(double(W) * double(t) / double(opt.gamma_grid - 1));
        if (g0 == prev) continue;
        prev = g0;
        profiles.push_back({double(g0), double(W - g0)});
      }
    } else {
      for (int t = 0; t < opt.gamma_grid; ++t) {
        std::vector<double> raw(size_t(opt.k));
        for (double& g : raw) g = -std::log(1.0 - grng.next_real() + 1e-18);
        std::vector<double> gamma(size_t(opt.k));
        if (integral_mass) {
          const std::vector<long long> gi = proportional_integers(raw, W);
          for (int j = 0; j < opt.k; ++j) gamma[size_t(j)] = double(gi[size_t(j)]);
        } else {
          const double tot = std::accumulate(raw.begin(), raw.end(), 0.0);
          for (int j = 0; j < opt.k; ++j) gamma[size_t(j)] = raw[size_t(j)] * wx / tot;
        }
        profiles.push_back(std::move(gamma));
      }
    }
    for (const std::vector<double>& gamma : profiles) {
      Witness v;
      v.centers = c;
      v.gamma = gamma;
      const CostReport px = constrained_cost(ds, xs, xw, c, opt.z, gamma);
      const CostReport ps = constrained_cost(ds, coreset_points, coreset_weights, c, opt.z, gamma);
      if (!px.feasible() || !ps.feasible()) {
        v.rel_dev = std::numeric_limits<double>::infinity();
      } else {
        v.full_cost = px.cost;
        v.coreset_cost = ps.cost;
        v.rel_dev = rel(ps.cost, px.cost);
      }
      ++rep.probes;
      all.push_back(std::move(v));
    }
  }

  std::sort(all.begin(), all.end(), [](const Witness& a, const Witness& b) {
    if (a.rel_dev != b.rel_dev) return a.rel_dev > b.rel_dev;
    if (a.centers != b.centers) return a.centers < b.centers;
    return a.gamma < b.gamma;
  });
  rep.max_rel_dev = all.empty() ? 0.0 : all.front().rel_dev;
  if (all.size() > 5) all.resize(5);
  rep.worst = std::move(all);
  rep.pass = rep.max_rel_dev <= opt.eps + 1e-12;
  return rep;
}

}  // namespace wsc::eval
