#include "wsc/weak_clustering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "wsc/error.hpp"
#include "wsc/rng.hpp"

namespace wsc {

namespace {

double pow_z(double d, double z) {
  if (z == 1.0) return d;
  if (z == 2.0) return d * d;
  return std::pow(d, z);
}

std::vector<int> sample_distinct(Rng& rng, int n, int count) {
  std::vector<int> pool(n);
  std::iota(pool.begin(), pool.end(), 0);
  count = std::min(count, n);
  for (int i = 0; i < count; ++i) {
    const int r = i + int(rng.next_below(std::uint64_t(n - i)));
    std::swap(pool[i], pool[r]);
  }
  pool.resize(count);
  return pool;
}

// Grid position t -> signed offset 0, +1, -1, +2, -2, ... so that growing the
// grid only appends candidates and never moves existing ones.
int grid_offset(int t) { return (t % 2 == 1) ? (t + 1) / 2 : -(t / 2); }

// Weighted k-subset of `pts` by cost-biased seeding plus swap refinement,
// all on exact distances (members must be strong).
std::vector<int> reduce_facilities(OracleEnv& env, const std::vector<int>& pts,
                                   const std::vector<double>& mass, int k, double z) {
  const int m = int(pts.size());
  std::vector<double> d(size_t(m) * m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) d[size_t(i) * m + j] = env.exact_distance(pts[i], pts[j]);

  std::vector<int> chosen;
  chosen.push_back(int(std::max_element(mass.begin(), mass.end()) - mass.begin()));
  std::vector<double> best(size_t(m), std::numeric_limits<double>::infinity());
  while (int(chosen.size()) < k) {
    for (int i = 0; i < m; ++i)
      best[i] = std::min(best[i], d[size_t(i) * m + chosen.back()]);
    int arg = -1;
    double score = -1;
    for (int i = 0; i < m; ++i) {
      if (std::find(chosen.begin(), chosen.end(), i) != chosen.end()) continue;
      const double s = mass[i] * pow_z(best[i], z);
      if (s > score) {
        score = s;
        arg = i;
      }
    }
    chosen.push_back(arg);
  }

  auto cost_of = [&](const std::vector<int>& cs) {
    double t = 0;
    for (int i = 0; i < m; ++i) {
      double b = std::numeric_limits<double>::infinity();
      for (int c : cs) b = std::min(b, d[size_t(i) * m + c]);
      t += mass[i] * pow_z(b, z);
    }
    return t;
  };
  double cur = cost_of(chosen);
  for (int round = 0; round < 50; ++round) {
    bool improved = false;
    for (int ci = 0; ci < k && !improved; ++ci)
      for (int cand = 0; cand < m && !improved; ++cand) {
        if (std::find(chosen.begin(), chosen.end(), cand) != chosen.end()) continue;
        std::vector<int> trial = chosen;
        trial[ci] = cand;
        const double t = cost_of(trial);
        if (t < cur - 1e-12) {
          cur = t;
          chosen = trial;
          improved = true;
        }
      }
    if (!improved) break;
  }

  std::vector<int> out;
  out.reserve(k);
  for (int c : chosen) out.push_back(pts[c]);
  return out;
}

struct Candidate {
  std::vector<int> centers;
  std::vector<int> facilities;  // pre-reduction, stream order
  double sample_cost = std::numeric_limits<double>::infinity();
  int pass = 0;
};

}  // namespace

std::pair<double, int> filtered_min_distance(OracleEnv& env, int x, std::span<const int> members) {
  if (members.empty()) throw PreconditionError("filtered min needs a nonempty set");
  const int m = int(members.size());
  std::vector<double> a(m);
  std::vector<char> trusted(m, 0);
  for (int i = 0; i < m; ++i) {
    if (env.pair_known(x, members[i])) {
      a[i] = env.exact_distance(x, members[i]);
      trusted[i] = 1;
    } else {
      a[i] = env.weak_query(x, members[i]);
    }
  }
  auto arg_min = [&](auto&& keep) {
    double best = std::numeric_limits<double>::infinity();
    int arg = -1;
    for (int i = 0; i < m; ++i)
      if (keep(i) && a[i] < best) {
        best = a[i];
        arg = i;
      }
    return std::pair<double, int>{best, arg};
  };
  if (m <= 2) return arg_min([](int) { return true; });

  std::vector<char> valid(m, 0);
  bool any = false;
  for (int i = 0; i < m; ++i) {
    if (trusted[i]) {
      valid[i] = 1;
      any = true;
      continue;
    }
    int votes = 0;
    for (int j = 0; j < m; ++j) {
      if (j == i) continue;
      const double dij = env.exact_distance(members[i], members[j]);
      const double tol = 1e-9 * (1.0 + dij + a[i] + a[j]);
      if (std::abs(a[i] - a[j]) <= dij + tol && a[i] + a[j] >= dij - tol) ++votes;
    }
    if (2 * votes >= m - 1) {
      valid[i] = 1;
      any = true;
    }
  }
  if (any) return arg_min([&](int i) { return valid[i] != 0; });
  // nothing passes the vote: fall back to the median answer's member
  std::vector<int> ord(m);
  std::iota(ord.begin(), ord.end(), 0);
  std::nth_element(ord.begin(), ord.begin() + (m - 1) / 2, ord.end(),
                   [&](int i, int j) { return a[i] < a[j]; });
  const int mi = ord[(m - 1) / 2];
  return {a[mi], mi};
}

WeakClustering weak_clustering(OracleEnv& env, const WeakClusteringParams& p) {
  const int n = env.size();
  if (p.k < 1) throw PreconditionError("k must be positive");
  if (p.z < 1) throw PreconditionError("z must be at least 1");
  if (n < p.k) throw PreconditionError("need at least k points");
  if (!(p.grid_factor > 1)) throw PreconditionError("grid factor must exceed 1");
  PhaseScope scope(env, Phase::weak_clustering);

  WeakClustering out;
  out.z = p.z;
  out.claimed_beta = 2.0;
  if (n == p.k) {
    for (int i = 0; i < n; ++i) {
      env.strong_point_query(i);
      out.centers.push_back(i);
      out.assignment.push_back(i);
    }
    out.est_cost = 0;
    return out;
  }

  const int L = ceil_log2(n);
  const int rounds = p.rounds > 0 ? p.rounds : 1 + L;
  const int passes = p.passes > 0 ? p.passes : std::max(1, L);
  const int cap = std::max(p.k, p.facility_cap > 0 ? p.facility_cap : 2 * p.k * (1 + L));
  const int vcount = std::min(n, std::max(p.k, p.verify_samples > 0 ? p.verify_samples : 4 * L));
  Rng root(mix64({p.seed, 0x57434c55ULL}));

  Rng vrng = root.derive(1);
  const std::vector<int> verify = sample_distinct(vrng, n, vcount);
  for (int v : verify) env.strong_point_query(v);
  double md = 0;
  {
    std::vector<double> pd;
    for (size_t i = 0; i < verify.size(); ++i)
      for (size_t j = i + 1; j < verify.size(); ++j) {
        const double d = env.exact_distance(verify[i], verify[j]);
        if (d > 0) pd.push_back(d);
      }
    if (!pd.empty()) {
      std::nth_element(pd.begin(), pd.begin() + (pd.size() - 1) / 2, pd.end());
      md = pd[(pd.size() - 1) / 2];
    }
    if (md <= 0) md = 1.0;
  }
  const double fcost_center = pow_z(md, p.z) * double(n) / (double(p.k) * (1.0 + L));

  // Exact clustering cost restricted to the strong verify sample, scaled up
  // to the full set. Free in ledger terms: both sides are strong.
  auto sample_cost_of = [&](const std::vector<int>& centers) {
    double s = 0;
    for (int v : verify) {
      double b = std::numeric_limits<double>::infinity();
      for (int c : centers) b = std::min(b, env.exact_distance(v, c));
      s += pow_z(b, p.z);
    }
    return s * double(n) / double(verify.size());
  };

  Candidate best;
  for (int pass = 0; pass < passes; ++pass) {
    Rng prng = root.derive(2, std::uint64_t(pass));
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    for (int i = n - 1; i > 0; --i)
      std::swap(perm[i], perm[int(prng.next_below(std::uint64_t(i) + 1))]);
    // One opening coin per point, shared by every grid value of this pass, so
    // the facility sets of adjacent grid values largely overlap and the
    // pass's distinct strong queries stay near the per-candidate cap.
    Rng urng = root.derive(3, std::uint64_t(pass));
    std::vector<double> coin(n);
    for (int i = 0; i < n; ++i) coin[i] = urng.next_real();

    for (int t = 0; t < rounds; ++t) {
      const double fcost = fcost_center * std::pow(p.grid_factor, grid_offset(t));
      std::vector<int> fac;
      std::vector<double> mass;
      for (int x : perm) {
        if (fac.empty()) {
          env.strong_point_query(x);
          fac.push_back(x);
          mass.push_back(1);
          continue;
        }
        double delta = std::numeric_limits<double>::infinity();
        int arg = 0;
        for (size_t f = 0; f < fac.size(); ++f) {
          const double w = env.weak_query(x, fac[f]);
          if (w < delta) {
            delta = w;
            arg = int(f);
          }
        }
        const bool open =
            int(fac.size()) < cap && coin[x] < std::min(1.0, pow_z(delta, p.z) / fcost);
        if (open) {
          env.strong_point_query(x);
          fac.push_back(x);
          mass.push_back(1);
        } else {
          mass[arg] += 1;
        }
      }

      std::vector<int> centers;
      if (int(fac.size()) <= p.k) {
        centers = fac;
        // pad from the strong verify pool, then from fresh points
        for (int v : verify) {
          if (int(centers.size()) >= p.k) break;
          if (std::find(centers.begin(), centers.end(), v) == centers.end()) centers.push_back(v);
        }
        for (int i = 0; i < n && int(centers.size()) < p.k; ++i) {
          if (std::find(centers.begin(), centers.end(), i) != centers.end()) continue;
          env.strong_point_query(i);
          centers.push_back(i);
        }
      } else {
        centers = reduce_facilities(env, fac, mass, p.k, p.z);
      }

      const double sc = sample_cost_of(centers);
      if (sc < best.sample_cost) {
        best.centers = std::move(centers);
        best.facilities = std::move(fac);
        best.sample_cost = sc;
        best.pass = pass;
      }
    }
  }

  // Strong-known neighborhood of each winning center: verify sample plus the
  // winning run's facilities, each attached to its exactly-nearest center,
  // closest-first, capped. The anchor-set radius bounds the estimator slack.
  const int k = int(best.centers.size());
  std::vector<int> pool = verify;
  pool.insert(pool.end(), best.facilities.begin(), best.facilities.end());
  pool.insert(pool.end(), best.centers.begin(), best.centers.end());
  std::sort(pool.begin(), pool.end());
  pool.erase(std::unique(pool.begin(), pool.end()), pool.end());

  // Each center anchors its own neighborhood; without this, a center that
  // coincides with an earlier one loses every tie and ends up anchorless.
  std::vector<std::vector<std::pair<double, int>>> near(k);
  for (int j = 0; j < k; ++j) near[j].push_back({0.0, best.centers[j]});
  for (int x : pool) {
    if (std::find(best.centers.begin(), best.centers.end(), x) != best.centers.end()) continue;
    int arg = 0;
    double b = env.exact_distance(x, best.centers[0]);
    for (int j = 1; j < k; ++j) {
      const double d = env.exact_distance(x, best.centers[j]);
      if (d < b) {
        b = d;
        arg = j;
      }
    }
    near[arg].push_back({b, x});
  }
  const int neighborhood_cap = 10 * ceil_log2(n);
  std::vector<std::vector<int>> hood(k);
  std::vector<double> hood_rs(k, 0);
  for (int j = 0; j < k; ++j) {
    std::sort(near[j].begin(), near[j].end());
    if (int(near[j].size()) > neighborhood_cap) near[j].resize(neighborhood_cap);
    for (auto& [d, x] : near[j]) {
      hood[j].push_back(x);
      hood_rs[j] = std::max(hood_rs[j], 2 * d);
    }
  }

  out.centers = best.centers;
  out.facilities_opened = int(best.facilities.size());
  out.winning_pass = best.pass;
  out.assignment.assign(n, 0);
  out.est_cost = 0;
  std::vector<double> est(k);
  for (int x = 0; x < n; ++x) {
    for (int j = 0; j < k; ++j) {
      if (env.pair_known(x, out.centers[j]))
        est[j] = env.exact_distance(x, out.centers[j]);
      else
        est[j] = estimate_distance_to_set(env, x, hood[j], hood_rs[j], int(hood[j].size()));
    }
    int arg = 0;
    for (int j = 1; j < k; ++j)
      if (est[j] < est[arg]) arg = j;
    // break near-ties with the raw weak answer to the centers themselves
    const double tol = 1e-12 * (1.0 + std::abs(est[arg]));
    int tied = 0;
    for (int j = 0; j < k; ++j)
      if (std::abs(est[j] - est[arg]) <= tol) ++tied;
    if (tied > 1) {
      double bw = std::numeric_limits<double>::infinity();
      int bj = arg;
      for (int j = 0; j < k; ++j) {
        if (std::abs(est[j] - est[arg]) > tol) continue;
        const double w = env.pair_known(x, out.centers[j])
                             ? env.exact_distance(x, out.centers[j])
                             : env.weak_query(x, out.centers[j]);
        if (w < bw) {
          bw = w;
          bj = j;
        }
      }
      arg = bj;
    }
    out.assignment[x] = arg;
    out.est_cost += pow_z(est[arg], p.z);
  }
  return out;
}

WeakClustering exact_clustering(const Dataset& ds, const ExactClusteringParams& p) {
  const int n = ds.size();
  if (p.k < 1 || p.k > n) throw PreconditionError("k must be between 1 and n");
  Rng root(mix64({p.seed, 0x45584354ULL}));

  WeakClustering best;
  best.z = p.z;
  best.claimed_beta = p.claimed_beta;
  best.est_cost = std::numeric_limits<double>::infinity();
  for (int r = 0; r < std::max(1, p.restarts); ++r) {
    Rng rng = root.derive(std::uint64_t(r));
    std::vector<int> centers;
    std::vector<double> dist(n, std::numeric_limits<double>::infinity());
    centers.push_back(int(rng.next_below(std::uint64_t(n))));
    while (int(centers.size()) < p.k) {
      double tot = 0;
      for (int i = 0; i < n; ++i) {
        dist[i] = std::min(dist[i], ds.distance(i, centers.back()));
        tot += ds.weight(i) * pow_z(dist[i], p.z);
      }
      int pick = 0;
      if (tot > 0) {
        double target = rng.next_real() * tot;
        for (int i = 0; i < n; ++i) {
          target -= ds.weight(i) * pow_z(dist[i], p.z);
          if (target <= 0) {
            pick = i;
            break;
          }
        }
      } else {
        pick = int(rng.next_below(std::uint64_t(n)));
      }
      centers.push_back(pick);
    }

    std::vector<int> assign(n, 0);
    double cost = 0;
    for (int it = 0; it < p.max_iters; ++it) {
      cost = 0;
      for (int i = 0; i < n; ++i) {
        int arg = 0;
        double b = ds.distance(i, centers[0]);
        for (int j = 1; j < p.k; ++j) {
          const double d = ds.distance(i, centers[j]);
          if (d < b) {
            b = d;
            arg = j;
          }
        }
        assign[i] = arg;
        cost += ds.weight(i) * pow_z(b, p.z);
      }
      bool moved = false;
      for (int j = 0; j < p.k; ++j) {
        std::vector<int> cl;
        for (int i = 0; i < n; ++i)
          if (assign[i] == j) cl.push_back(i);
        if (cl.empty()) continue;
        int arg = centers[j];
        double b = std::numeric_limits<double>::infinity();
        for (int cand : cl) {
          double s = 0;
          for (int i : cl) {
            s += ds.weight(i) * pow_z(ds.distance(i, cand), p.z);
            if (s >= b) break;
          }
          if (s < b) {
            b = s;
            arg = cand;
          }
        }
        if (arg != centers[j]) {
          centers[j] = arg;
          moved = true;
        }
      }
      if (!moved) break;
    }
    // final cost under the final centers
    cost = 0;
    for (int i = 0; i < n; ++i) {
      int arg = 0;
      double b = ds.distance(i, centers[0]);
      for (int j = 1; j < p.k; ++j) {
        const double d = ds.distance(i, centers[j]);
        if (d < b) {
          b = d;
          arg = j;
        }
      }
      assign[i] = arg;
      cost += ds.weight(i) * pow_z(b, p.z);
    }
    if (cost < best.est_cost) {
      best.centers = centers;
      best.assignment = assign;
      best.est_cost = cost;
    }
  }
  return best;
}

}  // namespace wsc
