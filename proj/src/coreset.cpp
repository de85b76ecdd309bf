#include "wsc/coreset.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "wsc/error.hpp"
#include "wsc/rng.hpp"

namespace wsc {

int ring_index(double d, double R, double F) {
  if (!(R > 0) || !(F > 1)) throw PreconditionError("ring_index needs R > 0 and F > 1");
  if (!(d >= 0)) throw PreconditionError("ring_index needs d >= 0");
  int l = 0;
  double bound = R;
  while (d > bound * (1.0 + 1e-12)) {
    bound *= F;
    if (++l > 4000) throw PreconditionError("ring_index: distance too many rings out");
  }
  return l;
}

double rescaled_eps(double eps, double beta, double c0, double z, int n) {
  if (!(eps > 0) || !(beta >= 1) || !(c0 >= 1)) throw PreconditionError("bad rescale arguments");
  const double lg = std::max(1, ceil_log2(std::max(n, 2)));
  if (z <= 1) return eps / (15.0 * beta * c0 * c0 * c0 * lg);
  return eps / (2.0 * beta * std::pow(2.0 * c0, 5.0 * z + 1.0) * lg);
}

namespace {

CoresetParams scaled_params(int n, int k, double z, double eps, double lambda, double divisor,
                            double c0) {
  if (n < 1 || k < 1) throw PreconditionError("need n >= 1 and k >= 1");
  if (!(eps > 0) || eps > 1) throw PreconditionError("eps must be in (0, 1]");
  if (!(lambda >= 1) || !(divisor >= 1)) throw PreconditionError("bad preset scale");
  CoresetParams p;
  p.k = k;
  p.z = z;
  p.eps = eps;
  p.c0 = c0;
  const double e3 = eps * eps * eps;
  const double e2 = eps * eps;
  p.sample_size = std::max(8, int(std::ceil(100.0 * c0 * k * lambda * lambda * lambda / (e3 * divisor))));
  p.heavy_threshold = std::max(4, int(std::ceil(80.0 * c0 * k * lambda * lambda / (e3 * divisor))));
  p.update_threshold = std::max(2, int(std::ceil(30.0 * k * lambda * lambda / (e2 * divisor))));
  p.heavy_threshold = std::min(p.heavy_threshold, p.sample_size);
  p.update_threshold = std::min(p.update_threshold, p.heavy_threshold);
  p.max_iters = int(std::ceil(10.0 * lambda * lambda));
  return p;
}

}  // namespace

CoresetParams CoresetParams::desk(int n, int k, double z, double eps, double lambda,
                                  double divisor) {
  return scaled_params(n, k, z, eps, lambda, divisor, 1.0);
}

CoresetParams CoresetParams::paper(int n, int k, double z, double eps) {
  return scaled_params(n, k, z, eps, double(std::max(1, ceil_log2(std::max(n, 2)))), 1.0, 5.0);
}

double WeightedCoreset::total_weight() const {
  double t = 0;
  for (const CoresetEntry& e : entries) t += e.weight;
  return t;
}

std::vector<int> WeightedCoreset::points() const {
  std::vector<int> v;
  v.reserve(entries.size());
  for (const CoresetEntry& e : entries) v.push_back(e.point);
  return v;
}

std::vector<double> WeightedCoreset::weights() const {
  std::vector<double> v;
  v.reserve(entries.size());
  for (const CoresetEntry& e : entries) v.push_back(e.weight);
  return v;
}

nlohmann::json WeightedCoreset::to_json() const {
  nlohmann::json j;
  j["z"] = z;
  j["size"] = entries.size();
  j["total_weight"] = total_weight();
  j["entries"] = nlohmann::json::array();
  for (const CoresetEntry& e : entries) {
    nlohmann::json je;
    je["point"] = e.point;
    je["weight"] = e.weight;
    je["center"] = e.center;
    je["ring"] = e.ring;
    je["kind"] = e.kind;
    if (e.attribute >= 0) {
      je["attribute"] = e.attribute;
      je["group"] = e.group;
    }
    j["entries"].push_back(je);
  }
  return j;
}

void RunTrace::add(std::string kind, nlohmann::json data) {
  events.push_back({std::move(kind), std::move(data)});
}

nlohmann::json RunTrace::to_json() const {
  nlohmann::json j = nlohmann::json::array();
  for (const TraceEvent& e : events) {
    nlohmann::json je;
    je["kind"] = e.kind;
    je["data"] = e.data;
    j.push_back(je);
  }
  return j;
}

RingUpdate coreset_update(const std::vector<int>& ring_sample, double surviving, int sample_size,
                          int update_threshold, bool prose_weighting) {
  if (sample_size < 1) throw PreconditionError("coreset_update needs a positive sample size");
  if (!(surviving >= 0)) throw PreconditionError("coreset_update needs surviving >= 0");
  if (int(ring_sample.size()) < update_threshold)
    throw PreconditionError("coreset_update: ring sample of " +
                            std::to_string(ring_sample.size()) +
                            " is below the update threshold " + std::to_string(update_threshold));
  RingUpdate u;
  const int m = int(ring_sample.size());
  u.est_count = (m + 2) / 3;  // first ceil(m/3) in drawn order
  u.m_tilde = 3.0 * surviving / double(sample_size) * double(u.est_count);
  if (prose_weighting) {
    if (m > 0) {
      const double w = u.m_tilde / double(m);
      for (int x : ring_sample) u.entries.push_back({x, w});
    }
    return u;
  }
  const int carriers = m - u.est_count;
  if (carriers > 0) {
    const double w = u.m_tilde / double(carriers);
    for (int i = u.est_count; i < m; ++i) u.entries.push_back({ring_sample[i], w});
  }
  return u;
}

WeightedCoreset ring_coreset(OracleEnv& env, const WeakClustering& wc, const CoresetParams& p,
                             RunTrace* trace) {
  const int n = env.size();
  const int k = int(wc.centers.size());
  if (k < 1) throw PreconditionError("clustering input has no centers");
  if (int(wc.assignment.size()) != n)
    throw PreconditionError("clustering input must assign every point");
  for (int a : wc.assignment)
    if (a < 0 || a >= k) throw PreconditionError("assignment references a missing center");
  if (p.sample_size < 1 || p.heavy_threshold < 1 || p.update_threshold < 1 || p.max_iters < 1)
    throw PreconditionError("coreset thresholds must be positive");
  if (!(p.c0 >= 1)) throw PreconditionError("c0 must be at least 1");

  PhaseScope scope(env, Phase::coreset_loop);
  if (!p.pair_queries)
    for (int c : wc.centers) env.strong_point_query(c);

  WeightedCoreset out;
  out.z = p.z;

  const double R = wc.est_cost / (wc.claimed_beta * double(n));
  if (!(R > 0) || !std::isfinite(R)) {
    // estimated cost is zero: every cluster collapses onto its center
    std::vector<double> cnt(k, 0);
    for (int x = 0; x < n; ++x) cnt[wc.assignment[x]] += 1;
    for (int i = 0; i < k; ++i)
      if (cnt[i] > 0) out.entries.push_back({wc.centers[i], cnt[i], i, -1, "center", -1, -1});
    if (trace) {
      nlohmann::json d;
      d["centers"] = k;
      trace->add("degenerate-scale", d);
    }
    return out;
  }

  const double F = 2.0 * p.c0;
  const int anchor_cap = p.peel_cap > 0 ? p.peel_cap : 10 * ceil_log2(std::max(n, 2));
  Rng root(mix64({p.seed, 0x52494e47ULL}));

  // A sample's exact distance to its center comes from a point query (exact
  // to every other strong point) or from a pair query against that center.
  auto reveal = [&](int x, int ci) -> double {
    if (p.pair_queries) return env.strong_pair_query(x, wc.centers[ci]);
    env.strong_point_query(x);
    return env.exact_distance(x, wc.centers[ci]);
  };
  auto exactly_known = [&](int x, int ci) -> bool {
    return (env.strong_point_known(x) && env.strong_point_known(wc.centers[ci])) ||
           env.pair_known(x, wc.centers[ci]);
  };

  std::vector<char> alive(n, 1);
  int alive_count = n;
  std::set<std::pair<int, int>> processed;  // (center, ring)
  std::vector<char> conservative_done(k, 0);
  std::vector<double> peel_removed(k, 0);
  std::vector<std::vector<size_t>> sample_entries(k);
  bool hit_iteration_limit = true;

  for (int iter = 0; iter < p.max_iters && alive_count > 0; ++iter) {
    bool progress = false;
    for (int ci = 0; ci < k; ++ci) {
      std::vector<int> mem;
      for (int x = 0; x < n; ++x)
        if (alive[x] && wc.assignment[x] == ci) mem.push_back(x);
      if (mem.empty()) continue;
      const int cluster = int(mem.size());

      if (cluster <= p.sample_size) {
        // Whole survivor set fits in one sample: take it verbatim with exact
        // ring labels; unit weights need no later rescaling.
        for (int x : mem) {
          const double d = reveal(x, ci);
          out.entries.push_back({x, 1.0, ci, ring_index(d, R, F), "exact", -1, -1});
          alive[x] = 0;
        }
        alive_count -= cluster;
        progress = true;
        if (trace) {
          nlohmann::json d;
          d["iter"] = iter;
          d["center"] = ci;
          d["cluster"] = cluster;
          trace->add("take-all", d);
        }
        continue;
      }

      Rng srng = root.derive(std::uint64_t(iter) + 1, std::uint64_t(ci) + 1);
      std::vector<int> draw = mem;
      for (int i = 0; i < p.sample_size; ++i) {
        const int r = i + int(srng.next_below(std::uint64_t(draw.size() - i)));
        std::swap(draw[i], draw[r]);
      }
      draw.resize(p.sample_size);

      std::map<int, std::vector<int>> occ;         // ring -> samples in drawn order
      std::vector<std::pair<double, int>> sampled;  // (exact dist, idx)
      sampled.reserve(draw.size());
      for (int s : draw) {
        const double d = reveal(s, ci);
        occ[ring_index(d, R, F)].push_back(s);
        sampled.push_back({d, s});
      }

      int jstar = -1;
      for (const auto& [l, v] : occ)
        if (int(v.size()) >= p.heavy_threshold) jstar = std::max(jstar, l);
      if (jstar < 0) {
        size_t best = 0;
        for (const auto& [l, v] : occ)
          if (v.size() > best) {
            best = v.size();
            jstar = l;
          }
      }

      bool conservative = false;
      if (jstar == 0 && !conservative_done[ci]) {
        const std::vector<int>& r0 = occ[0];
        int close = 0;
        for (int s : r0)
          if (env.exact_distance(s, wc.centers[ci]) <= R / (2.0 * p.c0) * (1.0 + 1e-12)) ++close;
        conservative = 2 * close > int(r0.size());
        if (conservative) conservative_done[ci] = 1;
      }

      const double peel_radius = conservative ? R : R * std::pow(F, jstar + 1);
      const int mark_max = conservative ? 0 : jstar + 1;
      // Anchors must sit inside a ball of known radius around the center so
      // the estimator's additive slack (its diameter bound) stays ring-sized.
      const double anchor_bound = conservative ? R / (2.0 * p.c0) : R * std::pow(F, jstar);
      const double rs = 2.0 * anchor_bound;

      for (const auto& [l, v] : occ) {
        if (l > mark_max) continue;
        if (processed.count({ci, l})) continue;
        if (int(v.size()) < p.update_threshold) continue;
        RingUpdate u =
            coreset_update(v, double(cluster), p.sample_size, p.update_threshold, p.prose_weighting);
        for (const auto& [x, w] : u.entries) {
          sample_entries[ci].push_back(out.entries.size());
          out.entries.push_back({x, w, ci, l, "ring-sample", -1, -1});
        }
        if (trace) {
          nlohmann::json d;
          d["iter"] = iter;
          d["center"] = ci;
          d["ring"] = l;
          d["samples"] = v.size();
          d["est_split"] = u.est_count;
          d["m_tilde"] = u.m_tilde;
          d["entries"] = u.entries.size();
          trace->add("ring-estimate", d);
        }
      }
      for (int l = 0; l <= mark_max; ++l) processed.insert({ci, l});

      std::vector<std::pair<double, int>> anchors;
      anchors.push_back({0.0, wc.centers[ci]});
      for (const auto& [d, s] : sampled)
        if (d <= anchor_bound * (1.0 + 1e-12)) anchors.push_back({d, s});
      std::sort(anchors.begin(), anchors.end());
      anchors.erase(std::unique(anchors.begin(), anchors.end()), anchors.end());
      if (int(anchors.size()) > anchor_cap) anchors.resize(anchor_cap);
      std::vector<int> anchor_ids;
      anchor_ids.reserve(anchors.size());
      for (const auto& a : anchors) anchor_ids.push_back(a.second);
      if (p.pair_queries)
        for (size_t a = 0; a < anchor_ids.size(); ++a)
          for (size_t b = a + 1; b < anchor_ids.size(); ++b)
            env.strong_pair_query(anchor_ids[a], anchor_ids[b]);

      int removed = 0;
      std::vector<int> removed_pts;
      for (int x : mem) {
        if (!alive[x]) continue;
        double dx;
        if (exactly_known(x, ci)) {
          dx = env.exact_distance(x, wc.centers[ci]);
        } else {
          dx = estimate_distance_to_set(env, x, anchor_ids, rs, int(anchor_ids.size()));
          if (trace) {
            nlohmann::json d;
            d["iter"] = iter;
            d["center"] = ci;
            d["point"] = x;
            d["r_s"] = rs;
            d["value"] = dx;
            trace->add("estimate-call", d);
          }
        }
        if (dx <= peel_radius * (1.0 + 1e-12)) {
          alive[x] = 0;
          --alive_count;
          ++removed;
          peel_removed[ci] += 1;
          removed_pts.push_back(x);
        }
      }
      if (removed > 0) progress = true;
      if (trace) {
        nlohmann::json d;
        d["iter"] = iter;
        d["center"] = ci;
        d["kind"] = conservative ? "conservative" : "normal";
        d["j_star"] = jstar;
        d["radius"] = peel_radius;
        d["cluster"] = cluster;
        d["removed"] = removed;
        d["removed_points"] = removed_pts;
        d["anchors"] = anchor_ids;
        trace->add("peel", d);
      }
    }
    if (alive_count == 0) hit_iteration_limit = false;
    if (!progress) {
      hit_iteration_limit = false;
      if (trace) {
        nlohmann::json d;
        d["alive"] = alive_count;
        trace->add("stalled", d);
      }
      break;
    }
  }

  if (alive_count > 0) {
    if (hit_iteration_limit && trace) {
      nlohmann::json d;
      d["alive"] = alive_count;
      trace->add("iteration-limit", d);
    }
    int cnt = 0;
    for (int x = 0; x < n; ++x)
      if (alive[x]) {
        out.entries.push_back({x, 1.0, wc.assignment[x], -1, "leftover", -1, -1});
        ++cnt;
      }
    if (trace) {
      nlohmann::json d;
      d["count"] = cnt;
      trace->add("leftover", d);
    }
  }

  // Rescale sampled ring weights so each center accounts for exactly the mass
  // its peels removed; exact entries already carry their own mass.
  for (int ci = 0; ci < k; ++ci) {
    double have = 0;
    for (size_t idx : sample_entries[ci]) have += out.entries[idx].weight;
    const double target = peel_removed[ci];
    if (have > 0) {
      const double scale = target / have;
      for (size_t idx : sample_entries[ci]) out.entries[idx].weight *= scale;
      if (trace) {
        nlohmann::json d;
        d["center"] = ci;
        d["target"] = target;
        d["estimated"] = have;
        d["scale"] = scale;
        trace->add("mass-fixup", d);
      }
    } else if (target > 0) {
      out.entries.push_back({wc.centers[ci], target, ci, -1, "center", -1, -1});
      if (trace) {
        nlohmann::json d;
        d["center"] = ci;
        d["target"] = target;
        trace->add("mass-fixup-center", d);
      }
    }
  }
  out.entries.erase(std::remove_if(out.entries.begin(), out.entries.end(),
                                   [](const CoresetEntry& e) { return e.weight <= 0; }),
                    out.entries.end());
  return out;
}

}  // namespace wsc
