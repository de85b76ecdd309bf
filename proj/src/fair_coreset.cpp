#include "wsc/fair_coreset.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "wsc/error.hpp"
#include "wsc/rng.hpp"

namespace wsc {

FairParams FairParams::desk(int n, int k, double z, double eps, double lambda, double divisor,
                            double cm) {
  if (n < 1 || k < 1) throw PreconditionError("need n >= 1 and k >= 1");
  if (!(eps > 0) || eps > 1) throw PreconditionError("eps must be in (0, 1]");
  if (!(lambda >= 1) || !(divisor >= 1) || !(cm > 0)) throw PreconditionError("bad preset scale");
  FairParams p;
  p.k = k;
  p.z = z;
  p.eps = eps;
  p.c0 = 1;
  p.sample_size = std::max(8, int(std::ceil(1000.0 * p.c0 * lambda * lambda / divisor)));
  p.heavy_fraction = std::min(1.0, 4.0 / (5.0 * lambda));
  const double lg = std::log2(std::max(double(n) / eps, 2.0));
  p.batch_size = std::max(4, int(std::ceil(cm * k * lambda * lambda * lg / (eps * eps))));
  p.max_iters = int(std::ceil(10.0 * lambda * lambda));
  return p;
}

FairParams FairParams::paper(int n, int k, double z, double eps) {
  const double lambda = double(std::max(1, ceil_log2(std::max(n, 2))));
  FairParams p = desk(n, k, z, eps, lambda, 1.0, 30.0);
  p.c0 = 5;
  p.sample_size = std::max(8, int(std::ceil(1000.0 * p.c0 * lambda * lambda)));
  return p;
}

std::vector<double> integer_split(long long total, int parts) {
  if (parts < 1 || total < 0) throw PreconditionError("integer_split needs parts >= 1, total >= 0");
  const long long base = total / parts;
  const long long rem = total % parts;
  std::vector<double> w(static_cast<size_t>(parts), double(base));
  for (long long i = 0; i < rem; ++i) w[size_t(i)] += 1.0;
  return w;
}

WeightedCoreset subset_coreset(OracleEnv& env, const WeakClustering& wc,
                               std::span<const int> subset, const FairParams& p,
                               RunTrace* trace) {
  const int n = env.size();
  const int k = int(wc.centers.size());
  if (k < 1) throw PreconditionError("clustering input has no centers");
  if (int(wc.assignment.size()) != n)
    throw PreconditionError("clustering input must assign every point");
  if (p.sample_size < 1 || p.batch_size < 1 || p.max_iters < 1)
    throw PreconditionError("coreset thresholds must be positive");
  if (!(p.c0 >= 1)) throw PreconditionError("c0 must be at least 1");
  if (!(p.heavy_fraction > 0) || p.heavy_fraction > 1)
    throw PreconditionError("heavy_fraction must be in (0, 1]");
  {
    std::set<int> seen;
    for (int x : subset) {
      if (x < 0 || x >= n) throw PreconditionError("subset index out of range");
      if (!seen.insert(x).second) throw PreconditionError("subset has duplicate points");
    }
  }

  PhaseScope scope(env, Phase::coreset_loop);
  for (int c : wc.centers) env.strong_point_query(c);

  WeightedCoreset out;
  out.z = p.z;
  if (subset.empty()) return out;

  auto take_all = [&](const std::vector<int>& pts, const char* why) {
    for (int x : pts) out.entries.push_back({x, 1.0, wc.assignment[x], -1, "exact", -1, -1});
    if (trace) {
      nlohmann::json d;
      d["count"] = pts.size();
      d["why"] = why;
      trace->add("take-all", d);
    }
  };

  // A peeled batch enters the coreset either verbatim (small batches) or as
  // batch_size with-replacement draws whose weights sum to the batch size.
  auto emit_batch = [&](const std::vector<int>& batch, int ci, int jstar, Rng brng, int iter,
                        double radius) {
    if (int(batch.size()) <= p.batch_size) {
      take_all(batch, "small-batch");
      return;
    }
    const std::vector<double> w = integer_split(static_cast<long long>(batch.size()), p.batch_size);
    for (int t = 0; t < p.batch_size; ++t) {
      const int x = batch[int(brng.next_below(std::uint64_t(batch.size())))];
      out.entries.push_back({x, w[size_t(t)], ci, jstar, "batch-sample", -1, -1});
    }
    if (trace) {
      nlohmann::json d;
      d["iter"] = iter;
      d["center"] = ci;
      d["j_star"] = jstar;
      d["radius"] = radius;
      d["batch"] = batch.size();
      d["draws"] = p.batch_size;
      trace->add("batch", d);
    }
  };

  const double R = wc.est_cost / (wc.claimed_beta * double(n));
  std::vector<int> ordered(subset.begin(), subset.end());
  std::sort(ordered.begin(), ordered.end());
  if (!(R > 0) || !std::isfinite(R)) {
    take_all(ordered, "degenerate-scale");
    return out;
  }

  const double F = 2.0 * p.c0;
  const int anchor_cap = p.peel_cap > 0 ? p.peel_cap : 10 * ceil_log2(std::max(n, 2));
  const int heavy_needed = std::max(1, int(std::ceil(p.heavy_fraction * p.sample_size)));
  Rng root(mix64({p.seed, 0x46414952ULL}));

  std::vector<std::vector<int>> by_center(k);
  for (int x : ordered) by_center[wc.assignment[x]].push_back(x);

  for (int ci = 0; ci < k; ++ci) {
    std::vector<int>& live = by_center[ci];
    if (live.empty()) continue;
    Rng center_root = root.derive(std::uint64_t(ci) + 1);
    int stalls = 0;
    bool exhausted = true;
    for (int iter = 0; iter < p.max_iters && !live.empty(); ++iter) {
      if (int(live.size()) < p.sample_size) {
        // Sampling would return fewer than sample_size draws: take the whole
        // survivor set as the final batch.
        emit_batch(live, ci, -1, center_root.derive(0x4242, std::uint64_t(iter)), iter, 0.0);
        live.clear();
        exhausted = false;
        break;
      }

      Rng srng = center_root.derive(std::uint64_t(iter) + 1);
      std::vector<int> draw = live;
      for (int i = 0; i < p.sample_size; ++i) {
        const int r = i + int(srng.next_below(std::uint64_t(draw.size() - i)));
        std::swap(draw[i], draw[r]);
      }
      draw.resize(p.sample_size);

      std::map<int, int> occ;
      std::vector<std::pair<double, int>> sampled;
      sampled.reserve(draw.size());
      for (int s : draw) {
        env.strong_point_query(s);
        const double d = env.exact_distance(s, wc.centers[ci]);
        occ[ring_index(d, R, F)] += 1;
        sampled.push_back({d, s});
      }

      int jstar = -1;
      for (const auto& [l, c] : occ)
        if (c >= heavy_needed) {
          jstar = l;
          break;
        }
      if (jstar < 0) {
        int best = 0;
        for (const auto& [l, c] : occ)
          if (c > best) {
            best = c;
            jstar = l;
          }
      }
      const double radius = R * std::pow(F, jstar);
      const double rs = 2.0 * radius;

      std::vector<std::pair<double, int>> anchors;
      anchors.push_back({0.0, wc.centers[ci]});
      for (const auto& [d, s] : sampled)
        if (d <= radius * (1.0 + 1e-12)) anchors.push_back({d, s});
      std::sort(anchors.begin(), anchors.end());
      anchors.erase(std::unique(anchors.begin(), anchors.end()), anchors.end());
      if (int(anchors.size()) > anchor_cap) anchors.resize(anchor_cap);
      std::vector<int> anchor_ids;
      anchor_ids.reserve(anchors.size());
      for (const auto& a : anchors) anchor_ids.push_back(a.second);

      std::vector<int> batch;
      std::vector<int> keep;
      for (int x : live) {
        double dx;
        if (env.strong_point_known(x)) {
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
        if (dx <= radius * (1.0 + 1e-12))
          batch.push_back(x);
        else
          keep.push_back(x);
      }

      if (trace) {
        nlohmann::json d;
        d["iter"] = iter;
        d["center"] = ci;
        d["j_star"] = jstar;
        d["radius"] = radius;
        d["cluster"] = live.size();
        d["removed"] = batch.size();
        d["removed_points"] = batch;
        d["anchors"] = anchor_ids;
        trace->add("peel", d);
      }

      if (batch.empty()) {
        if (++stalls >= 2) {
          take_all(live, "stalled");
          live.clear();
          exhausted = false;
          break;
        }
        continue;
      }
      stalls = 0;
      live = std::move(keep);
      emit_batch(batch, ci, jstar, center_root.derive(0x4242, std::uint64_t(iter)), iter, radius);
      if (live.empty()) exhausted = false;
    }
    if (!live.empty() && exhausted) {
      take_all(live, "iteration-limit");
      live.clear();
    }
  }
  return out;
}

WeightedCoreset fair_coreset(OracleEnv& env, const WeakClustering& wc, int attribute,
                             const FairParams& p, RunTrace* trace) {
  const Dataset& ds = env.dataset();
  if (ds.attribute_count() < 1) throw PreconditionError("dataset has no attributes");
  if (attribute >= ds.attribute_count() || attribute < -1)
    throw PreconditionError("no such attribute");
  if (p.z != 1) throw PreconditionError("fair reduction is limited to z = 1");

  // Parts to cover: one attribute's groups, or (attribute = -1) the common
  // refinement of every attribute's partition. Refinement cells sit inside a
  // single group of each attribute, so one pass preserves every attribute's
  // per-group mass at once while the total stays the dataset weight.
  std::vector<std::pair<int, std::vector<int>>> parts;  // (group tag, points)
  if (attribute >= 0) {
    for (int g = 0; g < ds.group_count(attribute); ++g)
      parts.push_back({g, ds.points_in_group(attribute, g)});
  } else {
    std::map<std::vector<int>, std::vector<int>> cells;
    for (int x = 0; x < ds.size(); ++x) {
      std::vector<int> key(size_t(ds.attribute_count()));
      for (int a = 0; a < ds.attribute_count(); ++a) key[size_t(a)] = ds.group_of(x, a);
      cells[key].push_back(x);
    }
    int cell = 0;
    for (auto& [key, pts] : cells) parts.push_back({cell++, std::move(pts)});
  }

  WeightedCoreset out;
  out.z = p.z;
  for (auto& [g, subset] : parts) {
    if (subset.empty()) continue;
    if (trace) {
      nlohmann::json d;
      d["attribute"] = attribute;
      d["group"] = g;
      d["size"] = subset.size();
      trace->add("group-start", d);
    }
    FairParams gp = p;
    gp.seed = mix64({p.seed, std::uint64_t(attribute + 1), std::uint64_t(g) + 1});
    WeightedCoreset part = subset_coreset(env, wc, subset, gp, trace);
    for (CoresetEntry e : part.entries) {
      e.attribute = attribute;
      e.group = g;
      out.entries.push_back(std::move(e));
    }
  }
  return out;
}

}  // namespace wsc
