#include "wsc/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "wsc/error.hpp"
#include "wsc/rng.hpp"

namespace wsc {

namespace {

std::vector<int> shuffled_indices(Rng& rng, int n) {
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  for (int i = n - 1; i > 0; --i)
    std::swap(perm[i], perm[int(rng.next_below(std::uint64_t(i) + 1))]);
  return perm;
}

std::vector<double> random_direction(Rng& rng, int dim) {
  std::vector<double> v(static_cast<size_t>(dim));
  if (dim == 1) {
    v[0] = rng.next_real() < 0.5 ? -1.0 : 1.0;
    return v;
  }
  double norm = 0;
  do {
    norm = 0;
    for (double& c : v) {
      c = rng.next_gaussian();
      norm += c * c;
    }
  } while (norm <= 1e-30);
  norm = std::sqrt(norm);
  for (double& c : v) c /= norm;
  return v;
}

}  // namespace

Dataset gaussian_blobs(const BlobsSpec& spec) {
  const int blobs = int(spec.sizes.size());
  if (blobs < 1) throw PreconditionError("need at least one blob");
  for (int s : spec.sizes)
    if (s < 0) throw PreconditionError("blob sizes must be nonnegative");
  if (spec.dim < 1) throw PreconditionError("dim must be positive");
  if (spec.spread < 0) throw PreconditionError("spread must be nonnegative");
  if (!(spec.separation > 0)) throw PreconditionError("separation must be positive");
  if (spec.groups < 1) throw PreconditionError("need at least one group");
  if (spec.group_skew < 0 || spec.group_skew > 1)
    throw PreconditionError("group_skew must be in [0, 1]");

  std::vector<std::vector<double>> anchors(size_t(blobs), std::vector<double>(size_t(spec.dim), 0));
  for (int c = 0; c < blobs; ++c) {
    if (spec.dim == 1) {
      anchors[size_t(c)][0] = double(c) * spec.separation;
    } else if (blobs > 1) {
      const double th = 2.0 * 3.14159265358979323846 * double(c) / double(blobs);
      anchors[size_t(c)][0] = spec.separation * std::cos(th);
      anchors[size_t(c)][1] = spec.separation * std::sin(th);
    }
  }

  Rng root(mix64({spec.seed, 0x424c4f42ULL}));
  std::vector<std::vector<double>> pts;
  std::vector<std::string> cluster_label;
  std::vector<std::string> group_label;
  for (int c = 0; c < blobs; ++c) {
    Rng brng = root.derive(std::uint64_t(c) + 1);
    for (int i = 0; i < spec.sizes[size_t(c)]; ++i) {
      std::vector<double> p = anchors[size_t(c)];
      for (double& x : p) x += spec.spread * brng.next_gaussian();
      pts.push_back(std::move(p));
      cluster_label.push_back("c" + std::to_string(c));
      int g = 0;
      if (spec.groups > 1 && brng.next_real() < spec.group_skew)
        g = 1 + int(brng.next_below(std::uint64_t(spec.groups - 1)));
      group_label.push_back("g" + std::to_string(g));
    }
  }
  if (pts.empty()) throw PreconditionError("blob sizes sum to zero");

  Dataset ds = Dataset::from_points(std::move(pts));
  if (spec.cluster_attribute) ds.add_attribute("cluster", cluster_label);
  ds.add_attribute("group", group_label);
  return ds;
}

PlantedRings planted_rings(const RingsSpec& spec) {
  const int centers = int(spec.occupancy.size());
  if (centers < 1) throw PreconditionError("need at least one center");
  if (!(spec.base_radius > 0)) throw PreconditionError("base radius must be positive");
  if (!(spec.factor > 1)) throw PreconditionError("ring factor must exceed 1");
  if (spec.dim < 1) throw PreconditionError("dim must be positive");

  double outermost = spec.base_radius;
  for (const auto& rings : spec.occupancy) {
    for (int c : rings)
      if (c < 0) throw PreconditionError("ring occupancy must be nonnegative");
    if (!rings.empty())
      outermost = std::max(
          outermost, spec.base_radius * std::pow(spec.factor, double(rings.size()) - 1.0));
  }
  const double sep = spec.separation > 0 ? spec.separation : 4.0 * outermost;
  if (sep <= 2.0 * outermost)
    throw PreconditionError("separation must exceed twice the outermost radius");

  PlantedRings out;
  out.base_radius = spec.base_radius;
  out.factor = spec.factor;

  std::vector<std::vector<double>> pts;
  for (int c = 0; c < centers; ++c) {
    std::vector<double> p(size_t(spec.dim), 0.0);
    p[0] = double(c) * sep;
    pts.push_back(std::move(p));
    out.centers.push_back(c);
    out.true_center.push_back(c);
    out.true_ring.push_back(-1);
  }

  Rng root(mix64({spec.seed, 0x52494e47ULL}));
  for (int c = 0; c < centers; ++c) {
    Rng crng = root.derive(std::uint64_t(c) + 1);
    const auto& rings = spec.occupancy[size_t(c)];
    for (int l = 0; l < int(rings.size()); ++l) {
      // mid-ring: half the base radius for ring 0, the geometric middle of
      // the annulus boundaries beyond that
      const double dist = l == 0 ? spec.base_radius / 2.0
                                 : spec.base_radius * std::pow(spec.factor, double(l) - 0.5);
      for (int i = 0; i < rings[size_t(l)]; ++i) {
        std::vector<double> dir = random_direction(crng, spec.dim);
        std::vector<double> p(size_t(spec.dim));
        for (int d = 0; d < spec.dim; ++d) p[size_t(d)] = (d == 0 ? double(c) * sep : 0.0);
        for (int d = 0; d < spec.dim; ++d) p[size_t(d)] += dist * dir[size_t(d)];
        pts.push_back(std::move(p));
        out.true_center.push_back(c);
        out.true_ring.push_back(l);
      }
    }
  }

  out.ds = Dataset::from_points(std::move(pts));
  return out;
}

Dataset duplicate_heavy(int total, int distinct, double spacing, std::uint64_t seed) {
  if (total < 1 || distinct < 1 || distinct > total)
    throw PreconditionError("need 1 <= distinct <= total");
  if (!(spacing > 0)) throw PreconditionError("spacing must be positive");
  std::vector<std::vector<double>> pts;
  pts.reserve(size_t(total));
  for (int i = 0; i < total; ++i) {
    const int loc = i % distinct;
    pts.push_back({double(loc) * spacing, 0.0});
  }
  Rng rng(mix64({seed, 0x44555054ULL}));
  const std::vector<int> perm = shuffled_indices(rng, total);
  std::vector<std::vector<double>> shuffled;
  shuffled.reserve(pts.size());
  for (int i : perm) shuffled.push_back(std::move(pts[size_t(i)]));
  return Dataset::from_points(std::move(shuffled));
}

Dataset imbalanced_pair(const ImbalancedSpec& spec) {
  if (spec.majority < 1 || spec.minority < 1) throw PreconditionError("both clusters need points");
  if (spec.majority_sites < 1 || spec.minority_sites < 1 ||
      spec.majority_sites > spec.majority || spec.minority_sites > spec.minority)
    throw PreconditionError("need 1 <= sites <= cluster size");
  if (!(spec.separation > 0)) throw PreconditionError("separation must be positive");

  auto grid_site = [](int l, double ox) {
    const int side = 6;  // unit-grid rows; sites wrap to the next row
    return std::vector<double>{ox + double(l % side), double(l / side)};
  };
  std::vector<std::vector<double>> pts;
  std::vector<std::string> cluster;
  pts.reserve(size_t(spec.majority + spec.minority));
  for (int i = 0; i < spec.majority; ++i) {
    pts.push_back(grid_site(i % spec.majority_sites, 0.0));
    cluster.push_back("maj");
  }
  for (int i = 0; i < spec.minority; ++i) {
    pts.push_back(grid_site(i % spec.minority_sites, spec.separation));
    cluster.push_back("min");
  }

  Rng rng(mix64({spec.seed, 0x494d4241ULL}));
  const std::vector<int> perm = shuffled_indices(rng, int(pts.size()));
  std::vector<std::vector<double>> spts;
  std::vector<std::string> scluster;
  spts.reserve(pts.size());
  for (int i : perm) {
    spts.push_back(std::move(pts[size_t(i)]));
    scluster.push_back(std::move(cluster[size_t(i)]));
  }
  Dataset ds = Dataset::from_points(std::move(spts));
  ds.add_attribute("cluster", scluster);
  return ds;
}

WeightedCoreset uniform_baseline(const Dataset& ds, int size, std::uint64_t seed) {
  const int n = ds.size();
  if (size < 1 || size > n) throw PreconditionError("sample size must be in [1, n]");
  Rng rng(mix64({seed, 0x554e4946ULL}));
  std::vector<int> perm = shuffled_indices(rng, n);
  perm.resize(size_t(size));
  std::sort(perm.begin(), perm.end());

  WeightedCoreset out;
  const double w = double(n) / double(size);
  for (int x : perm) out.entries.push_back({x, w, -1, -1, "uniform", -1, -1});
  return out;
}

std::vector<int> meyerson_subsample(const Dataset& ds, int target, std::uint64_t seed) {
  const int n = ds.size();
  if (target < 1 || target > n) throw PreconditionError("target must be in [1, n]");
  std::vector<int> all(n);
  std::iota(all.begin(), all.end(), 0);
  if (target == n) return all;

  Rng root(mix64({seed, 0x4d455953ULL}));
  Rng prng = root.derive(1);
  const std::vector<int> perm = shuffled_indices(prng, n);
  Rng crng = root.derive(2);
  std::vector<double> coin(static_cast<size_t>(n));
  for (double& c : coin) c = crng.next_real();

  // One admission coin per point, shared across tau rounds: raising tau only
  // ever shrinks the kept set's admission probabilities, so the tuning walk
  // behaves monotonically.
  auto kept_at = [&](double tau) {
    std::vector<int> s;
    s.push_back(perm[0]);
    for (int i = 1; i < n; ++i) {
      const int x = perm[size_t(i)];
      double d = std::numeric_limits<double>::infinity();
      for (int y : s) d = std::min(d, true_distance(ds, x, y));
      if (coin[size_t(x)] < std::min(1.0, d / tau)) s.push_back(x);
    }
    return s;
  };

  const int lo = std::max(1, int(std::floor(0.8 * double(target))));
  const int hi = int(std::ceil(1.2 * double(target)));
  const double dia = diameter(ds);

  std::vector<int> best;
  if (dia > 0) {
    double tau = dia / (2.0 * double(target));
    for (int step = 0; step < 60; ++step) {
      std::vector<int> s = kept_at(tau);
      if (best.empty() ||
          std::abs(int(s.size()) - target) < std::abs(int(best.size()) - target))
        best = s;
      if (int(s.size()) > hi)
        tau *= 2.0;
      else if (int(s.size()) < lo)
        tau /= 2.0;
      else
        break;
    }
  } else {
    best.push_back(perm[0]);
  }

  if (int(best.size()) > hi) best.resize(size_t(hi));
  if (int(best.size()) < lo) {
    // the admission rule cannot reach the band (duplicate-heavy or tiny
    // effective support): pad with unkept points in stream order
    std::vector<char> in(size_t(n), 0);
    for (int x : best) in[size_t(x)] = 1;
    for (int i = 0; i < n && int(best.size()) < target; ++i) {
      const int x = perm[size_t(i)];
      if (!in[size_t(x)]) {
        in[size_t(x)] = 1;
        best.push_back(x);
      }
    }
  }
  std::sort(best.begin(), best.end());
  return best;
}

Dataset subset_dataset(const Dataset& ds, const std::vector<int>& keep) {
  for (int x : keep)
    if (x < 0 || x >= ds.size()) throw PreconditionError("subset index out of range");
  if (keep.empty()) throw PreconditionError("subset must be nonempty");

  Dataset out;
  if (ds.matrix_backed()) {
    const int m = int(keep.size());
    std::vector<double> row_major(size_t(m) * size_t(m));
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j)
        row_major[size_t(i) * size_t(m) + size_t(j)] = true_distance(ds, keep[size_t(i)], keep[size_t(j)]);
    out = Dataset::from_matrix(m, std::move(row_major), ds.metric());
  } else {
    std::vector<std::vector<double>> pts;
    pts.reserve(keep.size());
    for (int x : keep) pts.push_back(ds.point(x));
    out = Dataset::from_points(std::move(pts), ds.metric());
  }
  for (size_t i = 0; i < keep.size(); ++i) out.set_weight(int(i), ds.weight(keep[size_t(i)]));
  for (int a = 0; a < ds.attribute_count(); ++a) {
    std::vector<std::string> labels;
    labels.reserve(keep.size());
    for (int x : keep) labels.push_back(ds.group_name(a, ds.group_of(x, a)));
    out.add_attribute(ds.attribute_name(a), labels);
  }
  return out;
}

}  // namespace wsc
