#pragma once

#include <cstdint>
#include <vector>

#include "wsc/coreset.hpp"
#include "wsc/dataset.hpp"

namespace wsc {

// Gaussian blobs on a circle (a line for dim = 1), one blob per entry of
// `sizes`. Attribute "cluster" records the generating blob; attribute
// "group" assigns each point group 1 with probability group_skew (group 0
// otherwise) for `groups` = 2, and proportionally thinned higher groups
// beyond that.
struct BlobsSpec {
  std::vector<int> sizes = {30, 30};
  int dim = 2;
  double spread = 1.0;      // per-coordinate gaussian sigma inside a blob
  double separation = 20.0  /* distance scale between blob centers */;
  int groups = 2;
  double group_skew = 0.5;  // probability mass of the non-zero groups
  bool cluster_attribute = true;
  std::uint64_t seed = 1;
};

Dataset gaussian_blobs(const BlobsSpec& spec);

// Exact ring structure around well-separated centers: point counts are
// prescribed per (center, ring) and every planted point sits mid-ring, so
// ring_index recovers the plan exactly. Centers come first in the dataset.
struct RingsSpec {
  std::vector<std::vector<int>> occupancy = {{20, 20, 20}};  // [center][ring]
  double base_radius = 1.0;  // ring 0 reaches base_radius
  double factor = 2.0;       // ring growth; must exceed 1
  double separation = 0.0;   // center spacing; 0 = 4x the outermost radius
  int dim = 2;
  std::uint64_t seed = 1;
};

struct PlantedRings {
  Dataset ds;
  std::vector<int> centers;      // dataset indices of the planted centers
  std::vector<int> true_center;  // per point: planted center
  std::vector<int> true_ring;    // per point: planted ring (-1 for centers)
  double base_radius = 1.0;
  double factor = 2.0;
};

PlantedRings planted_rings(const RingsSpec& spec);

// `total` points spread over `distinct` coordinate locations as evenly as
// the split allows; location l sits at (l * spacing, 0, ...).
Dataset duplicate_heavy(int total, int distinct, double spacing = 10.0, std::uint64_t seed = 1);

// Imbalanced two-cluster instance with duplicated sites: `majority` points
// over `majority_sites` unit-grid locations around the origin, `minority`
// points over `minority_sites` locations around (separation, 0). Attribute
// "cluster" has groups maj / min, so share bounds protect the minority.
// Duplicated sites keep exact fair evaluation cheap at these sizes.
struct ImbalancedSpec {
  int majority = 1800;
  int minority = 200;
  int majority_sites = 30;
  int minority_sites = 10;
  double separation = 60.0;
  std::uint64_t seed = 1;
};

Dataset imbalanced_pair(const ImbalancedSpec& spec);

// Uniform sample without replacement, every entry weighted n / size.
WeightedCoreset uniform_baseline(const Dataset& ds, int size, std::uint64_t seed);

// Size-targeted distance-biased subsample: stream in random order, keep each
// point with probability min(1, d(x, kept) / tau), and auto-tune tau until
// the kept count lands within 20% of `target`. Degenerate streams that can
// never reach the band (duplicate-heavy data) are padded with uniform extras
// up to `target`. Returns sorted dataset indices.
std::vector<int> meyerson_subsample(const Dataset& ds, int target, std::uint64_t seed);

// New dataset holding the given points of `ds` (weights and attributes kept,
// in index order).
Dataset subset_dataset(const Dataset& ds, const std::vector<int>& keep);

}  // namespace wsc
