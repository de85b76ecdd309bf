#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "wsc/coreset.hpp"

namespace wsc {

struct FairParams {
  int k = 2;
  double z = 1;
  double eps = 0.5;
  double c0 = 1;                // ring growth F = 2 * c0
  int sample_size = 13;         // strong draws per iteration
  double heavy_fraction = 0.4;  // of sample_size; smallest such ring wins
  int batch_size = 16;          // with-replacement draws representing a batch
  int max_iters = 40;
  int peel_cap = 0;  // anchors kept for removal estimates; 0 = 10 ceil_log2(n)
  std::uint64_t seed = 1;

  static FairParams desk(int n, int k, double z, double eps, double lambda = 2,
                         double divisor = 320, double cm = 1.0);
  static FairParams paper(int n, int k, double z, double eps);
};

// Equal shares of an integer total, off by at most one so the shares sum to
// the total exactly: the first (total mod parts) shares round up.
std::vector<double> integer_split(long long total, int parts);

// Coreset of one subset of the points, built per center: each iteration
// peels everything the estimator places inside the smallest heavy ring and
// represents that batch by uniform with-replacement draws whose weights sum
// to the batch size exactly, so the subset's total weight is preserved.
// Small batches and exhausted runs fall back to exact entries.
WeightedCoreset subset_coreset(OracleEnv& env, const WeakClustering& wc,
                               std::span<const int> subset, const FairParams& p,
                               RunTrace* trace = nullptr);

// Union of per-group subset runs, entries tagged with (attribute, group):
// every group keeps its exact mass, which is what makes the union usable
// under per-group assignment constraints. attribute = -1 runs one subset per
// cell of the common refinement of all attribute partitions, so every
// attribute's per-group masses are preserved at once and the total weight
// still equals the dataset weight. Limited to z = 1; z > 1 runs are exposed
// through subset_coreset directly.
WeightedCoreset fair_coreset(OracleEnv& env, const WeakClustering& wc, int attribute,
                             const FairParams& p, RunTrace* trace = nullptr);

}  // namespace wsc
