#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "wsc/oracle.hpp"

namespace wsc {

struct WeakClusteringParams {
  int k = 2;
  double z = 1;
  int rounds = 0;  // facility-cost grid values per pass; 0 = 1 + ceil_log2(n)
  int passes = 0;  // independent restarts; 0 = ceil_log2(n)
  int facility_cap = 0;     // open facilities per grid value; 0 = 2k(1 + ceil_log2(n))
  int verify_samples = 0;   // strong scale/cost probes; 0 = 4 ceil_log2(n)
  double grid_factor = 4;   // ratio between adjacent facility-cost grid values
  std::uint64_t seed = 1;
};

struct WeakClustering {
  std::vector<int> centers;     // dataset indices, strong-queried, distinct
  std::vector<int> assignment;  // per dataset point, index into centers
  double z = 1;
  double est_cost = 0;      // sum over points of the (estimate-or-exact) assigned distance^z
  double claimed_beta = 2;  // approximation factor the caller may divide by
  int facilities_opened = 0;
  int winning_pass = 0;
};

// Facility-location clustering against the query oracle. Points are touched
// through weak queries only, except that opened facilities and a small verify
// sample get strong point queries; everything runs under the weak-clustering
// ledger phase. Candidate solutions are ranked by their exact cost on the
// strong verify sample, so adversarial weak answers cannot promote a bad run.
// The facility-cost grid is swept center-outward and each grid value's
// randomness depends only on (pass, grid position), so enlarging `rounds`
// only ever adds candidates: quality is monotone in `rounds` on a fixed seed.
// Weights on the dataset are ignored: the oracle model is per-point, and
// multiplicity is expressed by duplicating points.
WeakClustering weak_clustering(OracleEnv& env, const WeakClusteringParams& p);

struct ExactClusteringParams {
  int k = 2;
  double z = 1;
  int restarts = 3;
  int max_iters = 20;
  double claimed_beta = 2;
  std::uint64_t seed = 1;
};

// Plug-in solver on the true metric (no oracle involved): cost-weighted
// seeding plus medoid refinement. Used as an evaluation-side reference input
// where a clustering with a known cost is needed.
WeakClustering exact_clustering(const Dataset& ds, const ExactClusteringParams& p);

// Lowest consistency-filtered weak distance from x to a set of strong points:
// answers that fail triangle checks against the exact inter-member distances
// for at least half of the members are discarded. Returns {value, argmin}.
std::pair<double, int> filtered_min_distance(OracleEnv& env, int x, std::span<const int> members);

}  // namespace wsc
