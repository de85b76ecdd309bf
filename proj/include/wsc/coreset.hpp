#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "wsc/oracle.hpp"
#include "wsc/weak_clustering.hpp"

namespace wsc {

// Smallest l >= 0 with d <= F^l * R (outer boundary included, slight slack
// for rounding); everything at distance <= R is ring 0.
int ring_index(double d, double R, double F);

// eps shrunk by the factor the guarantee analysis consumes before the ring
// machinery sees it. Off by default; the presets use eps as given.
double rescaled_eps(double eps, double beta, double c0, double z, int n);

struct CoresetParams {
  int k = 2;
  double z = 1;
  double eps = 0.5;
  double c0 = 1;             // ring growth F = 2 * c0
  int sample_size = 32;      // per-center draws each iteration
  int heavy_threshold = 16;  // draws landing in one ring that mark it heavy
  int update_threshold = 4;  // draws required before a ring estimate is emitted
  int max_iters = 40;
  int peel_cap = 0;  // anchors kept for removal estimates; 0 = 10 ceil_log2(n)
  // Weight the whole ring sample instead of only its carrier split. The
  // default carrier split is what the error guarantee certifies; the spread
  // variant exists for A/B comparison.
  bool prose_weighting = false;
  // Meter samples as pair queries against the center instead of point
  // queries; anchor sets are then pair-completed before estimation.
  bool pair_queries = false;
  std::uint64_t seed = 1;

  // Bench-sized preset: fixed small lambda in place of log n and leading
  // constants divided down, with floors keeping every knob meaningful.
  static CoresetParams desk(int n, int k, double z, double eps, double lambda = 2,
                            double divisor = 320);
  // Full-constant preset; impractically large below many thousands of points.
  static CoresetParams paper(int n, int k, double z, double eps);
};

struct CoresetEntry {
  int point = -1;
  double weight = 0;
  int center = -1;  // engine center the mass is charged to
  int ring = -1;
  std::string kind;    // "center", "ring-sample", "batch-sample", "exact", "leftover"
  int attribute = -1;  // set by the fair engine
  int group = -1;
};

struct WeightedCoreset {
  std::vector<CoresetEntry> entries;
  double z = 1;

  double total_weight() const;
  std::vector<int> points() const;
  std::vector<double> weights() const;
  nlohmann::json to_json() const;
};

struct TraceEvent {
  std::string kind;
  nlohmann::json data;
};

struct RunTrace {
  std::vector<TraceEvent> events;
  void add(std::string kind, nlohmann::json data);
  nlohmann::json to_json() const;
};

// One ring's mass estimate from one iteration's sample. The first
// ceil(|S|/3) samples (in drawn order) only feed the count estimate
// m_tilde = 3 * surviving / sample_size * |S_est|; the remaining samples
// carry the mass at weight m_tilde / |S_w| each. With prose_weighting the
// same m_tilde is spread over the whole sample instead.
struct RingUpdate {
  double m_tilde = 0;
  int est_count = 0;
  std::vector<std::pair<int, double>> entries;  // (point, weight)
};

RingUpdate coreset_update(const std::vector<int>& ring_sample, double surviving, int sample_size,
                          int update_threshold, bool prose_weighting = false);

// Coreset by per-center ring sampling: each iteration draws strong samples
// per surviving cluster, emits weight estimates for the sampled rings, and
// peels everything the estimator places inside the current heavy radius.
// Sampled weights are rescaled at the end so every center accounts for
// exactly the points removed around it, which keeps the total weight equal
// to the number of points.
WeightedCoreset ring_coreset(OracleEnv& env, const WeakClustering& wc, const CoresetParams& p,
                             RunTrace* trace = nullptr);

}  // namespace wsc
