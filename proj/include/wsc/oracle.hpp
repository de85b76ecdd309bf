#pragma once

#include <cstdint>
#include <map>
#include <mutex>
#include <span>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "wsc/dataset.hpp"
#include "wsc/rng.hpp"

namespace wsc {

// What a corrupted weak answer looks like. small_value mirrors the classic
// stress case (claim the pair is at distance zero); zero is its explicit
// alias; the others probe different failure shapes.
enum class Adversary { small_value, zero, huge_value, uniform_random, permuted_true };

Adversary adversary_from_name(const std::string& name);
std::string adversary_name(Adversary a);

enum class Phase { other, weak_clustering, coreset_loop, estimator };
std::string phase_name(Phase p);

struct PhaseCounts {
  long long weak = 0;
  long long strong_points = 0;
  long long strong_pairs = 0;
};

struct QueryLedger {
  PhaseCounts total;
  std::map<std::string, PhaseCounts> phases;
  nlohmann::json to_json() const;
};

struct OracleConfig {
  double corruption_prob = 1.0 / 3.0;
  Adversary adversary = Adversary::small_value;
  std::uint64_t seed = 0;
  // 0: estimator floor defaults to 10 * ceil(log2 n).
  int sample_floor = 0;
};

// Simulated weak/strong distance oracle over a dataset.
//
// Weak answers: with probability 1 - corruption_prob the true distance,
// otherwise an adversarial value. Whether a pair is corrupted, and what the
// corrupted value is, are pure functions of (seed, pair), so the randomness
// of each pair is drawn exactly once and repeated queries return the same
// answer; only the first query of a pair is charged to the ledger.
//
// Strong queries reveal exact distances: a point query unlocks exact
// distances to every other strongly queried point, a pair query unlocks that
// single pair. exact_distance() enforces those permissions.
class OracleEnv {
 public:
  OracleEnv(const Dataset& ds, OracleConfig cfg);

  int size() const { return n_; }
  const Dataset& dataset() const { return *ds_; }
  const OracleConfig& config() const { return cfg_; }

  double weak_query(int i, int j);
  void strong_point_query(int i);
  double strong_pair_query(int i, int j);

  bool strong_point_known(int i) const;
  bool pair_known(int i, int j) const;
  double exact_distance(int i, int j) const;

  Phase phase() const { return phase_; }
  void set_phase(Phase p) { phase_ = p; }

  const QueryLedger& ledger() const { return ledger_; }
  int default_sample_floor() const;

 private:
  void check_index(int i, const char* what) const;
  double corrupted_value(std::uint64_t pair_key, double truth) const;
  PhaseCounts& phase_counts();

  bool first_weak_issue(std::uint64_t key);

  const Dataset* ds_;
  OracleConfig cfg_;
  int n_;
  Phase phase_ = Phase::other;
  QueryLedger ledger_;
  // First-issue tracking only; answers are recomputed from the pair hash.
  // Dense bitmap for moderate n, spill to a hash set for very large inputs.
  std::vector<bool> weak_seen_bits_;
  std::unordered_set<std::uint64_t> weak_seen_;
  std::vector<char> strong_points_;
  std::unordered_set<std::uint64_t> strong_pairs_;
  mutable std::mutex mu_;
};

// Scoped phase tag for ledger attribution.
class PhaseScope {
 public:
  PhaseScope(OracleEnv& env, Phase p) : env_(env), prev_(env.phase()) { env_.set_phase(p); }
  ~PhaseScope() { env_.set_phase(prev_); }

 private:
  OracleEnv& env_;
  Phase prev_;
};

// Median of the weak answers {weak_query(x, s) : s in S}, clamped at zero.
// Requires every member of S to be strongly known (as points, or pairwise via
// pair queries) and |S| >= min_size (default: env.default_sample_floor()).
// r_s is the caller's bound on diam(S); with an honest majority of answers
// the result lands within [d(x,S), d(x,S) + r_s].
double estimate_distance_to_set(OracleEnv& env, int x, std::span<const int> s, double r_s,
                                int min_size = -1);

}  // namespace wsc
