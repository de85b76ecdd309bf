#include "wsc/oracle.hpp"

#include <algorithm>
#include <cmath>

#include "wsc/error.hpp"

namespace wsc {

namespace {
constexpr std::uint64_t kCorruptTag = 0xC0FFEE01;
constexpr std::uint64_t kValueTag = 0xC0FFEE02;
constexpr std::uint64_t kPermuteTagA = 0xC0FFEE03;
constexpr std::uint64_t kPermuteTagB = 0xC0FFEE04;

std::uint64_t pair_key(int i, int j) {
  if (i > j) std::swap(i, j);
  return (std::uint64_t(std::uint32_t(i)) << 32) | std::uint32_t(j);
}

double unit_real(std::uint64_t h) { return double(h >> 11) * 0x1.0p-53; }
}  // namespace

Adversary adversary_from_name(const std::string& name) {
  if (name == "small-value") return Adversary::small_value;
  if (name == "zero") return Adversary::zero;
  if (name == "huge") return Adversary::huge_value;
  if (name == "uniform-random") return Adversary::uniform_random;
  if (name == "permuted-true") return Adversary::permuted_true;
  throw PreconditionError("unknown adversary '" + name + "'");
}

std::string adversary_name(Adversary a) {
  switch (a) {
    case Adversary::small_value: return "small-value";
    case Adversary::zero: return "zero";
    case Adversary::huge_value: return "huge";
    case Adversary::uniform_random: return "uniform-random";
    case Adversary::permuted_true: return "permuted-true";
  }
  return "?";
}

std::string phase_name(Phase p) {
  switch (p) {
    case Phase::other: return "other";
    case Phase::weak_clustering: return "weak-clustering";
    case Phase::coreset_loop: return "coreset-loop";
    case Phase::estimator: return "estimator";
  }
  return "?";
}

nlohmann::json QueryLedger::to_json() const {
  auto counts = [](const PhaseCounts& c) {
    return nlohmann::json{{"weak", c.weak},
                          {"strong_points", c.strong_points},
                          {"strong_pairs", c.strong_pairs}};
  };
  nlohmann::json ph = nlohmann::json::object();
  // Canonical phases always present for a stable schema.
  for (Phase p : {Phase::weak_clustering, Phase::coreset_loop, Phase::estimator}) {
    auto it = phases.find(phase_name(p));
    ph[phase_name(p)] = counts(it == phases.end() ? PhaseCounts{} : it->second);
  }
  for (const auto& [name, c] : phases)
    if (!ph.contains(name)) ph[name] = counts(c);
  nlohmann::json j = counts(total);
  j["phases"] = ph;
  return j;
}

OracleEnv::OracleEnv(const Dataset& ds, OracleConfig cfg)
    : ds_(&ds), cfg_(cfg), n_(ds.size()), strong_points_(ds.size(), 0) {
  if (cfg_.corruption_prob < 0 || cfg_.corruption_prob >= 0.5)
    throw PreconditionError("corruption probability must be in [0, 0.5)");
  // 8 KiB per thousand points; beyond this the hash-set spill takes over.
  if (n_ <= 16384) weak_seen_bits_.assign(std::size_t(n_) * std::size_t(n_), false);
}

bool OracleEnv::first_weak_issue(std::uint64_t key) {
  if (!weak_seen_bits_.empty()) {
    std::size_t at = std::size_t(key >> 32) * std::size_t(n_) + std::size_t(key & 0xffffffffu);
    if (weak_seen_bits_[at]) return false;
    weak_seen_bits_[at] = true;
    return true;
  }
  return weak_seen_.insert(key).second;
}

void OracleEnv::check_index(int i, const char* what) const {
  if (i < 0 || i >= n_)
    throw PreconditionError(std::string(what) + " index " + std::to_string(i) +
                            " out of range for n=" + std::to_string(n_));
}

PhaseCounts& OracleEnv::phase_counts() { return ledger_.phases[phase_name(phase_)]; }

double OracleEnv::corrupted_value(std::uint64_t key, double truth) const {
  switch (cfg_.adversary) {
    case Adversary::small_value:
    case Adversary::zero:
      return 0.0;
    case Adversary::huge_value:
      return 1e3 * (truth + 1.0);
    case Adversary::uniform_random:
      return unit_real(mix64({cfg_.seed, kValueTag, key})) * 2.0 * (truth + 1.0);
    case Adversary::permuted_true: {
      int a = int(mix64({cfg_.seed, kPermuteTagA, key}) % std::uint64_t(n_));
      int b = int(mix64({cfg_.seed, kPermuteTagB, key}) % std::uint64_t(n_));
      if (a == b) b = (b + 1) % n_;
      return ds_->distance(a, b);
    }
  }
  return 0.0;
}

double OracleEnv::weak_query(int i, int j) {
  check_index(i, "weak query");
  check_index(j, "weak query");
  if (i == j) return 0.0;
  std::uint64_t key = pair_key(i, j);
  double truth = ds_->distance(i, j);
  bool corrupted = unit_real(mix64({cfg_.seed, kCorruptTag, key})) < cfg_.corruption_prob;
  double answer = corrupted ? corrupted_value(key, truth) : truth;
  std::lock_guard<std::mutex> lock(mu_);
  if (first_weak_issue(key)) {
    ledger_.total.weak += 1;
    phase_counts().weak += 1;
  }
  return answer;
}

void OracleEnv::strong_point_query(int i) {
  check_index(i, "strong point query");
  std::lock_guard<std::mutex> lock(mu_);
  if (strong_points_[i]) return;
  strong_points_[i] = 1;
  ledger_.total.strong_points += 1;
  phase_counts().strong_points += 1;
}

double OracleEnv::strong_pair_query(int i, int j) {
  check_index(i, "strong pair query");
  check_index(j, "strong pair query");
  if (i == j) return 0.0;
  std::lock_guard<std::mutex> lock(mu_);
  std::uint64_t key = pair_key(i, j);
  if (strong_pairs_.insert(key).second) {
    ledger_.total.strong_pairs += 1;
    phase_counts().strong_pairs += 1;
  }
  return ds_->distance(i, j);
}

bool OracleEnv::strong_point_known(int i) const {
  check_index(i, "strong point lookup");
  std::lock_guard<std::mutex> lock(mu_);
  return strong_points_[i] != 0;
}

bool OracleEnv::pair_known(int i, int j) const {
  check_index(i, "pair lookup");
  check_index(j, "pair lookup");
  if (i == j) return true;
  std::lock_guard<std::mutex> lock(mu_);
  return strong_pairs_.count(pair_key(i, j)) > 0;
}

double OracleEnv::exact_distance(int i, int j) const {
  check_index(i, "exact distance");
  check_index(j, "exact distance");
  if (i == j) return 0.0;
  {
    std::lock_guard<std::mutex> lock(mu_);
    bool allowed = (strong_points_[i] && strong_points_[j]) ||
                   strong_pairs_.count(pair_key(i, j)) > 0;
    if (!allowed)
      throw PermissionError("exact distance for (" + std::to_string(i) + "," + std::to_string(j) +
                            ") requires strong queries on both points or on the pair");
  }
  return ds_->distance(i, j);
}

int OracleEnv::default_sample_floor() const {
  return cfg_.sample_floor > 0 ? cfg_.sample_floor : 10 * ceil_log2(n_);
}

double estimate_distance_to_set(OracleEnv& env, int x, std::span<const int> s, double r_s,
                                int min_size) {
  if (s.empty()) throw PreconditionError("estimate_distance_to_set: empty anchor set");
  if (r_s < 0) throw PreconditionError("estimate_distance_to_set: negative diameter bound");
  int floor = min_size >= 0 ? min_size : env.default_sample_floor();
  if (int(s.size()) < floor)
    throw PreconditionError("estimate_distance_to_set: |S|=" + std::to_string(s.size()) +
                            " below the sample floor " + std::to_string(floor));
  bool all_points = true;
  for (int p : s)
    if (!env.strong_point_known(p)) {
      all_points = false;
      break;
    }
  if (!all_points) {
    for (size_t a = 0; a < s.size(); ++a)
      for (size_t b = a + 1; b < s.size(); ++b)
        if (!env.pair_known(s[a], s[b]))
          throw PreconditionError(
              "estimate_distance_to_set: anchors must be strongly known, as points or pairwise");
  }
  PhaseScope scope(env, Phase::estimator);
  std::vector<double> answers;
  answers.reserve(s.size());
  for (int p : s) answers.push_back(env.weak_query(x, p));
  std::nth_element(answers.begin(), answers.begin() + (answers.size() - 1) / 2, answers.end());
  double med = answers[(answers.size() - 1) / 2];
  return med < 0 ? 0.0 : med;
}

}  // namespace wsc
