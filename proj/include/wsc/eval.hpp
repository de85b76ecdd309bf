#pragma once

#include <cstdint>
#include <span>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "wsc/dataset.hpp"
#include "wsc/simplex.hpp"

namespace wsc::eval {

// Sum of w(x) * d(x, C)^z under nearest-center assignment.
double clustering_cost(const Dataset& ds, std::span<const int> points,
                       std::span<const double> weights, std::span<const int> centers, double z);

std::vector<int> nearest_center(const Dataset& ds, std::span<const int> points,
                                std::span<const int> centers);

// Every index of the dataset with its stored weight.
std::vector<int> all_points(const Dataset& ds);
std::vector<double> dataset_weights(const Dataset& ds);

// Solver outcome for a constrained assignment: optimal cost, the realized
// fractional assignment as (point index, center index, mass) triples, and
// the cost charged to each center (aligned with the centers span).
struct CostReport {
  lp::SolveStatus status = lp::SolveStatus::infeasible;
  double cost = 0;
  std::vector<double> per_center;
  std::vector<std::tuple<int, int, double>> sigma;

  bool feasible() const { return status == lp::SolveStatus::optimal; }
  nlohmann::json to_json() const;
};

// Minimum-cost fractional assignment that delivers exactly gamma[j] mass to
// centers[j]. Requires sum(gamma) == sum(weights) up to 1e-6 relative slack;
// the drift is folded into the largest demand. Solved exactly on integers:
// near-integral inputs are used as-is, everything else is scaled by 1e6, and
// the reported cost is rebuilt from the plan with unrounded distances.
CostReport constrained_cost(const Dataset& ds, std::span<const int> points,
                            std::span<const double> weights, std::span<const int> centers,
                            double z, std::span<const double> gamma);

// Per-group share bounds on every center's incoming mass: group g must make
// up a fraction in [alpha[g], beta[g]] of each center.
struct FairSpec {
  std::vector<double> alpha;  // lower share bound per group
  std::vector<double> beta;   // upper share bound per group
};

// Optimal fair assignment cost for fixed centers: each point splits its
// weight across centers subject to the per-center share bounds. `group` is
// aligned with `points`. Coincident points of equal group are solved as one
// merged column (the value is unchanged), so sigma reports their combined
// mass on the first point of each such class.
CostReport fair_cost(const Dataset& ds, std::span<const int> points,
                     std::span<const double> weights, std::span<const int> group,
                     std::span<const int> centers, double z, const FairSpec& spec);

// Exact optimum over all k-subsets of `candidates` under nearest assignment.
// Refuses instances with more than `subset_cap` subsets.
double brute_force_opt(const Dataset& ds, std::span<const int> points,
                       std::span<const double> weights, std::span<const int> candidates, int k,
                       double z, std::vector<int>* best_centers = nullptr,
                       long long subset_cap = 2000000);

struct VerifyOptions {
  int k = 2;
  double z = 1;
  double eps = 0.5;
  long long exhaustive_cap = 200000;  // center sets; sampled probes above this
  int sample_sets = 200;
  int gamma_sets = 0;   // center sets that additionally get constrained probes
  int gamma_grid = 5;   // constrained probes per such center set
  std::uint64_t seed = 1;
};

struct Witness {
  std::vector<int> centers;
  std::vector<double> gamma;  // empty for an unconstrained probe
  double coreset_cost = 0;
  double full_cost = 0;
  double rel_dev = 0;
};

struct VerifyReport {
  bool pass = false;
  double max_rel_dev = 0;
  long long probes = 0;
  bool exhaustive = false;
  std::vector<Witness> worst;  // up to five, largest deviation first
  nlohmann::json to_json() const;
};

// Probes |cost_S(C, gamma) - cost_X(C, gamma)| / cost_X(C, gamma) over center
// sets drawn from the dataset (all k-subsets when few enough, random
// otherwise) and optional integer mass profiles gamma; passes when every
// probed deviation is at most eps.
VerifyReport verify_coreset(const Dataset& ds, std::span<const int> coreset_points,
                            std::span<const double> coreset_weights, const VerifyOptions& opt);

}  // namespace wsc::eval
