#include "wsc/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "wsc/error.hpp"
#include "wsc/eval.hpp"
#include "wsc/fair_coreset.hpp"
#include "wsc/rng.hpp"
#include "wsc/weak_clustering.hpp"

namespace wsc {

namespace {

nlohmann::json blobs_to_json(const BlobsSpec& b) {
  nlohmann::json j;
  j["sizes"] = b.sizes;
  j["dim"] = b.dim;
  j["spread"] = b.spread;
  j["separation"] = b.separation;
  j["groups"] = b.groups;
  j["group_skew"] = b.group_skew;
  j["cluster_attribute"] = b.cluster_attribute;
  j["seed"] = b.seed;
  return j;
}

BlobsSpec blobs_from_json(const nlohmann::json& j) {
  BlobsSpec b;
  if (j.contains("sizes")) b.sizes = j["sizes"].get<std::vector<int>>();
  if (j.contains("dim")) b.dim = j["dim"].get<int>();
  if (j.contains("spread")) b.spread = j["spread"].get<double>();
  if (j.contains("separation")) b.separation = j["separation"].get<double>();
  if (j.contains("groups")) b.groups = j["groups"].get<int>();
  if (j.contains("group_skew")) b.group_skew = j["group_skew"].get<double>();
  if (j.contains("cluster_attribute")) b.cluster_attribute = j["cluster_attribute"].get<bool>();
  if (j.contains("seed")) b.seed = j["seed"].get<std::uint64_t>();
  return b;
}

double mean_of(const std::vector<double>& v) {
  if (v.empty()) return 0;
  double s = 0;
  for (double x : v) s += x;
  return s / double(v.size());
}

double stderr_of(const std::vector<double>& v) {
  if (v.size() < 2) return 0;
  const double m = mean_of(v);
  double s = 0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / double(v.size() - 1)) / std::sqrt(double(v.size()));
}

std::string format_number(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

}  // namespace

nlohmann::json ExperimentSpec::to_json() const {
  nlohmann::json j;
  j["dataset_csv"] = dataset_csv;
  j["csv_group_columns"] = csv_group_columns;
  j["blobs"] = blobs_to_json(blobs);
  j["subsample"] = subsample;
  j["k_values"] = k_values;
  j["z"] = z;
  j["epsilon"] = epsilon;
  j["coreset_size"] = coreset_size;
  j["methods"] = methods;
  j["repetitions"] = repetitions;
  j["corruption_prob"] = corruption_prob;
  j["adversary"] = adversary;
  j["fairness_attribute"] = fairness_attribute;
  j["alpha"] = alpha;
  j["beta"] = beta;
  j["desk_divisor"] = desk_divisor;
  j["cm_constant"] = cm_constant;
  j["weak_passes"] = weak_passes;
  j["weak_rounds"] = weak_rounds;
  j["seed"] = seed;
  j["output"] = output;
  return j;
}

ExperimentSpec ExperimentSpec::from_json(const nlohmann::json& j) {
  ExperimentSpec s;
  if (j.contains("dataset_csv")) s.dataset_csv = j["dataset_csv"].get<std::string>();
  if (j.contains("csv_group_columns"))
    s.csv_group_columns = j["csv_group_columns"].get<std::vector<std::string>>();
  if (j.contains("blobs")) s.blobs = blobs_from_json(j["blobs"]);
  if (j.contains("subsample")) s.subsample = j["subsample"].get<int>();
  if (j.contains("k_values")) s.k_values = j["k_values"].get<std::vector<int>>();
  if (j.contains("z")) s.z = j["z"].get<double>();
  if (j.contains("epsilon")) s.epsilon = j["epsilon"].get<double>();
  if (j.contains("coreset_size")) s.coreset_size = j["coreset_size"].get<int>();
  if (j.contains("methods")) s.methods = j["methods"].get<std::vector<std::string>>();
  if (j.contains("repetitions")) s.repetitions = j["repetitions"].get<int>();
  if (j.contains("corruption_prob")) s.corruption_prob = j["corruption_prob"].get<double>();
  if (j.contains("adversary")) s.adversary = j["adversary"].get<std::string>();
  if (j.contains("fairness_attribute"))
    s.fairness_attribute = j["fairness_attribute"].get<int>();
  if (j.contains("alpha")) s.alpha = j["alpha"].get<double>();
  if (j.contains("beta")) s.beta = j["beta"].get<double>();
  if (j.contains("desk_divisor")) s.desk_divisor = j["desk_divisor"].get<double>();
  if (j.contains("cm_constant")) s.cm_constant = j["cm_constant"].get<double>();
  if (j.contains("weak_passes")) s.weak_passes = j["weak_passes"].get<int>();
  if (j.contains("weak_rounds")) s.weak_rounds = j["weak_rounds"].get<int>();
  if (j.contains("seed")) s.seed = j["seed"].get<std::uint64_t>();
  if (j.contains("output")) s.output = j["output"].get<std::string>();
  return s;
}

nlohmann::json ExperimentReport::to_json() const {
  nlohmann::json j;
  j["spec"] = spec;
  j["failures"] = failures;
  j["cells"] = nlohmann::json::array();
  for (const auto& c : cells) {
    nlohmann::json cj;
    cj["k"] = c.k;
    cj["method"] = c.method;
    cj["plain"] = {{"mean", c.plain_mean}, {"stderr", c.plain_stderr}, {"values", c.plain_rel}};
    cj["fair"] = {{"mean", c.fair_mean}, {"stderr", c.fair_stderr}, {"values", c.fair_rel}};
    cj["mean_entries"] = c.mean_entries;
    cj["ledger"] = {{"mean_strong", c.mean_strong}, {"mean_weak", c.mean_weak}};
    j["cells"].push_back(cj);
  }
  return j;
}

std::string ExperimentReport::to_csv() const {
  std::string out = "k,method,metric,mean,stderr\n";
  for (const auto& c : cells) {
    out += std::to_string(c.k) + "," + c.method + ",plain," + format_number(c.plain_mean) + "," +
           format_number(c.plain_stderr) + "\n";
    out += std::to_string(c.k) + "," + c.method + ",fair," + format_number(c.fair_mean) + "," +
           format_number(c.fair_stderr) + "\n";
  }
  return out;
}

void write_text_atomic(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open for writing: " + tmp);
    out.write(content.data(), std::streamsize(content.size()));
    if (!out) throw Error("short write: " + tmp);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) throw Error("rename failed: " + path);
}

ExperimentReport run_experiment(const ExperimentSpec& spec) {
  if (spec.repetitions < 1) throw PreconditionError("repetitions must be at least 1");
  for (int k : spec.k_values)
    if (k < 1) throw PreconditionError("k values must be at least 1");
  if (spec.methods.empty()) throw PreconditionError("need at least one method");

  Dataset ds;
  if (!spec.dataset_csv.empty()) {
    CsvSchema schema;
    schema.group_columns = spec.csv_group_columns;
    ds = load_dataset(spec.dataset_csv, schema);
  } else {
    ds = gaussian_blobs(spec.blobs);
  }
  if (spec.subsample > 0 && spec.subsample < ds.size()) {
    const std::vector<int> idx =
        meyerson_subsample(ds, spec.subsample, mix64({spec.seed, 0x53554253ULL}));
    ds = subset_dataset(ds, idx);
  }
  const int n = ds.size();

  ExperimentReport report;
  report.spec = spec.to_json();

  const bool want_fair =
      spec.fairness_attribute >= 0 && spec.fairness_attribute < ds.attribute_count();
  if (!want_fair)
    report.failures.push_back("fairness attribute unavailable; fair metric skipped");
  std::vector<int> group_of_point;
  eval::FairSpec fair_spec;
  if (want_fair) {
    const int a = spec.fairness_attribute;
    group_of_point.resize(size_t(n));
    for (int i = 0; i < n; ++i) group_of_point[size_t(i)] = ds.group_of(i, a);
    fair_spec.alpha.assign(size_t(ds.group_count(a)), spec.alpha);
    fair_spec.beta.assign(size_t(ds.group_count(a)), spec.beta);
  }

  const std::vector<int> all = eval::all_points(ds);
  const std::vector<double> ds_weights = eval::dataset_weights(ds);
  const Adversary adv = adversary_from_name(spec.adversary);

  for (int k : spec.k_values) {
    if (k > n) {
      report.failures.push_back("k=" + std::to_string(k) + " exceeds dataset size; skipped");
      continue;
    }
    ExactClusteringParams ep;
    ep.k = k;
    ep.z = spec.z;
    ep.seed = mix64({spec.seed, 0x4556414cULL, std::uint64_t(k)});
    const std::vector<int> centers = exact_clustering(ds, ep).centers;

    const double plain_x = eval::clustering_cost(ds, all, ds_weights, centers, spec.z);
    if (!(plain_x > 1e-12)) {
      report.failures.push_back("k=" + std::to_string(k) + ": dataset cost degenerate; skipped");
      continue;
    }
    double fair_x = 0;
    bool fair_here = want_fair;
    if (want_fair) {
      const eval::CostReport r =
          eval::fair_cost(ds, all, ds_weights, group_of_point, centers, spec.z, fair_spec);
      if (r.feasible() && r.cost > 1e-12) {
        fair_x = r.cost;
      } else {
        fair_here = false;
        report.failures.push_back("k=" + std::to_string(k) +
                                  ": dataset-side fair assignment infeasible or degenerate");
      }
    }

    for (size_t mi = 0; mi < spec.methods.size(); ++mi) {
      const std::string& method = spec.methods[size_t(mi)];
      ExperimentCell cell;
      cell.k = k;
      cell.method = method;
      std::vector<double> entries_counts, strongs, weaks;

      for (int rep = 0; rep < spec.repetitions; ++rep) {
        const std::uint64_t run_seed =
            mix64({spec.seed, std::uint64_t(k), std::uint64_t(mi) + 1, std::uint64_t(rep) + 1});
        try {
          WeightedCoreset cs;
          double strong_used = 0, weak_used = 0;
          if (method == "uniform-baseline") {
            cs = uniform_baseline(ds, std::min(spec.coreset_size, n), run_seed);
          } else if (method == "ours-unconstrained" || method == "ours-fair") {
            OracleConfig oc;
            oc.corruption_prob = spec.corruption_prob;
            oc.adversary = adv;
            oc.seed = run_seed;
            OracleEnv env(ds, oc);
            WeakClusteringParams wp;
            wp.k = k;
            wp.z = spec.z;
            wp.rounds = spec.weak_rounds;
            wp.passes = spec.weak_passes;
            wp.seed = mix64({run_seed, 1});
            const WeakClustering wc = weak_clustering(env, wp);
            if (method == "ours-unconstrained") {
              CoresetParams cp =
                  CoresetParams::desk(n, k, spec.z, spec.epsilon, 2.0, spec.desk_divisor);
              cp.seed = mix64({run_seed, 2});
              cs = ring_coreset(env, wc, cp);
            } else {
              if (!want_fair) throw PreconditionError("ours-fair needs a fairness attribute");
              FairParams fp = FairParams::desk(n, k, spec.z, spec.epsilon, 2.0,
                                               spec.desk_divisor, spec.cm_constant);
              fp.seed = mix64({run_seed, 3});
              cs = fair_coreset(env, wc, spec.fairness_attribute, fp);
            }
            strong_used = double(env.ledger().total.strong_points);
            weak_used = double(env.ledger().total.weak);
          } else {
            throw PreconditionError("unknown method: " + method);
          }

          const std::vector<int> pts = cs.points();
          const std::vector<double> ws = cs.weights();
          const double plain_s = eval::clustering_cost(ds, pts, ws, centers, spec.z);
          cell.plain_rel.push_back(std::abs(plain_x - plain_s) / plain_x);
          if (fair_here) {
            std::vector<int> gs(pts.size());
            for (size_t i = 0; i < pts.size(); ++i)
              gs[i] = ds.group_of(pts[i], spec.fairness_attribute);
            const eval::CostReport r =
                eval::fair_cost(ds, pts, ws, gs, centers, spec.z, fair_spec);
            if (r.feasible()) {
              cell.fair_rel.push_back(std::abs(fair_x - r.cost) / fair_x);
            } else {
              // full miss: the coreset cannot meet the share bounds at all
              cell.fair_rel.push_back(1.0);
              report.failures.push_back("k=" + std::to_string(k) + " " + method + " rep " +
                                        std::to_string(rep) + ": coreset-side fair infeasible");
            }
          }
          entries_counts.push_back(double(cs.entries.size()));
          strongs.push_back(strong_used);
          weaks.push_back(weak_used);
        } catch (const Error& e) {
          report.failures.push_back("k=" + std::to_string(k) + " " + method + " rep " +
                                    std::to_string(rep) + ": " + e.what());
        }
      }

      cell.plain_mean = mean_of(cell.plain_rel);
      cell.plain_stderr = stderr_of(cell.plain_rel);
      cell.fair_mean = mean_of(cell.fair_rel);
      cell.fair_stderr = stderr_of(cell.fair_rel);
      cell.mean_entries = mean_of(entries_counts);
      cell.mean_strong = mean_of(strongs);
      cell.mean_weak = mean_of(weaks);
      report.cells.push_back(std::move(cell));
    }
  }

  if (!spec.output.empty()) {
    write_text_atomic(spec.output + ".json", report.to_json().dump(2) + "\n");
    write_text_atomic(spec.output + ".csv", report.to_csv());
  }
  return report;
}

}  // namespace wsc
