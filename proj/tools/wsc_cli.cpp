// Command-line front end: synthetic data, coreset builds, exact evaluation,
// verification sweeps, comparative experiments, and query-ledger dumps.
// Every subcommand is deterministic for a fixed --seed (WSC_SEED overrides
// the default when the flag is absent) and prints one JSON document.
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "wsc/coreset.hpp"
#include "wsc/error.hpp"
#include "wsc/eval.hpp"
#include "wsc/experiment.hpp"
#include "wsc/fair_coreset.hpp"
#include "wsc/oracle.hpp"
#include "wsc/synthetic.hpp"
#include "wsc/weak_clustering.hpp"

namespace {

using nlohmann::json;

std::vector<int> parse_int_list(const std::string& s) {
  std::vector<int> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    out.push_back(std::stoi(item));
  }
  if (out.empty()) throw wsc::PreconditionError("empty integer list: '" + s + "'");
  return out;
}

std::vector<double> parse_double_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    out.push_back(std::stod(item));
  }
  if (out.empty()) throw wsc::PreconditionError("empty number list: '" + s + "'");
  return out;
}

std::vector<std::string> split_csv(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw wsc::LoadError("cannot open: " + path);
  json j;
  in >> j;
  return j;
}

// ---- shared option bundles -------------------------------------------------

struct SeedOpt {
  std::uint64_t seed = 1;
  CLI::Option* flag = nullptr;

  void add(CLI::App* cmd) { flag = cmd->add_option("--seed", seed, "master seed"); }
  std::uint64_t resolve() const {
    if (flag != nullptr && flag->count() > 0) return seed;
    if (const char* env = std::getenv("WSC_SEED")) return std::strtoull(env, nullptr, 10);
    return seed;
  }
};

struct DatasetOpts {
  std::string csv;
  std::string matrix;
  std::string attribute_cols;
  bool integerize = false;
  std::string blobs;  // comma-separated blob sizes; generates when csv empty
  int blob_dim = 2;
  double blob_spread = 1.0;
  double blob_separation = 20.0;
  int blob_groups = 2;
  double blob_skew = 0.5;
  std::uint64_t blob_seed = 1;
  int subsample = 0;
  std::uint64_t subsample_seed = 1;

  void add(CLI::App* cmd) {
    cmd->add_option("--csv", csv, "dataset CSV path");
    cmd->add_option("--matrix", matrix, "distance-matrix file path");
    cmd->add_option("--attribute-cols", attribute_cols,
                    "comma-separated CSV columns holding group labels");
    cmd->add_flag("--integerize", integerize, "ceil all distances to integers");
    cmd->add_option("--blobs", blobs, "generate gaussian blobs with these sizes, e.g. 30,30");
    cmd->add_option("--blob-dim", blob_dim, "blob dimension");
    cmd->add_option("--blob-spread", blob_spread, "blob sigma");
    cmd->add_option("--blob-separation", blob_separation, "blob center scale");
    cmd->add_option("--blob-groups", blob_groups, "groups in the blob 'group' attribute");
    cmd->add_option("--blob-skew", blob_skew, "probability mass of nonzero groups");
    cmd->add_option("--blob-seed", blob_seed, "generator seed (kept separate from --seed)");
    cmd->add_option("--subsample", subsample, "distance-biased subsample to this size");
    cmd->add_option("--subsample-seed", subsample_seed, "subsample seed");
  }

  wsc::Dataset build() const {
    wsc::MetricConfig metric;
    metric.integerize = integerize;
    wsc::Dataset ds;
    if (!csv.empty()) {
      wsc::CsvSchema schema;
      schema.group_columns = split_csv(attribute_cols);
      ds = wsc::load_dataset(csv, schema, metric);
    } else if (!matrix.empty()) {
      ds = wsc::load_matrix_dataset(matrix, metric);
    } else if (!blobs.empty()) {
      wsc::BlobsSpec spec;
      spec.sizes = parse_int_list(blobs);
      spec.dim = blob_dim;
      spec.spread = blob_spread;
      spec.separation = blob_separation;
      spec.groups = blob_groups;
      spec.group_skew = blob_skew;
      spec.seed = blob_seed;
      ds = wsc::gaussian_blobs(spec);
      ds.set_metric(metric);
    } else {
      throw wsc::PreconditionError("no dataset: pass --csv, --matrix or --blobs");
    }
    if (subsample > 0 && subsample < ds.size()) {
      const std::vector<int> idx = wsc::meyerson_subsample(ds, subsample, subsample_seed);
      ds = wsc::subset_dataset(ds, idx);
    }
    return ds;
  }
};

struct OracleOpts {
  double corruption_prob = 1.0 / 3.0;
  std::string adversary = "small-value";

  void add(CLI::App* cmd) {
    cmd->add_option("--corruption-prob", corruption_prob, "weak-answer corruption probability");
    cmd->add_option("--adversary", adversary,
                    "small-value|zero|huge-value|uniform-random|permuted-true");
  }

  wsc::OracleConfig build(std::uint64_t seed) const {
    wsc::OracleConfig cfg;
    cfg.corruption_prob = corruption_prob;
    cfg.adversary = wsc::adversary_from_name(adversary);
    cfg.seed = seed;
    return cfg;
  }
};

struct EngineOpts {
  int k = 2;
  double z = 1;
  double epsilon = 0.5;
  double c0 = 1;
  std::string preset = "desk";
  double lambda = 2;
  double divisor = 320;
  double cm = 1.0;
  bool rescale_epsilon = false;
  std::string query_mode = "point";
  bool prose_weighting = false;
  int weak_rounds = 0;
  int weak_passes = 0;
  int facility_cap = 0;
  double facility_grid = 4.0;
  int attribute = -1;

  void add(CLI::App* cmd, bool fair) {
    cmd->add_option("--k", k, "number of centers");
    cmd->add_option("--z", z, "cost exponent (1 = median, 2 = means)");
    cmd->add_option("--epsilon", epsilon, "target relative error");
    cmd->add_option("--c0", c0, "ring growth constant; rings grow by 2*c0");
    cmd->add_option("--preset", preset, "desk|paper parameter preset");
    cmd->add_option("--lambda", lambda, "desk preset log-stand-in");
    cmd->add_option("--divisor", divisor, "desk preset constant divisor");
    cmd->add_flag("--rescale-epsilon", rescale_epsilon,
                  "shrink epsilon by the analysis factor before the preset");
    cmd->add_option("--weak-rounds", weak_rounds, "facility-cost grid values per pass");
    cmd->add_option("--weak-passes", weak_passes, "front-end restarts");
    cmd->add_option("--facility-cap", facility_cap, "max open facilities per grid value");
    cmd->add_option("--facility-grid", facility_grid, "facility-cost grid ratio");
    if (fair) {
      cmd->add_option("--cm-constant", cm, "batch size constant");
      cmd->add_option("--attribute", attribute,
                      "attribute to protect; -1 = refinement of all attributes");
    } else {
      cmd->add_option("--query-mode", query_mode, "point|pair strong metering");
      cmd->add_flag("--prose-weighting", prose_weighting,
                    "weight the whole ring sample instead of the carrier split");
    }
  }

  double effective_eps(int n) const {
    if (!rescale_epsilon) return epsilon;
    return wsc::rescaled_eps(epsilon, 2.0, c0, z, n);
  }

  wsc::WeakClusteringParams weak_params(std::uint64_t seed) const {
    wsc::WeakClusteringParams wp;
    wp.k = k;
    wp.z = z;
    wp.rounds = weak_rounds;
    wp.passes = weak_passes;
    wp.facility_cap = facility_cap;
    wp.grid_factor = facility_grid;
    wp.seed = wsc::mix64({seed, 1});
    return wp;
  }

  wsc::CoresetParams ring_params(int n, std::uint64_t seed) const {
    const double eps = effective_eps(n);
    wsc::CoresetParams cp = preset == "paper" ? wsc::CoresetParams::paper(n, k, z, eps)
                                              : wsc::CoresetParams::desk(n, k, z, eps, lambda,
                                                                         divisor);
    if (preset != "paper") cp.c0 = c0;
    cp.prose_weighting = prose_weighting;
    if (query_mode == "pair")
      cp.pair_queries = true;
    else if (query_mode != "point")
      throw wsc::PreconditionError("query mode must be point or pair");
    cp.seed = wsc::mix64({seed, 2});
    return cp;
  }

  wsc::FairParams fair_params(int n, std::uint64_t seed) const {
    const double eps = effective_eps(n);
    wsc::FairParams fp = preset == "paper"
                             ? wsc::FairParams::paper(n, k, z, eps)
                             : wsc::FairParams::desk(n, k, z, eps, lambda, divisor, cm);
    if (preset != "paper") fp.c0 = c0;
    fp.seed = wsc::mix64({seed, 3});
    return fp;
  }
};

json clustering_to_json(const wsc::WeakClustering& wc, bool with_assignment) {
  json j;
  j["centers"] = wc.centers;
  j["est_cost"] = wc.est_cost;
  j["claimed_beta"] = wc.claimed_beta;
  j["z"] = wc.z;
  j["facilities_opened"] = wc.facilities_opened;
  j["winning_pass"] = wc.winning_pass;
  if (with_assignment) j["assignment"] = wc.assignment;
  return j;
}

void emit(const json& j, const std::string& json_out) {
  const std::string text = j.dump(2) + "\n";
  if (json_out.empty())
    std::cout << text;
  else
    wsc::write_text_atomic(json_out, text);
}

// Coreset file readers accept both bare WeightedCoreset dumps and full
// pipeline reports that nest one under "coreset".
void load_coreset_entries(const std::string& path, std::vector<int>& points,
                          std::vector<double>& weights) {
  json j = load_json_file(path);
  if (j.contains("coreset")) j = j["coreset"];
  if (!j.contains("entries")) throw wsc::LoadError("no coreset entries in " + path);
  for (const json& e : j["entries"]) {
    points.push_back(e.at("point").get<int>());
    weights.push_back(e.at("weight").get<double>());
  }
  if (points.empty()) throw wsc::LoadError("coreset in " + path + " is empty");
}

// ---- subcommand runners ----------------------------------------------------

struct GenArgs {
  SeedOpt seed;
  std::string kind = "blobs";
  std::string sizes = "30,30";
  int dim = 2;
  double spread = 1.0;
  double separation = 20.0;
  int groups = 2;
  double skew = 0.5;
  bool no_cluster_attr = false;
  std::string occupancy = "20,20,20";
  double base_radius = 1.0;
  double ring_factor = 2.0;
  double ring_separation = 0.0;
  int total = 100;
  int distinct = 3;
  double spacing = 10.0;
  int subsample = 0;
  std::string out;
  std::string json_out;
};

int run_gen(const GenArgs& a) {
  const std::uint64_t seed = a.seed.resolve();
  wsc::Dataset ds;
  json extra;
  if (a.kind == "blobs") {
    wsc::BlobsSpec spec;
    spec.sizes = parse_int_list(a.sizes);
    spec.dim = a.dim;
    spec.spread = a.spread;
    spec.separation = a.separation;
    spec.groups = a.groups;
    spec.group_skew = a.skew;
    spec.cluster_attribute = !a.no_cluster_attr;
    spec.seed = seed;
    ds = wsc::gaussian_blobs(spec);
  } else if (a.kind == "rings") {
    wsc::RingsSpec spec;
    spec.occupancy.clear();
    std::stringstream ss(a.occupancy);
    std::string part;
    while (std::getline(ss, part, ';')) spec.occupancy.push_back(parse_int_list(part));
    spec.base_radius = a.base_radius;
    spec.factor = a.ring_factor;
    spec.separation = a.ring_separation;
    spec.dim = a.dim;
    spec.seed = seed;
    wsc::PlantedRings pr = wsc::planted_rings(spec);
    ds = std::move(pr.ds);
    extra["centers"] = pr.centers;
    extra["true_center"] = pr.true_center;
    extra["true_ring"] = pr.true_ring;
  } else if (a.kind == "duplicates") {
    ds = wsc::duplicate_heavy(a.total, a.distinct, a.spacing, seed);
  } else {
    throw wsc::PreconditionError("kind must be blobs, rings or duplicates");
  }

  if (a.subsample > 0 && a.subsample < ds.size()) {
    const std::vector<int> idx = wsc::meyerson_subsample(ds, a.subsample, wsc::mix64({seed, 7}));
    ds = wsc::subset_dataset(ds, idx);
    extra["subsample"] = a.subsample;
  }
  if (a.out.empty()) throw wsc::PreconditionError("gen needs --out");
  wsc::write_csv(ds, a.out);

  json j;
  j["kind"] = a.kind;
  j["n"] = ds.size();
  j["dim"] = ds.dim();
  j["out"] = a.out;
  j["seed"] = seed;
  json attrs = json::array();
  for (int x = 0; x < ds.attribute_count(); ++x) attrs.push_back(ds.attribute_name(x));
  j["attributes"] = attrs;
  if (!extra.is_null()) j["planted"] = extra;
  emit(j, a.json_out);
  return 0;
}

struct BuildArgs {
  SeedOpt seed;
  DatasetOpts data;
  OracleOpts oracle;
  EngineOpts engine;
  bool fair = false;        // fair-coreset subcommand
  bool ledger_only = false; // ledger subcommand
  bool fair_engine_flag = false;  // --fair on the ledger subcommand
  bool trace = false;
  std::string json_out;
};

int run_build(const BuildArgs& a) {
  const std::uint64_t seed = a.seed.resolve();
  const wsc::Dataset ds = a.data.build();
  const int n = ds.size();
  const bool fair = a.fair || a.fair_engine_flag;

  wsc::OracleEnv env(ds, a.oracle.build(seed));
  const wsc::WeakClustering wc = wsc::weak_clustering(env, a.engine.weak_params(seed));

  wsc::RunTrace trace;
  wsc::RunTrace* tp = a.trace ? &trace : nullptr;
  wsc::WeightedCoreset cs;
  json params;
  if (fair) {
    const wsc::FairParams fp = a.engine.fair_params(n, seed);
    cs = wsc::fair_coreset(env, wc, a.engine.attribute, fp, tp);
    params = {{"kind", "fair"},
              {"k", fp.k},
              {"z", fp.z},
              {"epsilon", fp.eps},
              {"c0", fp.c0},
              {"sample_size", fp.sample_size},
              {"heavy_fraction", fp.heavy_fraction},
              {"batch_size", fp.batch_size},
              {"max_iters", fp.max_iters},
              {"attribute", a.engine.attribute}};
  } else {
    const wsc::CoresetParams cp = a.engine.ring_params(n, seed);
    cs = wsc::ring_coreset(env, wc, cp, tp);
    params = {{"kind", "ring"},
              {"k", cp.k},
              {"z", cp.z},
              {"epsilon", cp.eps},
              {"c0", cp.c0},
              {"sample_size", cp.sample_size},
              {"heavy_threshold", cp.heavy_threshold},
              {"update_threshold", cp.update_threshold},
              {"max_iters", cp.max_iters},
              {"prose_weighting", cp.prose_weighting},
              {"pair_queries", cp.pair_queries}};
  }

  json j;
  j["seed"] = seed;
  j["n"] = n;
  j["adversary"] = a.oracle.adversary;
  j["corruption_prob"] = a.oracle.corruption_prob;
  j["ledger"] = env.ledger().to_json();
  if (!a.ledger_only) {
    j["clustering"] = clustering_to_json(wc, true);
    j["coreset"] = cs.to_json();
    j["params"] = params;
    if (a.trace) j["trace"] = trace.to_json();
  }
  emit(j, a.json_out);
  return 0;
}

struct EvalArgs {
  SeedOpt seed;
  DatasetOpts data;
  std::string centers;  // explicit dataset indices
  int auto_k = 0;       // or plug-in solver centers
  double z = 1;
  std::string coreset_file;
  int uniform = 0;
  std::string gamma;
  bool fair = false;
  double alpha = 0.1;
  double beta = 1.0;
  int attribute = 0;
  std::string json_out;
};

int run_eval(const EvalArgs& a) {
  const std::uint64_t seed = a.seed.resolve();
  const wsc::Dataset ds = a.data.build();

  std::vector<int> centers;
  if (!a.centers.empty()) {
    centers = parse_int_list(a.centers);
  } else if (a.auto_k > 0) {
    wsc::ExactClusteringParams ep;
    ep.k = a.auto_k;
    ep.z = a.z;
    ep.seed = wsc::mix64({seed, 0x4556414cULL});
    centers = wsc::exact_clustering(ds, ep).centers;
  } else {
    throw wsc::PreconditionError("eval needs --centers or --auto-k");
  }

  std::vector<int> pts;
  std::vector<double> ws;
  std::string side = "dataset";
  if (!a.coreset_file.empty()) {
    load_coreset_entries(a.coreset_file, pts, ws);
    side = "coreset";
  } else if (a.uniform > 0) {
    const wsc::WeightedCoreset cs = wsc::uniform_baseline(ds, a.uniform, seed);
    pts = cs.points();
    ws = cs.weights();
    side = "uniform";
  } else {
    pts = wsc::eval::all_points(ds);
    ws = wsc::eval::dataset_weights(ds);
  }

  json j;
  j["seed"] = seed;
  j["side"] = side;
  j["centers"] = centers;
  j["z"] = a.z;
  if (a.fair) {
    if (a.attribute < 0 || a.attribute >= ds.attribute_count())
      throw wsc::PreconditionError("no such attribute");
    std::vector<int> groups(pts.size());
    for (size_t i = 0; i < pts.size(); ++i) groups[i] = ds.group_of(pts[i], a.attribute);
    wsc::eval::FairSpec fs;
    fs.alpha.assign(size_t(ds.group_count(a.attribute)), a.alpha);
    fs.beta.assign(size_t(ds.group_count(a.attribute)), a.beta);
    const wsc::eval::CostReport r = wsc::eval::fair_cost(ds, pts, ws, groups, centers, a.z, fs);
    j["mode"] = "fair";
    j["alpha"] = a.alpha;
    j["beta"] = a.beta;
    j["attribute"] = a.attribute;
    j["report"] = r.to_json();
  } else if (!a.gamma.empty()) {
    const std::vector<double> g = parse_double_list(a.gamma);
    const wsc::eval::CostReport r = wsc::eval::constrained_cost(ds, pts, ws, centers, a.z, g);
    j["mode"] = "constrained";
    j["gamma"] = g;
    j["report"] = r.to_json();
  } else {
    j["mode"] = "plain";
    j["cost"] = wsc::eval::clustering_cost(ds, pts, ws, centers, a.z);
  }
  emit(j, a.json_out);
  return 0;
}

struct VerifyArgs {
  SeedOpt seed;
  DatasetOpts data;
  std::string coreset_file;
  wsc::eval::VerifyOptions opt;
  std::string json_out;
};

int run_verify(const VerifyArgs& a) {
  wsc::eval::VerifyOptions opt = a.opt;
  opt.seed = a.seed.resolve();
  const wsc::Dataset ds = a.data.build();
  std::vector<int> pts;
  std::vector<double> ws;
  load_coreset_entries(a.coreset_file, pts, ws);
  const wsc::eval::VerifyReport rep = wsc::eval::verify_coreset(ds, pts, ws, opt);
  json j = rep.to_json();
  j["seed"] = opt.seed;
  emit(j, a.json_out);
  return rep.pass ? 0 : 2;
}

struct ExperimentArgs {
  SeedOpt seed;
  std::string spec_file;
  std::string output;
  int repetitions = 0;
  std::string json_out;
};

int run_experiment_cmd(const ExperimentArgs& a) {
  wsc::ExperimentSpec spec;
  if (!a.spec_file.empty()) spec = wsc::ExperimentSpec::from_json(load_json_file(a.spec_file));
  if (a.seed.flag != nullptr && a.seed.flag->count() > 0) spec.seed = a.seed.seed;
  if (!a.output.empty()) spec.output = a.output;
  if (a.repetitions > 0) spec.repetitions = a.repetitions;
  const wsc::ExperimentReport rep = wsc::run_experiment(spec);
  emit(rep.to_json(), a.json_out);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"weak/strong-oracle clustering coresets"};
  app.require_subcommand(1);

  GenArgs gen;
  auto* cgen = app.add_subcommand("gen", "generate a synthetic dataset CSV");
  gen.seed.add(cgen);
  cgen->add_option("--kind", gen.kind, "blobs|rings|duplicates");
  cgen->add_option("--sizes", gen.sizes, "blob sizes, e.g. 30,30");
  cgen->add_option("--dim", gen.dim, "dimension");
  cgen->add_option("--spread", gen.spread, "blob sigma");
  cgen->add_option("--separation", gen.separation, "blob center scale");
  cgen->add_option("--groups", gen.groups, "group count");
  cgen->add_option("--group-skew", gen.skew, "nonzero-group probability");
  cgen->add_flag("--no-cluster-attribute", gen.no_cluster_attr, "drop the cluster attribute");
  cgen->add_option("--occupancy", gen.occupancy, "ring counts, centers split by ';'");
  cgen->add_option("--base-radius", gen.base_radius, "innermost ring radius");
  cgen->add_option("--ring-factor", gen.ring_factor, "ring growth factor");
  cgen->add_option("--ring-separation", gen.ring_separation, "center spacing; 0 = auto");
  cgen->add_option("--total", gen.total, "duplicate-heavy total points");
  cgen->add_option("--distinct", gen.distinct, "duplicate-heavy distinct locations");
  cgen->add_option("--spacing", gen.spacing, "duplicate-heavy location spacing");
  cgen->add_option("--subsample", gen.subsample, "distance-biased subsample size");
  cgen->add_option("--out", gen.out, "output CSV path")->required();
  cgen->add_option("--json-out", gen.json_out, "write the JSON summary here");

  BuildArgs coreset;
  auto* ccoreset = app.add_subcommand("coreset", "build an unconstrained coreset");
  coreset.seed.add(ccoreset);
  coreset.data.add(ccoreset);
  coreset.oracle.add(ccoreset);
  coreset.engine.add(ccoreset, false);
  ccoreset->add_flag("--trace", coreset.trace, "include engine trace events");
  ccoreset->add_option("--json-out", coreset.json_out, "write the JSON report here");

  BuildArgs fairc;
  fairc.fair = true;
  auto* cfair = app.add_subcommand("fair-coreset", "build a group-mass-preserving coreset");
  fairc.seed.add(cfair);
  fairc.data.add(cfair);
  fairc.oracle.add(cfair);
  fairc.engine.add(cfair, true);
  cfair->add_flag("--trace", fairc.trace, "include engine trace events");
  cfair->add_option("--json-out", fairc.json_out, "write the JSON report here");

  EvalArgs eval;
  auto* ceval = app.add_subcommand("eval", "exact cost of a point set against centers");
  eval.seed.add(ceval);
  eval.data.add(ceval);
  ceval->add_option("--centers", eval.centers, "center indices, e.g. 0,17");
  ceval->add_option("--auto-k", eval.auto_k, "pick centers with the plug-in solver");
  ceval->add_option("--z", eval.z, "cost exponent");
  ceval->add_option("--coreset", eval.coreset_file, "evaluate this coreset JSON");
  ceval->add_option("--uniform", eval.uniform, "evaluate a fresh uniform sample of this size");
  ceval->add_option("--gamma", eval.gamma, "per-center masses for the constrained cost");
  ceval->add_flag("--fair", eval.fair, "fair share-bound cost");
  ceval->add_option("--alpha", eval.alpha, "lower share bound");
  ceval->add_option("--beta", eval.beta, "upper share bound");
  ceval->add_option("--attribute", eval.attribute, "attribute for fair groups");
  ceval->add_option("--json-out", eval.json_out, "write the JSON report here");

  VerifyArgs verify;
  auto* cverify = app.add_subcommand("verify", "probe coreset quality; exit 2 on failure");
  verify.seed.add(cverify);
  verify.data.add(cverify);
  cverify->add_option("--coreset", verify.coreset_file, "coreset JSON to verify")->required();
  cverify->add_option("--k", verify.opt.k, "centers per probe");
  cverify->add_option("--z", verify.opt.z, "cost exponent");
  cverify->add_option("--eps", verify.opt.eps, "allowed relative deviation");
  cverify->add_option("--exhaustive-cap", verify.opt.exhaustive_cap,
                      "probe all center sets up to this many");
  cverify->add_option("--sample-sets", verify.opt.sample_sets, "sampled center sets otherwise");
  cverify->add_option("--gamma-sets", verify.opt.gamma_sets,
                      "center sets that also get constrained probes");
  cverify->add_option("--gamma-grid", verify.opt.gamma_grid, "constrained probes per such set");
  cverify->add_option("--json-out", verify.json_out, "write the JSON report here");

  ExperimentArgs exp;
  auto* cexp = app.add_subcommand("experiment", "comparative coreset protocol");
  exp.seed.add(cexp);
  cexp->add_option("--spec", exp.spec_file, "experiment spec JSON");
  cexp->add_option("--output", exp.output, "report path prefix override");
  cexp->add_option("--repetitions", exp.repetitions, "repetitions override");
  cexp->add_option("--json-out", exp.json_out, "write the JSON report here");

  BuildArgs ledger;
  ledger.ledger_only = true;
  auto* cledger = app.add_subcommand("ledger", "run the pipeline, print only query counts");
  ledger.seed.add(cledger);
  ledger.data.add(cledger);
  ledger.oracle.add(cledger);
  ledger.engine.add(cledger, false);
  cledger->add_flag("--fair", ledger.fair_engine_flag, "run the fair engine instead");
  cledger->add_option("--attribute", ledger.engine.attribute,
                      "fair engine: attribute to protect; -1 = all");
  cledger->add_option("--cm-constant", ledger.engine.cm, "fair engine: batch size constant");
  cledger->add_option("--json-out", ledger.json_out, "write the JSON report here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (cgen->parsed()) return run_gen(gen);
    if (ccoreset->parsed()) return run_build(coreset);
    if (cfair->parsed()) return run_build(fairc);
    if (ceval->parsed()) return run_eval(eval);
    if (cverify->parsed()) return run_verify(verify);
    if (cexp->parsed()) return run_experiment_cmd(exp);
    if (cledger->parsed()) return run_build(ledger);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
