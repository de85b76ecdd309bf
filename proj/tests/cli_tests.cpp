#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#ifndef WSC_CLI_PATH
#error "WSC_CLI_PATH must point at the CLI binary"
#endif

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path work_dir() {
  static fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / "wsc_cli_tests";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

// Runs the CLI with stdout/stderr captured into files; returns the exit code.
int run_cli(const std::string& args, const std::string& env_prefix = "") {
  fs::path out = work_dir() / "stdout.txt";
  fs::path err = work_dir() / "stderr.txt";
  std::string cmd = env_prefix + "\"" + WSC_CLI_PATH + "\" " + args + " > \"" + out.string() +
                    "\" 2> \"" + err.string() + "\"";
  int rc = std::system(cmd.c_str());
  if (rc == -1) return -1;
  return WEXITSTATUS(rc);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::string captured_stdout() { return slurp(work_dir() / "stdout.txt"); }
std::string captured_stderr() { return slurp(work_dir() / "stderr.txt"); }

json load(const fs::path& p) { return json::parse(slurp(p)); }

}  // namespace

TEST_CASE("cli: gen writes a CSV and a summary") {
  fs::path csv = work_dir() / "blobs.csv";
  fs::path meta = work_dir() / "blobs_meta.json";
  int rc = run_cli("gen --kind blobs --sizes 30,30 --separation 40 --seed 5 --out \"" +
                   csv.string() + "\" --json-out \"" + meta.string() + "\"");
  REQUIRE(rc == 0);
  REQUIRE(fs::exists(csv));
  json j = load(meta);
  CHECK(j["kind"] == "blobs");
  CHECK(j["n"] == 60);
  CHECK(j["seed"] == 5);
  CHECK(j["attributes"] == json::array({"cluster", "group"}));

  SUBCASE("reruns are byte-identical") {
    std::string before_csv = slurp(csv);
    std::string before_meta = slurp(meta);
    REQUIRE(run_cli("gen --kind blobs --sizes 30,30 --separation 40 --seed 5 --out \"" +
                    csv.string() + "\" --json-out \"" + meta.string() + "\"") == 0);
    CHECK(slurp(csv) == before_csv);
    CHECK(slurp(meta) == before_meta);
  }

  SUBCASE("rings carry the planted structure") {
    fs::path rcsv = work_dir() / "rings.csv";
    fs::path rmeta = work_dir() / "rings_meta.json";
    REQUIRE(run_cli("gen --kind rings --occupancy \"5,5;4,0,3\" --seed 2 --out \"" +
                    rcsv.string() + "\" --json-out \"" + rmeta.string() + "\"") == 0);
    json r = load(rmeta);
    CHECK(r["n"] == 5 + 5 + 4 + 3 + 2);
    CHECK(r["planted"]["centers"] == json::array({0, 1}));
    CHECK(r["planted"]["true_ring"].size() == r["n"].get<size_t>());
  }

  SUBCASE("duplicates kind") {
    fs::path dcsv = work_dir() / "dup.csv";
    REQUIRE(run_cli("gen --kind duplicates --total 20 --distinct 4 --out \"" + dcsv.string() +
                    "\"") == 0);
    CHECK(fs::exists(dcsv));
  }
}

TEST_CASE("cli: coreset build on a CSV pipeline") {
  fs::path csv = work_dir() / "pipe.csv";
  REQUIRE(run_cli("gen --kind blobs --sizes 25,25 --separation 40 --seed 3 --out \"" +
                  csv.string() + "\"") == 0);

  fs::path cs = work_dir() / "coreset.json";
  int rc = run_cli("coreset --csv \"" + csv.string() +
                   "\" --attribute-cols cluster,group --k 2 --seed 9 --json-out \"" +
                   cs.string() + "\"");
  REQUIRE(rc == 0);
  json j = load(cs);
  CHECK(j["seed"] == 9);
  CHECK(j["n"] == 50);
  CHECK(j["clustering"]["centers"].size() == 2);
  CHECK(j["params"]["kind"] == "ring");
  CHECK(j["ledger"]["strong_points"].get<int>() > 0);
  REQUIRE(!j["coreset"]["entries"].empty());
  double total = 0;
  for (const json& e : j["coreset"]["entries"]) total += e["weight"].get<double>();
  CHECK(total == doctest::Approx(50.0).epsilon(1e-9));

  SUBCASE("same seed, same bytes; different seed, different report") {
    fs::path again = work_dir() / "coreset_again.json";
    REQUIRE(run_cli("coreset --csv \"" + csv.string() +
                    "\" --attribute-cols cluster,group --k 2 --seed 9 --json-out \"" +
                    again.string() + "\"") == 0);
    CHECK(slurp(again) == slurp(cs));
    fs::path other = work_dir() / "coreset_other.json";
    REQUIRE(run_cli("coreset --csv \"" + csv.string() +
                    "\" --attribute-cols cluster,group --k 2 --seed 10 --json-out \"" +
                    other.string() + "\"") == 0);
    CHECK(slurp(other) != slurp(cs));
  }

  SUBCASE("WSC_SEED env fills in when --seed is absent") {
    fs::path envout = work_dir() / "coreset_env.json";
    REQUIRE(run_cli("coreset --csv \"" + csv.string() +
                    "\" --attribute-cols cluster,group --k 2 --json-out \"" + envout.string() +
                    "\"",
                    "WSC_SEED=9 ") == 0);
    CHECK(slurp(envout) == slurp(cs));
  }

  SUBCASE("verify accepts the honest build and rejects a gutted one") {
    int vrc = run_cli("verify --csv \"" + csv.string() + "\" --attribute-cols cluster,group " +
                      "--coreset \"" + cs.string() + "\" --k 2 --eps 0.3 --seed 4");
    CHECK(vrc == 0);
    CHECK(json::parse(captured_stdout())["pass"] == true);

    // One point carrying all the mass cannot represent two far blobs.
    fs::path bad = work_dir() / "bad_coreset.json";
    std::ofstream(bad) << R"({"entries":[{"point":0,"weight":50.0}]})";
    int brc = run_cli("verify --csv \"" + csv.string() + "\" --attribute-cols cluster,group " +
                      "--coreset \"" + bad.string() + "\" --k 2 --eps 0.3 --seed 4");
    CHECK(brc == 2);
    CHECK(json::parse(captured_stdout())["pass"] == false);
  }

  SUBCASE("eval agrees between dataset side and full-copy side") {
    REQUIRE(run_cli("eval --csv \"" + csv.string() +
                    "\" --attribute-cols cluster,group --centers 0,30 --z 1") == 0);
    json plain = json::parse(captured_stdout());
    CHECK(plain["mode"] == "plain");
    CHECK(plain["cost"].get<double>() > 0);

    REQUIRE(run_cli("eval --csv \"" + csv.string() +
                    "\" --attribute-cols cluster,group --centers 0,30 --coreset \"" +
                    cs.string() + "\"") == 0);
    json via3 = json::parse(captured_stdout());
    CHECK(via3["side"] == "coreset");
    CHECK(via3["cost"].get<double>() > 0);

    REQUIRE(run_cli("eval --csv \"" + csv.string() +
                    "\" --attribute-cols cluster,group --centers 0,30 --fair --attribute 1 "
                    "--alpha 0.2 --beta 1.0") == 0);
    json fair = json::parse(captured_stdout());
    CHECK(fair["mode"] == "fair");
    CHECK(fair["report"]["status"] == "optimal");
    CHECK(fair["report"]["cost"].get<double>() >= plain["cost"].get<double>() - 1e-9);

    REQUIRE(run_cli("eval --csv \"" + csv.string() +
                    "\" --attribute-cols cluster,group --centers 0,30 --gamma 25,25") == 0);
    json cons = json::parse(captured_stdout());
    CHECK(cons["mode"] == "constrained");
    CHECK(cons["report"]["cost"].get<double>() >= plain["cost"].get<double>() - 1e-9);
  }
}

TEST_CASE("cli: fair-coreset tags entries and keeps group masses") {
  fs::path out = work_dir() / "fair.json";
  int rc = run_cli(
      "fair-coreset --blobs 30,30 --blob-separation 40 --blob-seed 7 --k 2 --attribute 1 "
      "--cm-constant 0.01 --seed 12 --json-out \"" +
      out.string() + "\"");
  REQUIRE(rc == 0);
  json j = load(out);
  CHECK(j["params"]["kind"] == "fair");
  CHECK(j["params"]["attribute"] == 1);
  REQUIRE(!j["coreset"]["entries"].empty());
  double total = 0;
  for (const json& e : j["coreset"]["entries"]) {
    CHECK(e.contains("attribute"));
    CHECK(e.contains("group"));
    total += e["weight"].get<double>();
  }
  CHECK(total == doctest::Approx(60.0).epsilon(1e-9));
}

TEST_CASE("cli: ledger subcommand reports only query counts") {
  fs::path out = work_dir() / "ledger.json";
  REQUIRE(run_cli("ledger --blobs 20,20 --blob-separation 40 --k 2 --seed 3 --json-out \"" +
                  out.string() + "\"") == 0);
  json j = load(out);
  CHECK(j.contains("ledger"));
  CHECK(!j.contains("coreset"));
  CHECK(!j.contains("clustering"));
  CHECK(j["ledger"]["weak"].get<long long>() > 0);
  CHECK(j["ledger"]["strong_points"].get<long long>() > 0);

  REQUIRE(run_cli("ledger --blobs 20,20 --blob-separation 40 --k 2 --seed 3 --fair "
                  "--attribute 0 --json-out \"" +
                  out.string() + "\"") == 0);
  CHECK(load(out)["ledger"]["strong_points"].get<long long>() > 0);
}

TEST_CASE("cli: experiment subcommand round trips a spec file") {
  fs::path specf = work_dir() / "spec.json";
  json spec;
  spec["blobs"] = {{"sizes", {15, 15}}, {"separation", 40}, {"seed", 2}};
  spec["k_values"] = {2};
  spec["methods"] = {"uniform-baseline"};
  spec["repetitions"] = 2;
  spec["coreset_size"] = 8;
  spec["fairness_attribute"] = 1;
  spec["seed"] = 77;
  std::ofstream(specf) << spec.dump();

  fs::path rep = work_dir() / "exp.json";
  fs::path prefix = work_dir() / "exp_report";
  REQUIRE(run_cli("experiment --spec \"" + specf.string() + "\" --output \"" + prefix.string() +
                  "\" --json-out \"" + rep.string() + "\"") == 0);
  json j = load(rep);
  REQUIRE(j["cells"].size() == 1);
  CHECK(j["cells"][0]["method"] == "uniform-baseline");
  CHECK(j["cells"][0]["plain"]["values"].size() == 2);
  CHECK(fs::exists(prefix.string() + ".json"));
  CHECK(fs::exists(prefix.string() + ".csv"));
  CHECK(load(prefix.string() + ".json") == j);

  SUBCASE("--repetitions overrides the spec") {
    REQUIRE(run_cli("experiment --spec \"" + specf.string() + "\" --repetitions 3 --json-out \"" +
                    rep.string() + "\"") == 0);
    CHECK(load(rep)["cells"][0]["plain"]["values"].size() == 3);
  }
}

TEST_CASE("cli: failures exit nonzero with a message") {
  CHECK(run_cli("coreset --csv /no/such/file.csv --k 2") == 1);
  CHECK(captured_stderr().find("error:") != std::string::npos);

  CHECK(run_cli("eval --blobs 10,10 --z 1") == 1);  // neither --centers nor --auto-k
  CHECK(run_cli("gen --kind nonsense --out \"" + (work_dir() / "x.csv").string() + "\"") == 1);

  // CLI11 parse errors (unknown option) are nonzero too, with a distinct code.
  CHECK(run_cli("coreset --definitely-not-an-option") != 0);
  CHECK(run_cli("") != 0);  // missing required subcommand
}
