// End-to-end checks of the command-line binary: every subcommand is invoked
// as a subprocess and judged on exit code, stdout/stderr text, and the files
// it leaves behind. The binary path arrives as argv[1] from ctest.
#define DOCTEST_CONFIG_IMPLEMENT
#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "ctxcache/config.hpp"
#include "ctxcache/rng.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string g_cli;  // path to the binary under test

struct CmdResult {
  int status = -1;
  std::string output;  // stdout and stderr interleaved
};

CmdResult run_cli(const std::string& args) {
  const std::string cmd = g_cli + " " + args + " 2>&1";
  CmdResult result;
  FILE* pipe = ::popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  char buf[4096];
  std::size_t n = 0;
  while ((n = std::fread(buf, 1, sizeof buf, pipe)) > 0) result.output.append(buf, n);
  int rc = ::pclose(pipe);
  result.status = (rc != -1 && WIFEXITED(rc)) ? WEXITSTATUS(rc) : -1;
  return result;
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag)
      : path(fs::temp_directory_path() /
             ("ctxcache_cli_" + tag + "_" + std::to_string(::getpid()))) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  std::string str() const { return path.string(); }
};

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string checksum_hex(const fs::path& p) {
  char hex[24];
  std::snprintf(hex, sizeof hex, "%016llx",
                static_cast<unsigned long long>(ctxcache::fnv1a64(read_file(p))));
  return hex;
}

// A tiny corpus and a short trace so subprocess runs stay quick.
ctxcache::config::RunConfig small_config() {
  ctxcache::config::RunConfig cfg;
  cfg.corpus.gen.n_attributes = 14;
  cfg.corpus.gen.n_items = 4;
  cfg.corpus.gen.lifetime_lo_ms = 60'000;
  cfg.corpus.gen.lifetime_hi_ms = 120'000;
  cfg.trace.expected_total = 400.0;
  cfg.trace.minutes = 2.0;
  cfg.trace.consumers = 10;
  cfg.seed = 7;
  return cfg;
}

fs::path write_config(const TempDir& dir, const ctxcache::config::RunConfig& cfg,
                      const std::string& name = "config.json") {
  fs::path p = dir.path / name;
  std::ofstream out(p);
  out << cfg.to_json().dump(2) << "\n";
  return p;
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  return lines;
}

// Extracts "key=value" tokens printed by the gen subcommand.
std::string token_after(const std::string& line, const std::string& key) {
  std::size_t at = line.find(key + "=");
  REQUIRE(at != std::string::npos);
  at += key.size() + 1;
  std::size_t end = line.find_first_of(" \t", at);
  return line.substr(at, end == std::string::npos ? std::string::npos : end - at);
}

const std::vector<std::string> kMetricsKeys = {
    "policy",           "capacity_units",
    "seed",             "q_total",
    "q_cache",          "q_expired",
    "q_miss",           "chr_pct",
    "cmr_pct",          "cer_pct",
    "response_mean_ms", "response_stddev_ms",
    "response_p95_ms",  "throughput_qps",
    "admissions",       "evictions",
    "background_refreshes", "peak_occupancy_units",
    "utilization_pct"};

}  // namespace

TEST_CASE("scenarios subcommand lists the four presets in order") {
  CmdResult r = run_cli("scenarios");
  REQUIRE(r.status == 0);
  std::vector<std::string> lines = lines_of(r.output);
  REQUIRE(lines.size() == 4);
  CHECK(lines[0].rfind("1  high-freshness", 0) == 0);
  CHECK(lines[1].rfind("2  high-demand", 0) == 0);
  CHECK(lines[2].rfind("3  balanced", 0) == 0);
  CHECK(lines[3].rfind("4  scalability", 0) == 0);
}

TEST_CASE("scenarios --dump emits the full preset configs as json") {
  CmdResult r = run_cli("scenarios --dump");
  REQUIRE(r.status == 0);
  json arr = json::parse(r.output);
  REQUIRE(arr.is_array());
  REQUIRE(arr.size() == 4);
  for (int i = 0; i < 4; ++i) {
    CAPTURE(i);
    CHECK(arr[i]["scenario"] == i + 1);
    CHECK(arr[i]["name"].is_string());
    CHECK(arr[i]["blurb"].is_string());
    CHECK(arr[i]["config"].is_object());
    CHECK(arr[i]["config"]["scenario"] == i + 1);
  }
  CHECK(arr[0]["name"] == "high-freshness");
  CHECK(arr[0]["config"]["trace"]["expected_total"] == 70000.0);
  CHECK(arr[3]["name"] == "scalability");
  CHECK(arr[3]["config"]["corpus"]["generate"]["providers"] == 100);
}

TEST_CASE("gen writes a deterministic corpus and trace with checksums") {
  TempDir tmp("gen");
  fs::path cfg = write_config(tmp, small_config());
  fs::path out1 = tmp.path / "d1";
  fs::path out2 = tmp.path / "d2";

  CmdResult r1 = run_cli("gen --config " + cfg.string() + " --out " + out1.string());
  REQUIRE(r1.status == 0);
  REQUIRE(fs::exists(out1 / "corpus.json"));
  REQUIRE(fs::exists(out1 / "trace.csv"));

  std::vector<std::string> lines = lines_of(r1.output);
  REQUIRE(lines.size() == 2);
  // Line one: corpus path, checksum, target count (14 attributes + 4 items).
  CHECK(lines[0].rfind((out1 / "corpus.json").string(), 0) == 0);
  CHECK(token_after(lines[0], "targets") == "18");
  CHECK(token_after(lines[0], "fnv1a64") == checksum_hex(out1 / "corpus.json"));
  // Line two: trace path, checksum, event count, span.
  CHECK(lines[1].rfind((out1 / "trace.csv").string(), 0) == 0);
  CHECK(token_after(lines[1], "fnv1a64") == checksum_hex(out1 / "trace.csv"));
  CHECK(std::stoll(token_after(lines[1], "events")) > 0);
  CHECK(std::stoll(token_after(lines[1], "duration_ms")) > 0);

  // The trace file leads with its version banner and column header.
  std::vector<std::string> trace_lines = lines_of(read_file(out1 / "trace.csv"));
  REQUIRE(trace_lines.size() >= 3);
  CHECK(trace_lines[0] == "# ctxcache trace v1");
  CHECK(trace_lines[1] == "seq,timestamp_ms,kind,target_id,consumer_id");

  // Same config, fresh directory: byte-identical artifacts.
  CmdResult r2 = run_cli("gen --config " + cfg.string() + " --out " + out2.string());
  REQUIRE(r2.status == 0);
  CHECK(read_file(out1 / "corpus.json") == read_file(out2 / "corpus.json"));
  CHECK(read_file(out1 / "trace.csv") == read_file(out2 / "trace.csv"));

  // A different seed changes the workload but not the file shape.
  fs::path out3 = tmp.path / "d3";
  CmdResult r3 = run_cli("gen --config " + cfg.string() + " --seed 8 --out " + out3.string());
  REQUIRE(r3.status == 0);
  CHECK(read_file(out1 / "trace.csv") != read_file(out3 / "trace.csv"));
}

TEST_CASE("gen flags reshape the corpus and switch to steady arrivals") {
  TempDir tmp("genflags");
  fs::path cfg = write_config(tmp, small_config());

  fs::path steady = tmp.path / "steady";
  CmdResult r1 = run_cli("gen --config " + cfg.string() + " --tier low --minutes 1 --out " +
                         steady.string());
  REQUIRE(r1.status == 0);
  std::vector<std::string> lines = lines_of(r1.output);
  REQUIRE(lines.size() == 2);
  // One minute at the low tier: a handful of events inside 60 s.
  long long events = std::stoll(token_after(lines[1], "events"));
  long long duration = std::stoll(token_after(lines[1], "duration_ms"));
  CHECK(events > 0);
  CHECK(events < 400);
  CHECK(duration <= 60'000);

  fs::path sized = tmp.path / "sized";
  CmdResult r2 = run_cli("gen --config " + cfg.string() +
                         " --items 6 --attributes 21 --out " + sized.string());
  REQUIRE(r2.status == 0);
  CHECK(token_after(lines_of(r2.output)[0], "targets") == "27");

  // Provider sites bring seven attributes and two rule items each.
  fs::path sites = tmp.path / "sites";
  CmdResult r3 = run_cli("gen --config " + cfg.string() + " --providers 4 --out " +
                         sites.string());
  REQUIRE(r3.status == 0);
  CHECK(token_after(lines_of(r3.output)[0], "targets") == "36");
}

TEST_CASE("run writes metrics and a config echo under the derived run key") {
  TempDir tmp("run");
  fs::path cfg = write_config(tmp, small_config());
  fs::path out = tmp.path / "out";

  CmdResult r = run_cli("run --config " + cfg.string() + " --policy lru --out " +
                        out.string());
  REQUIRE(r.status == 0);
  CHECK(r.output.find("run s0_lru_cap500_diurnal\n") != std::string::npos);
  CHECK(r.output.find("  queries") != std::string::npos);
  CHECK(r.output.find("  hit/miss/expired %") != std::string::npos);
  CHECK(r.output.find("  peak occupancy") != std::string::npos);

  fs::path metrics_path = out / "metrics_s0_lru_cap500_diurnal.json";
  REQUIRE(fs::exists(metrics_path));
  json metrics = json::parse(read_file(metrics_path));
  REQUIRE(metrics.is_object());
  CHECK(metrics.size() == kMetricsKeys.size());
  for (const std::string& key : kMetricsKeys) {
    CAPTURE(key);
    CHECK(metrics.contains(key));
  }
  CHECK_FALSE(metrics.contains("running_time_ms"));  // wall time is not reproducible
  CHECK(metrics["q_total"].get<std::uint64_t>() > 0);
  CHECK(metrics["capacity_units"] == 500);
  double ratio_sum = metrics["chr_pct"].get<double>() + metrics["cmr_pct"].get<double>() +
                     metrics["cer_pct"].get<double>();
  CHECK(ratio_sum == doctest::Approx(100.0).epsilon(1e-9));

  fs::path echo_path = out / "config_echo.json";
  REQUIRE(fs::exists(echo_path));
  json echo = json::parse(read_file(echo_path));
  CHECK(echo["policy"] == "lru");
  CHECK(echo["seed"] == 7);
  // No importance priorities and no explicit weights: nothing to resolve.
  CHECK_FALSE(echo.contains("resolved_maut_weights"));
  CHECK_FALSE(echo.contains("maut_consistency_ratio"));

  // Second identical invocation reproduces the metrics byte for byte.
  fs::path out2 = tmp.path / "out2";
  CmdResult r2 = run_cli("run --config " + cfg.string() + " --policy lru --out " +
                         out2.string());
  REQUIRE(r2.status == 0);
  CHECK(read_file(metrics_path) == read_file(out2 / "metrics_s0_lru_cap500_diurnal.json"));
}

TEST_CASE("run resolves importance priorities into echoed weights") {
  TempDir tmp("runweights");
  ctxcache::config::RunConfig base = small_config();
  base.maut_priorities = {{0.20, 0.12, 0.08, 0.12, 0.08, 0.32, 0.08}};
  fs::path cfg = write_config(tmp, base);
  fs::path out = tmp.path / "out";

  CmdResult r = run_cli("run --config " + cfg.string() + " --policy lru --out " +
                        out.string());
  REQUIRE(r.status == 0);
  json echo = json::parse(read_file(out / "config_echo.json"));
  REQUIRE(echo.contains("resolved_maut_weights"));
  std::vector<double> w = echo["resolved_maut_weights"].get<std::vector<double>>();
  REQUIRE(w.size() == ctxcache::eval::kFactorCount);
  CHECK(std::accumulate(w.begin(), w.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-9));
  // The dominant priority stays dominant after resolution.
  CHECK(*std::max_element(w.begin(), w.end()) == doctest::Approx(w[5]).epsilon(1e-12));
  CHECK(echo["maut_consistency_ratio"].get<double>() < 1e-6);
}

TEST_CASE("run honours capacity and tier flags in the run key") {
  TempDir tmp("runflags");
  fs::path cfg = write_config(tmp, small_config());
  fs::path out = tmp.path / "out";

  CmdResult r = run_cli("run --config " + cfg.string() +
                        " --policy lfu --capacities 32,64 --tier medium --out " +
                        out.string());
  REQUIRE(r.status == 0);
  CHECK(r.output.find("run s0_lfu_cap32_medium\n") != std::string::npos);
  fs::path metrics_path = out / "metrics_s0_lfu_cap32_medium.json";
  REQUIRE(fs::exists(metrics_path));
  json metrics = json::parse(read_file(metrics_path));
  CHECK(metrics["capacity_units"] == 32);
  CHECK(metrics["q_total"].get<std::uint64_t>() > 0);
}

TEST_CASE("run rejects an unknown policy with exit code 2") {
  TempDir tmp("badpolicy");
  fs::path cfg = write_config(tmp, small_config());
  fs::path out = tmp.path / "never";

  CmdResult r = run_cli("run --config " + cfg.string() + " --policy arc --out " +
                        out.string());
  CHECK(r.status == 2);
  CHECK(r.output.find("error: unknown policy 'arc'; valid policies: dcmf mcac mgreedy "
                      "mmyopic lru lfu") != std::string::npos);
  CHECK_FALSE(fs::exists(out));
}

TEST_CASE("a missing config file fails with an error line and exit code 1") {
  fs::path ghost = fs::temp_directory_path() / "ctxcache_cli_no_such_config.json";
  fs::remove(ghost);
  CmdResult r = run_cli("run --config " + ghost.string());
  CHECK(r.status == 1);
  CHECK(r.output.find("error: cannot open config file: " + ghost.string()) !=
        std::string::npos);
}

TEST_CASE("compare produces merged figure tables across the matrix") {
  TempDir tmp("compare");
  fs::path cfg = write_config(tmp, small_config());
  fs::path out = tmp.path / "out";

  CmdResult r = run_cli("compare --config " + cfg.string() +
                        " --policies lru,dcmf --capacities 8,4 --workers 2 --log-actions "
                        "--out " +
                        out.string());
  REQUIRE(r.status == 0);
  CHECK(r.output.find("scenario 0 | tier diurnal | providers default | capacity 4") !=
        std::string::npos);
  CHECK(r.output.find("hit ratio %") != std::string::npos);
  CHECK(r.output.find("mean response ms") != std::string::npos);
  CHECK(r.output.find("4 runs -> " + out.string()) != std::string::npos);

  // Merged tables carry one row per run behind a shared identity header.
  const std::string id = "scenario,policy,tier,providers,capacity_units";
  struct FigSpec {
    const char* file;
    const char* value_cols;
  };
  const FigSpec figs[] = {
      {"fig4_hits.csv", ",cumulative_hits"},
      {"fig5_expired.csv", ",cer_pct"},
      {"fig6_resp_vs_rate.csv", ",offered_qps,mean_response_ms"},
      {"fig7_latency.csv", ",mean_response_ms"},
      {"fig8_throughput.csv", ",throughput_qps"},
      {"fig9_runtime.csv", ",running_time_ms"},
  };
  for (const FigSpec& fig : figs) {
    CAPTURE(fig.file);
    std::vector<std::string> lines = lines_of(read_file(out / fig.file));
    REQUIRE(lines.size() == 5);  // header + 2 policies x 2 capacities
    CHECK(lines[0] == id + fig.value_cols);
  }

  std::vector<std::string> summary = lines_of(read_file(out / "summary.csv"));
  REQUIRE(summary.size() == 5);
  CHECK(summary[0] ==
        id +
            ",q_total,q_cache,q_expired,q_miss,chr_pct,cmr_pct,cer_pct,response_mean_ms,"
            "response_stddev_ms,response_p95_ms,throughput_qps,admissions,evictions,"
            "background_refreshes,peak_occupancy_units,utilization_pct");
  // Rows follow matrix order: policies as given, capacities ascending.
  CHECK(summary[1].rfind("0,lru,diurnal,0,4,", 0) == 0);
  CHECK(summary[2].rfind("0,lru,diurnal,0,8,", 0) == 0);
  CHECK(summary[3].rfind("0,dcmf,diurnal,0,4,", 0) == 0);
  CHECK(summary[4].rfind("0,dcmf,diurnal,0,8,", 0) == 0);
  // All four runs replay the same trace, so q_total matches everywhere.
  std::string q_total;
  for (std::size_t i = 1; i < summary.size(); ++i) {
    std::istringstream row(summary[i]);
    std::string cell;
    for (int col = 0; col <= 5; ++col) std::getline(row, cell, ',');
    if (i == 1) {
      q_total = cell;
    } else {
      CHECK(cell == q_total);
    }
  }
  // Wall-clock runtimes land in fig9 only, and are strictly positive.
  std::vector<std::string> fig9 = lines_of(read_file(out / "fig9_runtime.csv"));
  for (std::size_t i = 1; i < fig9.size(); ++i) {
    CHECK(std::stod(fig9[i].substr(fig9[i].rfind(',') + 1)) > 0.0);
  }

  const char* keys[] = {"s0_lru_cap4_diurnal", "s0_lru_cap8_diurnal", "s0_dcmf_cap4_diurnal",
                        "s0_dcmf_cap8_diurnal"};
  for (const char* key : keys) {
    CAPTURE(key);
    REQUIRE(fs::exists(out / ("metrics_" + std::string(key) + ".json")));
    fs::path actions = out / ("actions_" + std::string(key) + ".csv");
    REQUIRE(fs::exists(actions));
    CHECK(lines_of(read_file(actions))[0] == "timestamp_ms,action,target_id,belief,reason");
  }
  // Sweep logs exist only for the policy that runs maintenance sweeps.
  CHECK_FALSE(fs::exists(out / "sweeps_s0_lru_cap4_diurnal.csv"));
  fs::path sweeps = out / "sweeps_s0_dcmf_cap4_diurnal.csv";
  REQUIRE(fs::exists(sweeps));
  CHECK(lines_of(read_file(sweeps))[0] ==
        "timestamp_ms,theta_update,theta_evict,occupancy_units,mean_cf,refreshes,"
        "evictions,admissions");
  CHECK(fs::exists(out / "config_echo.json"));
}

TEST_CASE("compare is byte-identical across repeated invocations") {
  TempDir tmp("comparedet");
  fs::path cfg = write_config(tmp, small_config());
  fs::path out_a = tmp.path / "a";
  fs::path out_b = tmp.path / "b";
  const std::string args =
      "compare --config " + cfg.string() + " --policies dcmf,lru --capacities 4 --log-actions";

  REQUIRE(run_cli(args + " --out " + out_a.string()).status == 0);
  REQUIRE(run_cli(args + " --out " + out_b.string()).status == 0);

  std::vector<fs::path> names_a;
  for (const auto& entry : fs::directory_iterator(out_a)) {
    names_a.push_back(entry.path().filename());
  }
  REQUIRE(!names_a.empty());
  std::sort(names_a.begin(), names_a.end());
  for (const fs::path& name : names_a) {
    CAPTURE(name.string());
    REQUIRE(fs::exists(out_b / name));
    if (name == "fig9_runtime.csv") continue;  // wall time differs run to run
    if (name == "config_echo.json") {
      // The echo embeds the output directory; everything else must agree.
      json a = json::parse(read_file(out_a / name));
      json b = json::parse(read_file(out_b / name));
      a.erase("out");
      b.erase("out");
      CHECK(a == b);
      continue;
    }
    CHECK(read_file(out_a / name) == read_file(out_b / name));
  }
}

TEST_CASE("compare spans tier and provider axes in run keys") {
  TempDir tmp("axes");
  fs::path cfg = write_config(tmp, small_config());
  fs::path out = tmp.path / "out";

  CmdResult r = run_cli("compare --config " + cfg.string() +
                        " --policies lfu --capacities 4 --tiers low --providers 2 --out " +
                        out.string());
  REQUIRE(r.status == 0);
  CHECK(r.output.find("scenario 0 | tier low | providers 2 | capacity 4") !=
        std::string::npos);
  CHECK(r.output.find("1 runs -> ") != std::string::npos);
  std::vector<std::string> summary = lines_of(read_file(out / "summary.csv"));
  REQUIRE(summary.size() == 2);
  CHECK(summary[1].rfind("0,lfu,low,2,4,", 0) == 0);
  CHECK(fs::exists(out / "metrics_s0_lfu_cap4_low_p2.json"));
}

TEST_CASE("compare rejects an unknown policy before running anything") {
  TempDir tmp("comparebad");
  fs::path cfg = write_config(tmp, small_config());
  fs::path out = tmp.path / "never";
  CmdResult r = run_cli("compare --config " + cfg.string() + " --policies lru,arc --out " +
                        out.string());
  CHECK(r.status == 2);
  CHECK(r.output.find("error: unknown policy 'arc'") != std::string::npos);
  CHECK_FALSE(fs::exists(out));
}

int main(int argc, char** argv) {
  if (argc < 2) {
    std::fprintf(stderr, "usage: %s <path-to-cli-binary> [doctest args]\n", argv[0]);
    return 1;
  }
  g_cli = argv[1];
  doctest::Context context;
  context.applyCommandLine(argc - 1, argv + 1);  // argv[1] is consumed above
  return context.run();
}
