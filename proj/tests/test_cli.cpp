// End-to-end checks of the command-line binary: exit codes, output files,
// and the worker-count determinism guarantee.
#include <catch2/catch_amalgamated.hpp>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include "json.hpp"

namespace {

namespace fs = std::filesystem;

fs::path work_dir() {
  const fs::path dir = fs::temp_directory_path() / "specsense_cli_tests";
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  return std::string(std::istreambuf_iterator<char>(in),
                     std::istreambuf_iterator<char>());
}

/// Runs the binary with the given arguments, captures combined output into
/// `capture`, and returns the process exit code.
int run_cli(const std::string& args, std::string* capture = nullptr) {
  const fs::path out = work_dir() / "last_output.txt";
  const std::string cmd = std::string("\"") + SPECSENSE_CLI_PATH + "\" " + args +
                          " > \"" + out.string() + "\" 2>&1";
  const int status = std::system(cmd.c_str());
  REQUIRE(status != -1);
  REQUIRE(WIFEXITED(status));
  if (capture != nullptr) *capture = slurp(out);
  return WEXITSTATUS(status);
}

}  // namespace

TEST_CASE("usage errors exit with code 2") {
  CHECK(run_cli("") == 2);
  CHECK(run_cli("frobnicate") == 2);
  CHECK(run_cli("reliability --no-such-flag") == 2);
  CHECK(run_cli("reliability --n 1 --trials 10") == 2);  // fewer channels than holes
  CHECK(run_cli("agility --target 0") == 2);
  CHECK(run_cli("region --alpha 1.5 --trials 1") == 2);
  CHECK(run_cli("trace --k -1") == 2);
}

TEST_CASE("help and version exit cleanly") {
  std::string text;
  CHECK(run_cli("--help", &text) == 0);
  CHECK(text.find("reliability") != std::string::npos);
  CHECK(text.find("theory") != std::string::npos);

  CHECK(run_cli("--version", &text) == 0);
  CHECK(text.find("specsense 0.1.0") != std::string::npos);
}

TEST_CASE("theory subcommand prints the closed-form operating point") {
  std::string text;
  REQUIRE(run_cli("theory", &text) == 0);
  CHECK(text.find("n=1000\n") != std::string::npos);
  CHECK(text.find("m_prime=50\n") != std::string::npos);
  CHECK(text.find("p_na=") != std::string::npos);
  CHECK(text.find("p_a=") != std::string::npos);
  CHECK(text.find("k_star=") != std::string::npos);
}

TEST_CASE("reliability runs are byte-identical across worker counts") {
  const fs::path serial_csv = work_dir() / "rel_serial.csv";
  const fs::path parallel_csv = work_dir() / "rel_parallel.csv";
  const std::string common = "reliability --n 40 --k 1,2 --trials 50 --seed 9 --out ";

  REQUIRE(run_cli(common + "\"" + serial_csv.string() + "\" --threads 1") == 0);
  REQUIRE(run_cli(common + "\"" + parallel_csv.string() + "\" --threads 4") == 0);

  const std::string serial = slurp(serial_csv);
  CHECK(serial == slurp(parallel_csv));
  CHECK(serial.rfind("experiment,n,epsilon,", 0) == 0);
  // header + one-shot row + two adaptive rows
  CHECK(std::count(serial.begin(), serial.end(), '\n') == 4);

  const fs::path sidecar = serial_csv.string() + ".meta.json";
  REQUIRE(fs::exists(sidecar));
  const nlohmann::json meta = nlohmann::json::parse(slurp(sidecar));
  CHECK(meta.at("status") == "complete");
  CHECK(meta.at("experiment") == "reliability");
  CHECK(meta.at("master_seed") == 9);
  CHECK(meta.contains("duration_seconds"));

  fs::remove(serial_csv);
  fs::remove(parallel_csv);
  fs::remove(sidecar);
  fs::remove(parallel_csv.string() + ".meta.json");
}

TEST_CASE("trace subcommand writes one row per surviving cycle") {
  const fs::path csv = work_dir() / "trace.csv";
  REQUIRE(run_cli("trace --n 200 --k 3 --seed 5 --out \"" + csv.string() + "\"") == 0);

  const std::string text = slurp(csv);
  CHECK(text.rfind("cycle,k,holes_retained,occupied_retained\n", 0) == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') == 5);  // header + k+1 rows
  CHECK(text.find("\n0,3,") != std::string::npos);

  fs::remove(csv);
  fs::remove(csv.string() + ".meta.json");
}

TEST_CASE("agility sidecar records the search outcome per cycle count") {
  const fs::path csv = work_dir() / "agility.csv";
  // Loose target so the search succeeds quickly at tiny trial counts.
  REQUIRE(run_cli("agility --target 0.9 --n 30 --k 1 --m-max 4 --trials 40 --out \"" +
                  csv.string() + "\"") == 0);

  const nlohmann::json meta = nlohmann::json::parse(slurp(csv.string() + ".meta.json"));
  CHECK(meta.at("status") == "complete");
  const auto& results = meta.at("results");
  REQUIRE(results.size() == 2);
  CHECK(results[0].at("k") == 0);
  CHECK(results[1].at("k") == 1);
  CHECK(results[1].contains("gain_vs_one_shot") ==
        (results[0].at("attainable").get<bool>() &&
         results[1].at("attainable").get<bool>()));

  fs::remove(csv);
  fs::remove(csv.string() + ".meta.json");
}

TEST_CASE("unwritable output paths exit with code 1") {
  CHECK(run_cli("trace --n 50 --k 1 --out /nonexistent-dir/x.csv") == 1);
}
