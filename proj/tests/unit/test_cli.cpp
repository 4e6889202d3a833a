#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "doctest.h"
#include "walkbound/cli.hpp"
#include "walkbound/config.hpp"
#include "walkbound/error.hpp"

using namespace walkbound;
namespace fs = std::filesystem;

namespace {

std::string fixture_path(const std::string& name) { return std::string(FIXTURE_DIR) + "/" + name; }

fs::path scratch() {
  const fs::path dir = fs::temp_directory_path() / "walkbound_cli_test";
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

// Runs the installed binary; returns its exit status.
int run_binary(const std::string& args) {
  const std::string cmd = std::string(WALKBOUND_BIN) + " " + args + " 2>/dev/null";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("growth on the free-acting fixture") {
  auto cfg = load_config(fixture_path("free-acting.cfg"));
  for (const char* target : {"alpha", "beta"}) {
    cfg.growth_target = target;
    const auto j = nlohmann::json::parse(run_command("growth", cfg));
    CHECK(j["kind"] == "Polynomial");
    CHECK(j["degree"] == 1);
  }
  const auto path = scratch() / "growth.json";
  fs::remove(path);
  CHECK(run_binary("growth --config " + fixture_path("free-acting.cfg") + " --out " + path.string()) == 0);
  const auto j = nlohmann::json::parse(slurp(path));
  CHECK(j["kind"] == "Polynomial");
  CHECK(j["degree"] == 1);
}

TEST_CASE("growth on the exponential fixture") {
  const auto j = nlohmann::json::parse(run_command("growth", load_config(fixture_path("fibonacci.cfg"))));
  CHECK(j["kind"] == "Exponential");
  CHECK(j["rate"].get<double>() == doctest::Approx(0.4812).epsilon(0.1));
}

TEST_CASE("malformed weights exit 2 without output") {
  const auto dir = scratch();
  const auto cfg_path = dir / "bad.cfg";
  {
    std::ofstream out(cfg_path);
    out << "group.rank = 2\nmeasure.atoms = [\"a\", \"A\", \"b\", \"B\"]\nmeasure.weights = [0.5, 0.5, 0.5, x]\n";
  }
  const auto out_path = dir / "hitting.csv";
  fs::remove(out_path);
  CHECK(run_binary("hitting --config " + cfg_path.string() + " --format csv --out " + out_path.string()) == 2);
  CHECK_FALSE(fs::exists(out_path));
  {
    std::ofstream out(cfg_path);
    out << "group.rank = 2\nmeasure.atoms = [\"a\", \"A\", \"b\", \"B\"]\nmeasure.weights = [0.5, 0.5, 0.5, 0.5]\n";
  }
  CHECK(run_binary("hitting --config " + cfg_path.string() + " --format csv --out " + out_path.string()) == 2);
  CHECK_FALSE(fs::exists(out_path));
  CHECK_FALSE(fs::exists(out_path.string() + ".tmp"));
}

TEST_CASE("walk is byte-identical across runs and worker counts") {
  const auto dir = scratch();
  const std::string base = "walk --config " + fixture_path("linear.cfg") + " --format csv --n-paths 20 --n-steps 50";
  CHECK(run_binary(base + " --seed 9 --out " + (dir / "w1.csv").string()) == 0);
  CHECK(run_binary(base + " --seed 9 --workers 3 --out " + (dir / "w2.csv").string()) == 0);
  const auto a = slurp(dir / "w1.csv");
  const auto b = slurp(dir / "w2.csv");
  CHECK(a.rfind("path_id,step,w,p,gauge_length\n", 0) == 0);
  CHECK(a.size() > 100);
  CHECK(a == b);
  // A different seed gives a different batch.
  CHECK(run_binary(base + " --seed 10 --out " + (dir / "w3.csv").string()) == 0);
  CHECK(slurp(dir / "w3.csv") != a);
}

TEST_CASE("seed from the environment") {
  auto cfg = load_config(fixture_path("srw-f2.cfg"));
  cfg.n_paths = 50;
  cfg.n_steps = 20;
  cfg.seed = 5;
  const auto expected = run_command("walk", cfg);
  const auto dir = scratch();
  const std::string args = "walk --config " + fixture_path("srw-f2.cfg") + " --n-paths 50 --n-steps 20 --out ";
  CHECK(std::system(("WALKBOUND_SEED=5 " + std::string(WALKBOUND_BIN) + " " + args + (dir / "e.json").string()).c_str()) == 0);
  CHECK(slurp(dir / "e.json") == expected);
  // The flag wins over the environment.
  CHECK(std::system(("WALKBOUND_SEED=7 " + std::string(WALKBOUND_BIN) + " " + args + (dir / "f.json").string() +
                     " --seed 5")
                        .c_str()) == 0);
  CHECK(slurp(dir / "f.json") == expected);
}

TEST_CASE("exit codes") {
  CHECK(run_binary("hitting --config /nonexistent.cfg") == 2);
  CHECK(run_binary("bogus --config " + fixture_path("srw-f2.cfg")) == 2);
  // Unresolved ceiling: walks of length 1 cannot resolve depth 2 on the F_2 x Z fixture.
  CHECK(run_binary("hitting --config " + fixture_path("direct-product.cfg") + " --depth 8 --n-steps 1") == 3);
  // Budget: first return with one step per sample.
  CHECK(run_binary("first-return --config " + fixture_path("linear.cfg") + " --step-budget 1 --n-paths 100") == 4);
  // first-return without a sublattice is a config error.
  CHECK(run_binary("first-return --config " + fixture_path("srw-f2.cfg")) == 2);
}

TEST_CASE("every command runs on a small fixture") {
  auto cfg = load_config(fixture_path("srw-f2.cfg"));
  cfg.n_paths = 200;
  cfg.n_steps = 200;
  cfg.n_resample = 1000;
  cfg.depths = {2, 3};
  cfg.horizon = 16;
  cfg.depth = 6;  // deep enough for the Poisson evaluations over the radius-2 ball
  for (const auto& name : command_names()) {
    CAPTURE(name);
    if (name == "first-return" || name == "growth") continue;
    const auto j = nlohmann::json::parse(run_command(name, cfg));
    CHECK_FALSE(j.empty());
  }
  auto lin = load_config(fixture_path("linear.cfg"));
  lin.n_paths = 200;
  const auto fr = nlohmann::json::parse(run_command("first-return", lin));
  CHECK(fr["mean_return_time"].get<double>() >= 1.0);
}

TEST_CASE("tree commands") {
  auto cfg = load_config(fixture_path("srw-f2.cfg"));
  cfg.rank = 3;
  cfg.horizon = 32;
  cfg.tree_base = "c";
  cfg.tree_prefix = "1";
  cfg.tree_step = "a";
  cfg.tree_suffix = "b";
  auto j = nlohmann::json::parse(run_command("tree-liminf", cfg));
  CHECK(j["kind"] == "Vertex");
  CHECK(j["endpoint"] == "V(1)");
  cfg.tree_step = "b";
  cfg.tree_suffix = "1";
  j = nlohmann::json::parse(run_command("tree-liminf", cfg));
  CHECK(j["kind"] == "Ray");

  cfg.rank = 2;
  cfg.tree_from = "BBBBBBBBBBBBBBB";
  cfg.tree_to = "bbbbbbbbbbbbbbb";
  cfg.format = "csv";
  const auto csv = run_command("tree-strips", cfg);
  CHECK(csv.rfind("k,count\n1,3\n2,5\n", 0) == 0);
  cfg.format = "dot";
  CHECK(run_command("tree-strips", cfg).rfind("graph inner_tree {", 0) == 0);
}

TEST_CASE("atomic write replaces the target") {
  const auto p = scratch() / "atomic.txt";
  write_atomically(p.string(), "one\n");
  write_atomically(p.string(), "two\n");
  CHECK(slurp(p) == "two\n");
  CHECK_FALSE(fs::exists(p.string() + ".tmp"));
  CHECK_THROWS_AS(write_atomically("/nonexistent-dir/x.txt", "x"), ConfigError);
}
