#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "lightsnn/cli.hpp"
#include "lightsnn/search.hpp"
#include "lightsnn/tensor.hpp"

using namespace lightsnn;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "lightsnn_cli_test";
  fs::create_directories(dir);
  return dir / name;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::string without_elapsed(const std::string& report) {
  std::istringstream in(report);
  std::string kept;
  for (std::string line; std::getline(in, line);)
    if (line.rfind("elapsed_ms:", 0) != 0) kept += line + "\n";
  return kept;
}

const std::vector<std::string> kToy{"--size", "8", "--stem-channels", "8", "--batch", "8", "--timesteps", "2"};

std::vector<std::string> with_toy(std::vector<std::string> args) {
  args.insert(args.end(), kToy.begin(), kToy.end());
  return args;
}

}  // namespace

TEST_CASE("enumerate") {
  CHECK(cli({"enumerate", "--profile", "snasnet5"}).out == "244140625\n");
  CHECK(cli({"enumerate", "--profile", "light3"}).out == "531441\n");
  CHECK(cli({"enumerate", "--profile", "light3", "--nodes", "3"}).out == "729\n");
}

TEST_CASE("usage errors exit 1") {
  const Run unknown = cli({"enumerate", "--bogus"});
  CHECK(unknown.code == 1);
  CHECK(!unknown.err.empty());
  CHECK(cli({}).code == 1);
  CHECK(cli({"frobnicate"}).code == 1);
  CHECK(cli({"search", "--method", "genetic"}).code == 1);
  CHECK(cli({"search", "--batch", "1"}).code == 1);
  CHECK(cli({"score"}).code == 1);
  CHECK(cli({"search", "--dataset", "imagenet:/x"}).code == 1);
  CHECK(cli({"--help"}).code == 0);
}

TEST_CASE("data errors exit 2") {
  const fs::path bad = scratch("bad_cifar.bin");
  std::ofstream(bad, std::ios::binary) << std::string(3073 * 2 + 5, '\0');
  CHECK(cli(with_toy({"search", "--dataset", "cifar10:" + bad.string()})).code == 2);
  CHECK(cli(with_toy({"search", "--dataset", "cifar10:/nonexistent/file"})).code == 2);
  CHECK(cli(with_toy({"search", "--dataset", "lsnt:" + bad.string()})).code == 2);

  const fs::path arch = scratch("broken.arch");
  std::ofstream(arch) << "lightsnn-arch v1\nprofile light3 pool=avg\nedge 0 1 F conv3x3\n";
  const Run r = cli(with_toy({"score", "--arch", arch.string()}));
  CHECK(r.code == 2);
  CHECK(r.err.find("line") != std::string::npos);
}

TEST_CASE("search is reproducible and score re-derives the reported score") {
  const fs::path arch = scratch("found.arch");
  const auto args = with_toy({"search", "--method", "prune", "--profile", "light3", "--dataset", "synthetic",
                              "--seed", "7", "--arch-out", arch.string()});
  const Run first = cli(args);
  const Run second = cli(args);
  REQUIRE(first.code == 0);
  REQUIRE(second.code == 0);
  CHECK(without_elapsed(first.out) == without_elapsed(second.out));

  const SearchReport rep = parse_report(first.out);
  CHECK(rep.method == "prune");
  CHECK(rep.rounds == 2);
  CHECK(rep.evaluations == 60);
  CHECK(rep.op_edge_product == 36);
  CHECK(rep.batch_size == 8);
  CHECK(serialize_arch(rep.architecture) == slurp(arch));
  CHECK(rep.sar >= 0.0);
  CHECK(rep.sar <= 1.0);

  const Run scored = cli(with_toy({"score", "--arch", arch.string(), "--seed", "7"}));
  REQUIRE(scored.code == 0);
  REQUIRE(scored.out.rfind("score: ", 0) == 0);
  const double s = std::stod(scored.out.substr(7));
  CHECK(std::abs(s - rep.score) <= 1e-9);

  const Run sar = cli(with_toy({"sar", "--arch", arch.string(), "--seed", "7"}));
  REQUIRE(sar.code == 0);
  CHECK(std::abs(std::stod(sar.out.substr(5)) - rep.sar) <= 1e-12);
  CHECK(sar.out.find("layer stem neurons=512") != std::string::npos);
}

TEST_CASE("random search through the CLI") {
  const fs::path out = scratch("random.report");
  const Run r = cli(with_toy({"search", "--method", "random", "--candidates", "6", "--seed", "3", "--out",
                              out.string()}));
  REQUIRE(r.code == 0);
  CHECK(r.out.empty());
  const SearchReport rep = parse_report(slurp(out));
  CHECK(rep.method == "random");
  CHECK(rep.evaluations == 6);
  CHECK(rep.rounds == 0);
}

TEST_CASE("gen-data writes a batch usable as an lsnt dataset") {
  const fs::path data = scratch("events.lsnt");
  REQUIRE(cli({"gen-data", "--out", data.string(), "--batch", "10", "--timesteps", "3", "--size", "8", "--seed", "2"})
              .code == 0);
  const Tensor t = load_lsnt(data);
  CHECK(t.shape() == Shape{10, 3, 2, 8, 8});
  const Run scored_search =
      cli({"search", "--dataset", "lsnt:" + data.string(), "--batch", "8", "--timesteps", "3", "--stem-channels", "8",
           "--method", "random", "--candidates", "2"});
  CHECK(scored_search.code == 0);
  // Too few samples for the batch.
  CHECK(cli({"search", "--dataset", "lsnt:" + data.string(), "--batch", "11", "--stem-channels", "8"}).code == 2);
}

TEST_CASE("config file values yield to flags and override defaults") {
  const fs::path cfg = scratch("run.cfg");
  std::ofstream(cfg) << "# toy run\nprofile = snasnet5\nnodes=3\n";
  CHECK(cli({"enumerate", "--config", cfg.string()}).out == "15625\n");
  CHECK(cli({"enumerate", "--config", cfg.string(), "--profile", "light3"}).out == "729\n");
  CHECK(cli({"enumerate", "--profile=light3", "--config=" + cfg.string()}).out == "729\n");
  std::ofstream(cfg) << "not a pair\n";
  CHECK(cli({"enumerate", "--config", cfg.string()}).code == 1);
  CHECK(cli({"enumerate", "--config", scratch("missing.cfg").string()}).code == 2);
}

TEST_CASE("thread count does not change the report") {
  const auto args = with_toy({"search", "--method", "random", "--candidates", "8", "--seed", "11"});
  setenv("LIGHTSNN_THREADS", "1", 1);
  const Run one = cli(args);
  setenv("LIGHTSNN_THREADS", "4", 1);
  const Run four = cli(args);
  unsetenv("LIGHTSNN_THREADS");
  CHECK(without_elapsed(one.out) == without_elapsed(four.out));
}
