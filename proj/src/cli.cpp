#include "lightsnn/cli.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>

#include "lightsnn/dataset.hpp"
#include "lightsnn/errors.hpp"
#include "lightsnn/fitness.hpp"
#include "lightsnn/metrics.hpp"
#include "lightsnn/parallel.hpp"
#include "lightsnn/search.hpp"

namespace lightsnn {
namespace {

struct RunConfig {
  std::string method = "prune";
  std::string profile = "light3";
  std::string pool = "avg";
  std::string weighting = "inverse-activity";
  std::size_t timesteps = 0;  // 0: 5 for static data, 16 for event data
  std::size_t batch = 32;
  std::uint64_t seed = 0;
  std::string dataset = "synthetic";
  std::size_t stem_channels = 16;
  std::size_t channels = 2;
  std::size_t size = 32;
  std::size_t classes = 11;
  std::size_t nodes = 4;
  std::string normalize = "on";
  float decay = 0.5f;
  float v_threshold = 1.0f;
  float v_reset = 0.0f;
  std::size_t candidates = 5000;
  bool distinct = false;
  std::string out;
  std::string arch_out;
  std::string arch;
};

struct UsageError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

std::string format_double(double v) {
  if (std::isinf(v)) return v < 0 ? "-inf" : "inf";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataFormatError("cannot open " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out || !(out << text)) throw DataFormatError("cannot write " + path);
}

// Data and network geometry resolved from the run configuration.
struct Workload {
  Tensor batch;
  std::size_t timesteps = 0;
  MacroConfig macro;
  OpSetProfile profile;
  CellTopology topology{4};
  Weighting weighting = Weighting::InverseActivity;
  std::uint64_t weight_seed = 0;
};

Workload prepare(const RunConfig& cfg) {
  if (cfg.batch < 2) throw UsageError("--batch must be at least 2");
  Workload w;
  w.profile = OpSetProfile::by_name(cfg.profile, cfg.pool == "max" ? PoolVariant::Max : PoolVariant::Avg);
  w.topology = CellTopology(cfg.nodes);
  w.weighting = parse_weighting(cfg.weighting);
  w.weight_seed = Rng::derive(cfg.seed, SeedPurpose::Weights);
  w.macro.stem_channels = cfg.stem_channels;
  w.macro.normalize = cfg.normalize == "on";
  w.macro.lif = {cfg.v_threshold, cfg.v_reset, cfg.decay};

  Rng data_rng(Rng::derive(cfg.seed, SeedPurpose::Data));
  const auto colon = cfg.dataset.find(':');
  const std::string kind = cfg.dataset.substr(0, colon);
  const std::string path = colon == std::string::npos ? "" : cfg.dataset.substr(colon + 1);
  bool events = false;
  if (kind == "synthetic") {
    if (!path.empty()) throw UsageError("synthetic dataset takes no path");
    w.batch = gen_synthetic_events(data_rng, cfg.batch, cfg.timesteps ? cfg.timesteps : 16, cfg.classes, cfg.channels, cfg.size, cfg.size)
                  .images;
    events = true;
  } else if (kind == "cifar10" || kind == "cifar100") {
    if (path.empty()) throw UsageError(kind + " dataset needs a path");
    w.batch = load_cifar_batch(path, cfg.batch, data_rng,
                               kind == "cifar10" ? CifarVariant::Cifar10 : CifarVariant::Cifar100)
                  .images;
  } else if (kind == "lsnt") {
    if (path.empty()) throw UsageError("lsnt dataset needs a path");
    Tensor t = load_lsnt(path);
    if (t.rank() != 4 && t.rank() != 5) throw DataFormatError("LSNT dataset must be rank 4 or 5");
    if (t.dim(0) < cfg.batch)
      throw DataFormatError("LSNT dataset holds " + std::to_string(t.dim(0)) + " samples, batch needs " +
                            std::to_string(cfg.batch));
    Shape shape = t.shape();
    shape[0] = cfg.batch;
    const std::size_t per_sample = t.size() / t.dim(0);
    std::vector<float> head(t.values().begin(), t.values().begin() + static_cast<std::ptrdiff_t>(cfg.batch * per_sample));
    w.batch = Tensor(shape, std::move(head));
    events = t.rank() == 5;
  } else {
    throw UsageError("unknown dataset '" + cfg.dataset + "'");
  }
  w.timesteps = cfg.timesteps ? cfg.timesteps : (events ? 16 : 5);
  if (events && w.batch.dim(1) < w.timesteps) throw DataFormatError("event dataset has too few timesteps");
  const std::size_t off = events ? 1 : 0;
  w.macro.in_channels = w.batch.dim(1 + off);
  w.macro.height = w.batch.dim(2 + off);
  w.macro.width = w.batch.dim(3 + off);
  w.macro.validate();
  return w;
}

SearchProblem make_problem(const Workload& w) {
  SearchProblem p;
  p.profile = w.profile;
  p.topology = w.topology;
  p.batch = w.batch;
  p.timesteps = w.timesteps;
  p.weight_seed = w.weight_seed;
  p.weighting = w.weighting;
  p.macro = w.macro;
  p.threads = thread_count_from_env();
  return p;
}

ArchitectureSpec load_arch(const RunConfig& cfg) {
  if (cfg.arch.empty()) throw UsageError("--arch is required");
  return parse_arch(read_text(cfg.arch));
}

int cmd_search(const RunConfig& cfg, std::ostream& out) {
  if (cfg.method != "prune" && cfg.method != "random") throw UsageError("unknown method '" + cfg.method + "'");
  const Workload w = prepare(cfg);
  const SearchProblem problem = make_problem(w);
  const auto start = std::chrono::steady_clock::now();

  SearchReport report;
  report.method = cfg.method;
  report.profile = w.profile.name;
  report.seed = cfg.seed;
  if (cfg.method == "prune") {
    PruneResult r = prune_search(problem);
    const auto counters = complexity_counters(r.trace);
    report.score = r.score.value;
    report.evaluations = counters.evaluations;
    report.rounds = counters.rounds;
    report.architecture = r.architecture;
    report.warnings = r.trace.warnings;
  } else {
    RandomSearchResult r =
        random_search(problem, Rng::derive(cfg.seed, SeedPurpose::Search), cfg.candidates, cfg.distinct);
    report.score = r.best_score.value;
    report.evaluations = r.scores.size();
    report.rounds = 0;
    report.architecture = r.best;
  }
  report.elapsed_ms =
      std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start).count();

  NetworkInstance net = build_network(report.architecture, w.weight_seed, w.macro);
  report.sar = compute_sar(net, w.batch, w.timesteps).sar;
  report.weighting = std::string(weighting_tag(w.weighting));
  report.timesteps = w.timesteps;
  report.batch_size = w.batch.dim(0);
  report.op_edge_product = w.profile.size() * w.topology.edge_count();
  report.space_size = enumerate_space(w.profile, w.topology);

  const std::string text = serialize_report(report);
  if (cfg.out.empty())
    out << text;
  else
    write_text(cfg.out, text);
  if (!cfg.arch_out.empty()) write_text(cfg.arch_out, serialize_arch(report.architecture));
  return kExitOk;
}

int cmd_score(const RunConfig& cfg, std::ostream& out) {
  const Workload w = prepare(cfg);
  const ArchitectureSpec spec = load_arch(cfg);
  const Score s = evaluate_architecture(spec, w.batch, w.timesteps, w.weight_seed, w.weighting, w.macro);
  out << "score: " << format_double(s.value) << "\n";
  return kExitOk;
}

int cmd_sar(const RunConfig& cfg, std::ostream& out) {
  const Workload w = prepare(cfg);
  const ArchitectureSpec spec = load_arch(cfg);
  NetworkInstance net = build_network(spec, w.weight_seed, w.macro);
  const SarReport r = compute_sar(net, w.batch, w.timesteps);
  out << "sar: " << format_double(r.sar) << "\n";
  out << "total_spikes: " << r.total_spikes << "\n";
  out << "neuron_count: " << r.neuron_count << "\n";
  out << "timesteps: " << r.timesteps << "\n";
  out << "batch: " << r.batch_size << "\n";
  out << "params: " << count_params(spec, w.macro) << "\n";
  for (const auto& l : r.layers) out << "layer " << l.name << " neurons=" << l.neurons << " spikes=" << l.spikes << "\n";
  return kExitOk;
}

int cmd_gen_data(const RunConfig& cfg, std::ostream& out) {
  if (cfg.out.empty()) throw UsageError("--out is required");
  if (cfg.batch < 1) throw UsageError("--batch must be positive");
  Rng rng(Rng::derive(cfg.seed, SeedPurpose::Data));
  const std::size_t steps = cfg.timesteps ? cfg.timesteps : 16;
  const DatasetBatch b = gen_synthetic_events(rng, cfg.batch, steps, cfg.classes, cfg.channels, cfg.size, cfg.size);
  save_lsnt(cfg.out, b.images);
  out << "wrote " << shape_to_string(b.images.shape()) << " to " << cfg.out << "\n";
  return kExitOk;
}

int cmd_enumerate(const RunConfig& cfg, std::ostream& out) {
  const OpSetProfile profile =
      OpSetProfile::by_name(cfg.profile, cfg.pool == "max" ? PoolVariant::Max : PoolVariant::Avg);
  out << enumerate_space(profile, CellTopology(cfg.nodes)) << "\n";
  return kExitOk;
}

// Expands `--config <file>`: each `key=value` line becomes `--key=value`
// unless the command line already sets that key.
std::vector<std::string> expand_config(const std::vector<std::string>& args) {
  std::vector<std::string> result;
  std::string config_path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config") {
      if (i + 1 >= args.size()) throw UsageError("--config needs a file");
      config_path = args[++i];
    } else if (args[i].rfind("--config=", 0) == 0) {
      config_path = args[i].substr(9);
    } else {
      result.push_back(args[i]);
    }
  }
  if (config_path.empty()) return result;

  auto present = [&](const std::string& key) {
    for (const auto& a : result)
      if (a == "--" + key || a.rfind("--" + key + "=", 0) == 0) return true;
    return false;
  };
  std::istringstream in(read_text(config_path));
  std::size_t lineno = 0;
  for (std::string line; std::getline(in, line);) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw UsageError(config_path + ":" + std::to_string(lineno) + ": expected key=value");
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      const auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (present(key)) continue;
    if (key == "distinct") {
      if (value == "true" || value == "1") result.push_back("--distinct");
      continue;
    }
    result.push_back("--" + key + "=" + value);
  }
  return result;
}

void add_common(CLI::App* cmd, RunConfig& cfg) {
  cmd->add_option("--profile", cfg.profile, "Operation set")->check(CLI::IsMember({"snasnet5", "light3"}));
  cmd->add_option("--pool", cfg.pool, "In-cell pooling variant")->check(CLI::IsMember({"avg", "max"}));
  cmd->add_option("--weighting", cfg.weighting, "Hamming weighting")
      ->check(CLI::IsMember({"plain", "inverse-activity"}));
  cmd->add_option("--timesteps", cfg.timesteps, "Timesteps (default 5 static, 16 event)");
  cmd->add_option("--batch", cfg.batch, "Mini-batch size");
  cmd->add_option("--seed", cfg.seed, "Run seed");
  cmd->add_option("--dataset", cfg.dataset, "synthetic | cifar10:<path> | cifar100:<path> | lsnt:<path>");
  cmd->add_option("--stem-channels", cfg.stem_channels, "Stem output channels")->check(CLI::PositiveNumber);
  cmd->add_option("--channels", cfg.channels, "Synthetic event channels")->check(CLI::PositiveNumber);
  cmd->add_option("--size", cfg.size, "Synthetic frame height and width")->check(CLI::Range(2, 4096));
  cmd->add_option("--classes", cfg.classes, "Synthetic class count")->check(CLI::Range(2, 1000000));
  cmd->add_option("--nodes", cfg.nodes, "Nodes per cell")->check(CLI::Range(2, 16));
  cmd->add_option("--normalize", cfg.normalize, "Per-channel normalization of conv outputs")
      ->check(CLI::IsMember({"on", "off"}));
  cmd->add_option("--decay", cfg.decay, "LIF membrane decay");
  cmd->add_option("--v-threshold", cfg.v_threshold, "LIF firing threshold");
  cmd->add_option("--v-reset", cfg.v_reset, "LIF reset potential");
}

}  // namespace

int run_cli(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  CLI::App app{"Training-free architecture search for spiking neural networks", "lightsnn"};
  app.require_subcommand(1);
  app.failure_message(CLI::FailureMessage::help);

  auto* search = app.add_subcommand("search", "Search an architecture");
  add_common(search, cfg);
  search->add_option("--method", cfg.method, "prune | random")->check(CLI::IsMember({"prune", "random"}));
  search->add_option("--candidates", cfg.candidates, "Random-search sample count")->check(CLI::PositiveNumber);
  search->add_flag("--distinct", cfg.distinct, "Random search samples without replacement");
  search->add_option("--out", cfg.out, "Report file (default stdout)");
  search->add_option("--arch-out", cfg.arch_out, "Write the found architecture here");

  auto* score = app.add_subcommand("score", "Score one architecture");
  add_common(score, cfg);
  score->add_option("--arch", cfg.arch, "Architecture file")->required();

  auto* sar = app.add_subcommand("sar", "Spiking activity of one architecture");
  add_common(sar, cfg);
  sar->add_option("--arch", cfg.arch, "Architecture file")->required();

  auto* gen = app.add_subcommand("gen-data", "Write a synthetic event batch as LSNT");
  add_common(gen, cfg);
  gen->add_option("--out", cfg.out, "Output LSNT file")->required();

  auto* enumerate = app.add_subcommand("enumerate", "Count architectures in the search space");
  add_common(enumerate, cfg);

  try {
    const std::vector<std::string> args = expand_config(raw_args);
    std::vector<const char*> argv{"lightsnn"};
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
      app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
      return app.exit(e, out, err) == 0 ? kExitOk : kExitUsage;
    }

    if (search->parsed()) return cmd_search(cfg, out);
    if (score->parsed()) return cmd_score(cfg, out);
    if (sar->parsed()) return cmd_sar(cfg, out);
    if (gen->parsed()) return cmd_gen_data(cfg, out);
    if (enumerate->parsed()) return cmd_enumerate(cfg, out);
    err << app.help();
    return kExitUsage;
  } catch (const lightsnn::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const DataFormatError& e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n" << app.help();
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  }
}

}  // namespace lightsnn
