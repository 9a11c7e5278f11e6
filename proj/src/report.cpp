#include <charconv>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "lightsnn/errors.hpp"
#include "lightsnn/search.hpp"

namespace lightsnn {
namespace {

std::string format_double(double v) {
  if (std::isinf(v)) return v < 0 ? "-inf" : "inf";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

double parse_double(const std::string& s, std::size_t line) {
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  if (s == "inf") return std::numeric_limits<double>::infinity();
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size() || !std::isfinite(v)) throw ParseError(line, "bad number '" + s + "'");
  return v;
}

template <typename Int>
Int parse_int(const std::string& s, std::size_t line) {
  Int v{};
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size()) throw ParseError(line, "bad integer '" + s + "'");
  return v;
}

}  // namespace

std::string serialize_report(const SearchReport& r) {
  std::ostringstream os;
  os << "lightsnn-report v1\n";
  os << "method: " << r.method << "\n";
  os << "profile: " << r.profile << "\n";
  os << "seed: " << r.seed << "\n";
  os << "score: " << format_double(r.score) << "\n";
  os << "evaluations: " << r.evaluations << "\n";
  os << "rounds: " << r.rounds << "\n";
  os << "elapsed_ms: " << r.elapsed_ms << "\n";
  os << "architecture:\n";
  std::istringstream arch(serialize_arch(r.architecture));
  for (std::string line; std::getline(arch, line);) os << "  " << line << "\n";
  os << "sar: " << format_double(r.sar) << "\n";
  os << "weighting: " << r.weighting << "\n";
  os << "timesteps: " << r.timesteps << "\n";
  os << "batch: " << r.batch_size << "\n";
  os << "op_edge_product: " << r.op_edge_product << "\n";
  os << "space_size: " << r.space_size << "\n";
  for (const auto& w : r.warnings) os << "warning: " << w << "\n";
  return os.str();
}

SearchReport parse_report(std::string_view text) {
  std::vector<std::string> lines;
  {
    std::istringstream is{std::string(text)};
    for (std::string line; std::getline(is, line);) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      lines.push_back(line);
    }
  }
  if (lines.empty() || lines[0] != "lightsnn-report v1") throw ParseError(1, "expected header 'lightsnn-report v1'");

  static const char* const kRequired[] = {"method", "profile", "seed", "score", "evaluations", "rounds",
                                          "elapsed_ms", "architecture", "sar", "weighting", "timesteps",
                                          "batch", "op_edge_product", "space_size"};
  constexpr std::size_t kRequiredCount = sizeof(kRequired) / sizeof(kRequired[0]);
  SearchReport r;
  std::size_t expect = 0;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const std::size_t lineno = i + 1;
    const std::string& line = lines[i];
    if (line.empty()) continue;
    const auto colon = line.find(':');
    if (colon == std::string::npos) throw ParseError(lineno, "expected 'key: value'");
    const std::string key = line.substr(0, colon);
    std::string value = line.substr(colon + 1);
    if (!value.empty() && value.front() == ' ') value.erase(0, 1);

    if (key == "warning") {
      if (expect != kRequiredCount) throw ParseError(lineno, "warning before end of required keys");
      r.warnings.push_back(value);
      continue;
    }
    if (expect >= kRequiredCount || key != kRequired[expect])
      throw ParseError(lineno, "unexpected key '" + key + "'");
    ++expect;

    if (key == "method") {
      if (value != "prune" && value != "random") throw ParseError(lineno, "unknown method '" + value + "'");
      r.method = value;
    } else if (key == "profile") {
      r.profile = value;
    } else if (key == "seed") {
      r.seed = parse_int<std::uint64_t>(value, lineno);
    } else if (key == "score") {
      r.score = parse_double(value, lineno);
    } else if (key == "evaluations") {
      r.evaluations = parse_int<std::size_t>(value, lineno);
    } else if (key == "rounds") {
      r.rounds = parse_int<std::size_t>(value, lineno);
    } else if (key == "elapsed_ms") {
      r.elapsed_ms = parse_int<std::int64_t>(value, lineno);
    } else if (key == "architecture") {
      if (!value.empty()) throw ParseError(lineno, "architecture block must start on the next line");
      std::string block;
      std::size_t j = i + 1;
      for (; j < lines.size() && lines[j].rfind("  ", 0) == 0; ++j) block += lines[j].substr(2) + "\n";
      try {
        r.architecture = parse_arch(block);
      } catch (const ParseError& e) {
        throw ParseError(lineno + e.line(), std::string("in architecture: ") + e.what());
      }
      i = j - 1;
    } else if (key == "sar") {
      r.sar = parse_double(value, lineno);
    } else if (key == "weighting") {
      r.weighting = value;
    } else if (key == "timesteps") {
      r.timesteps = parse_int<std::size_t>(value, lineno);
    } else if (key == "batch") {
      r.batch_size = parse_int<std::size_t>(value, lineno);
    } else if (key == "op_edge_product") {
      r.op_edge_product = parse_int<std::size_t>(value, lineno);
    } else if (key == "space_size") {
      r.space_size = parse_int<std::uint64_t>(value, lineno);
    }
  }
  if (expect != kRequiredCount)
    throw ParseError(lines.size() + 1, std::string("missing key '") + kRequired[expect] + "'");
  if (r.profile != r.architecture.profile.name)
    throw ParseError(3, "profile does not match the embedded architecture");
  return r;
}

}  // namespace lightsnn
