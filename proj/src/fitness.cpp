#include "lightsnn/fitness.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace lightsnn {

BinaryCode BinaryCode::from_bits(std::span<const std::uint8_t> bits) {
  BinaryCode code(bits.size());
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (bits[i] > 1) throw std::invalid_argument("BinaryCode: bits must be 0 or 1");
    code.set(i, bits[i] != 0);
  }
  return code;
}

void BinaryCode::set(std::size_t i, bool value) {
  if (i >= length_) throw std::out_of_range("BinaryCode: index out of range");
  const std::uint64_t bit = std::uint64_t{1} << (i % 64);
  if (value)
    words_[i / 64] |= bit;
  else
    words_[i / 64] &= ~bit;
}

std::size_t hamming_words(std::span<const std::uint64_t> a, std::span<const std::uint64_t> b) {
  if (a.size() != b.size()) throw std::invalid_argument("hamming: code lengths differ");
  std::size_t d = 0;
  for (std::size_t i = 0; i < a.size(); ++i) d += static_cast<std::size_t>(std::popcount(a[i] ^ b[i]));
  return d;
}

std::size_t hamming(const BinaryCode& a, const BinaryCode& b) {
  if (a.length() != b.length())
    throw std::invalid_argument("hamming: code lengths differ (" + std::to_string(a.length()) + " vs " +
                                std::to_string(b.length()) + ")");
  return hamming_words(a.words(), b.words());
}

std::string_view weighting_tag(Weighting w) { return w == Weighting::Plain ? "plain" : "inverse-activity"; }

Weighting parse_weighting(std::string_view tag) {
  if (tag == "plain") return Weighting::Plain;
  if (tag == "inverse-activity") return Weighting::InverseActivity;
  throw std::invalid_argument("unknown weighting '" + std::string(tag) + "'");
}

std::vector<double> layer_weights(const ActivationCodes& codes, Weighting weighting) {
  std::vector<double> w(codes.layers.size(), 1.0);
  if (weighting == Weighting::Plain) return w;

  const double n_a = static_cast<double>(codes.neuron_count());
  double attainable = 0.0;
  for (std::size_t l = 0; l < codes.layers.size(); ++l) {
    const LayerCodes& layer = codes.layers[l];
    double active = 0.0;
    for (std::size_t i = 0; i < codes.batch; ++i) active += static_cast<double>(layer.popcount(i));
    const double mean_active = active / static_cast<double>(codes.batch);
    w[l] = static_cast<double>(layer.bits) / (mean_active + 1.0);
    attainable += w[l] * static_cast<double>(layer.bits);
  }
  for (double& x : w) x *= n_a / attainable;
  return w;
}

double sahd(const ActivationCodes& codes, std::size_t i, std::size_t j, std::span<const double> weights) {
  if (weights.size() != codes.layers.size()) throw std::invalid_argument("sahd: one weight per layer required");
  double d = 0.0;
  for (std::size_t l = 0; l < codes.layers.size(); ++l) {
    const LayerCodes& layer = codes.layers[l];
    d += weights[l] * static_cast<double>(hamming_words(layer.sample(i), layer.sample(j)));
  }
  return d;
}

KernelMatrix kernel_matrix(const ActivationCodes& codes, Weighting weighting) {
  if (codes.batch < 2) throw std::invalid_argument("kernel_matrix: batch size must be at least 2");
  const double n_a = static_cast<double>(codes.neuron_count());
  const auto weights = layer_weights(codes, weighting);
  KernelMatrix k(codes.batch, n_a);
  for (std::size_t i = 0; i < codes.batch; ++i) {
    k(i, i) = n_a;
    for (std::size_t j = i + 1; j < codes.batch; ++j) {
      const double v = n_a - sahd(codes, i, j, weights);
      k(i, j) = v;
      k(j, i) = v;
    }
  }
  return k;
}

LogDet lu_log_abs_det(std::vector<double> a, std::size_t n) {
  if (a.size() != n * n) throw std::invalid_argument("lu_log_abs_det: matrix is not n x n");
  LogDet out;
  out.min_abs_pivot = n == 0 ? 0.0 : std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t pivot = k;
    double best = std::abs(a[k * n + k]);
    for (std::size_t r = k + 1; r < n; ++r) {
      const double v = std::abs(a[r * n + k]);
      if (v > best) {
        best = v;
        pivot = r;
      }
    }
    if (pivot != k)
      for (std::size_t c = 0; c < n; ++c) std::swap(a[k * n + c], a[pivot * n + c]);
    out.min_abs_pivot = std::min(out.min_abs_pivot, best);
    if (best == 0.0) {
      out.log_abs_det = -std::numeric_limits<double>::infinity();
      return out;
    }
    out.log_abs_det += std::log(best);
    const double inv = 1.0 / a[k * n + k];
    for (std::size_t r = k + 1; r < n; ++r) {
      const double factor = a[r * n + k] * inv;
      if (factor == 0.0) continue;
      for (std::size_t c = k + 1; c < n; ++c) a[r * n + c] -= factor * a[k * n + c];
      a[r * n + k] = 0.0;
    }
  }
  return out;
}

Score score(std::span<const KernelMatrix> kernels) {
  if (kernels.empty()) throw std::invalid_argument("score: need at least one kernel");
  const std::size_t n = kernels.front().size();
  std::vector<double> sum(n * n, 0.0);
  for (const auto& k : kernels) {
    if (k.size() != n) throw std::invalid_argument("score: kernel dimensions differ");
    for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += k.values()[i];
  }
  const double threshold = 1e-12 * kernels.front().neuron_count() * static_cast<double>(kernels.size());
  const LogDet ld = lu_log_abs_det(std::move(sum), n);
  if (!(ld.min_abs_pivot >= threshold) || !std::isfinite(ld.log_abs_det)) return Score::degenerate();
  return {ld.log_abs_det};
}

Score score_codes(std::span<const ActivationCodes> codes, Weighting weighting) {
  std::vector<KernelMatrix> kernels;
  kernels.reserve(codes.size());
  for (const auto& c : codes) kernels.push_back(kernel_matrix(c, weighting));
  return score(kernels);
}

Score evaluate_architecture(const SupernetMask& mask, const Tensor& batch, std::size_t timesteps,
                            std::uint64_t weight_seed, Weighting weighting, const MacroConfig& config) {
  if (batch.rank() < 1 || batch.dim(0) < 2)
    throw std::invalid_argument("evaluate_architecture: batch size must be at least 2");
  NetworkInstance net = build_network(mask, weight_seed, config);
  net.reset();
  const ForwardResult fwd = net.forward_collect(batch, timesteps);
  return score_codes(fwd.codes, weighting);
}

Score evaluate_architecture(const ArchitectureSpec& spec, const Tensor& batch, std::size_t timesteps,
                            std::uint64_t weight_seed, Weighting weighting, const MacroConfig& config) {
  return evaluate_architecture(SupernetMask::from_spec(spec), batch, timesteps, weight_seed, weighting, config);
}

}  // namespace lightsnn
