#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string_view>
#include <vector>

#include "lightsnn/network.hpp"

namespace lightsnn {

/// A fixed-length bit string.
class BinaryCode {
 public:
  explicit BinaryCode(std::size_t length = 0) : length_(length), words_((length + 63) / 64, 0) {}
  static BinaryCode from_bits(std::span<const std::uint8_t> bits);

  std::size_t length() const noexcept { return length_; }
  bool get(std::size_t i) const { return (words_.at(i / 64) >> (i % 64)) & 1U; }
  void set(std::size_t i, bool value = true);
  std::span<const std::uint64_t> words() const noexcept { return words_; }

 private:
  std::size_t length_;
  std::vector<std::uint64_t> words_;
};

/// Number of differing positions. Throws std::invalid_argument on length mismatch.
std::size_t hamming(const BinaryCode& a, const BinaryCode& b);
/// Popcount of a XOR b over equal-length word spans (unused high bits must be 0).
std::size_t hamming_words(std::span<const std::uint64_t> a, std::span<const std::uint64_t> b);

enum class Weighting { Plain, InverseActivity };
std::string_view weighting_tag(Weighting w);
/// plain | inverse-activity
Weighting parse_weighting(std::string_view tag);

/// Per-layer multipliers applied to layer Hamming distances.
///
/// Plain: all ones. Inverse-activity: w_l = n_l / (a_l + 1) with a_l the mean
/// active-bit count of layer l over the batch, rescaled by
/// N_A / sum_l(w_l * n_l) so the largest attainable distance is N_A.
std::vector<double> layer_weights(const ActivationCodes& codes, Weighting weighting);

/// Sparsity-aware Hamming distance between samples i and j: sum_l weights[l] * H_l.
double sahd(const ActivationCodes& codes, std::size_t i, std::size_t j, std::span<const double> weights);

/// Symmetric N x N matrix with entries N_A - d(c_i, c_j).
class KernelMatrix {
 public:
  KernelMatrix(std::size_t n, double neuron_count) : n_(n), neuron_count_(neuron_count), values_(n * n, 0.0) {}

  std::size_t size() const noexcept { return n_; }
  double neuron_count() const noexcept { return neuron_count_; }
  double& operator()(std::size_t i, std::size_t j) { return values_[i * n_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return values_[i * n_ + j]; }
  std::span<const double> values() const noexcept { return values_; }

 private:
  std::size_t n_;
  double neuron_count_;
  std::vector<double> values_;
};

/// Kernel of one timestep's codes. Throws std::invalid_argument if batch < 2.
KernelMatrix kernel_matrix(const ActivationCodes& codes, Weighting weighting);

/// Log-absolute-determinant score; -infinity marks a singular kernel.
struct Score {
  double value = -std::numeric_limits<double>::infinity();

  static Score degenerate() { return {}; }
  bool is_degenerate() const noexcept { return value == -std::numeric_limits<double>::infinity(); }
  auto operator<=>(const Score&) const = default;
};

struct LogDet {
  double log_abs_det = 0.0;
  double min_abs_pivot = 0.0;
};

/// LU with partial pivoting on a row-major n x n matrix: sum of log|u_ii| and
/// the smallest |u_ii|.
LogDet lu_log_abs_det(std::vector<double> matrix, std::size_t n);

/// s = log|det(sum_t K_t)|. Returns the degenerate score when any pivot
/// magnitude falls below 1e-12 * N_A * T.
Score score(std::span<const KernelMatrix> kernels);

/// Builds the network, runs the batch for `timesteps` steps and scores the codes.
Score evaluate_architecture(const SupernetMask& mask, const Tensor& batch, std::size_t timesteps,
                            std::uint64_t weight_seed, Weighting weighting, const MacroConfig& config);
Score evaluate_architecture(const ArchitectureSpec& spec, const Tensor& batch, std::size_t timesteps,
                            std::uint64_t weight_seed, Weighting weighting, const MacroConfig& config);

/// Scores codes that were already collected.
Score score_codes(std::span<const ActivationCodes> codes, Weighting weighting);

}  // namespace lightsnn
