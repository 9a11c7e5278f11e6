#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lightsnn/lif.hpp"
#include "lightsnn/searchspace.hpp"
#include "lightsnn/tensor.hpp"

namespace lightsnn {

/// Macro skeleton geometry. Cell #1 runs at stem_channels x H x W, cell #2 at
/// 2*stem_channels x H/2 x W/2.
struct MacroConfig {
  std::size_t in_channels = 3;
  std::size_t height = 32;
  std::size_t width = 32;
  std::size_t stem_channels = 16;
  std::size_t num_classes = 10;
  LIFConfig lif{};
  /// Standardize every convolution output with batch statistics.
  bool normalize = true;

  void validate() const;
};

/// Packed spike bits of one LIF layer for every sample of a batch at one
/// timestep.
struct LayerCodes {
  std::size_t bits = 0;
  std::size_t words_per_sample = 0;
  std::vector<std::uint64_t> words;

  std::span<const std::uint64_t> sample(std::size_t i) const {
    return std::span<const std::uint64_t>(words).subspan(i * words_per_sample, words_per_sample);
  }
  bool bit(std::size_t sample_index, std::size_t neuron) const {
    return (words[sample_index * words_per_sample + neuron / 64] >> (neuron % 64)) & 1U;
  }
  /// Active bits of one sample.
  std::size_t popcount(std::size_t sample_index) const;

  bool operator==(const LayerCodes&) const = default;
};

/// Binary activation codes of every LIF layer at one timestep.
struct ActivationCodes {
  std::size_t batch = 0;
  std::vector<LayerCodes> layers;

  /// N_A: total LIF neurons per sample.
  std::size_t neuron_count() const;

  bool operator==(const ActivationCodes&) const = default;
};

struct ForwardResult {
  /// One entry per timestep.
  std::vector<ActivationCodes> codes;
  /// Spike totals per LIF layer over all timesteps and samples, read from the
  /// LIF state counters.
  std::vector<std::uint64_t> layer_spikes;
  /// Classifier output on the time-summed output-node spikes.
  Tensor logits;
};

struct LayerInfo {
  std::string name;
  /// Neurons per sample.
  std::size_t neurons = 0;
};

/// An instantiated supernet (or single-path network) with its weights and
/// LIF states. Single owner while running a forward pass.
class NetworkInstance {
 public:
  const SupernetMask& mask() const noexcept { return mask_; }
  const MacroConfig& config() const noexcept { return config_; }

  /// LIF layers in code order: stem, cell1 nodes, reduction, cell2 nodes.
  const std::vector<LayerInfo>& layers() const noexcept { return layers_; }
  std::size_t neuron_count() const;
  /// Element count of all weight tensors.
  std::size_t parameter_count() const;

  void reset();
  bool is_reset() const noexcept { return !dirty_; }

  /// Runs `timesteps` steps. `batch` is N x C x H x W (fed every step) or
  /// N x T' x C x H x W with T' >= timesteps (slice t fed at step t).
  /// Throws ContractViolation unless the network has been reset.
  ForwardResult forward_collect(const Tensor& batch, std::size_t timesteps);

 private:
  friend NetworkInstance build_network(const SupernetMask&, std::uint64_t, const MacroConfig&);

  struct OpInstance {
    OpKind kind;
    std::optional<Tensor> weight;
  };
  struct Cell {
    std::size_t channels = 0;
    std::size_t height = 0;
    std::size_t width = 0;
    /// Per edge in canonical topology order.
    std::vector<std::vector<OpInstance>> edges;
  };

  NetworkInstance(SupernetMask mask, MacroConfig config) : mask_(std::move(mask)), config_(config) {}

  Tensor apply_op(const OpInstance& op, const Tensor& x) const;
  Tensor conv_block(const Tensor& x, const Tensor& weight, int padding) const;
  /// Advances one cell by a timestep; returns the output-node spikes.
  Tensor step_cell(std::size_t cell_index, const Tensor& cell_input, std::size_t& layer_cursor,
                   std::vector<std::vector<Tensor>>& prev_spikes, bool first_step, ActivationCodes& codes);
  void ensure_states(std::size_t batch);

  SupernetMask mask_;
  MacroConfig config_;
  std::vector<LayerInfo> layers_;
  Tensor stem_weight_;
  Tensor reduction_weight_;
  Tensor classifier_weight_;
  std::vector<Cell> cells_;
  std::vector<LIFState> states_;
  bool dirty_ = false;
};

/// Instantiates the macro skeleton: stem 3x3 conv + LIF, cell #1, reduction
/// (2x2 max pool, 1x1 conv doubling channels, LIF), cell #2, classifier.
///
/// Every weight tensor is Kaiming-initialized from its own stream derived
/// from (seed, location, operation), so the same seed yields the same weights
/// for an operation regardless of which other operations the mask keeps.
NetworkInstance build_network(const SupernetMask& mask, std::uint64_t weight_seed, const MacroConfig& config);
NetworkInstance build_network(const ArchitectureSpec& spec, std::uint64_t weight_seed, const MacroConfig& config);

}  // namespace lightsnn
