#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "lightsnn/network.hpp"

namespace lightsnn {

struct LayerActivity {
  std::string name;
  /// Neurons per sample.
  std::uint64_t neurons = 0;
  std::uint64_t spikes = 0;

  bool operator==(const LayerActivity&) const = default;
};

/// Spiking activity rate: total_spikes / (neuron_count * timesteps * batch_size).
struct SarReport {
  std::uint64_t total_spikes = 0;
  std::uint64_t neuron_count = 0;
  std::size_t timesteps = 0;
  std::size_t batch_size = 0;
  double sar = 0.0;
  std::vector<LayerActivity> layers;

  bool operator==(const SarReport&) const = default;
};

/// Resets the network, runs the batch and reports spike activity over every
/// LIF layer (stem and reduction included).
SarReport compute_sar(NetworkInstance& net, const Tensor& batch, std::size_t timesteps);

/// SAR from a finished forward pass, using the LIF spike counters.
SarReport sar_from_forward(const NetworkInstance& net, const ForwardResult& fwd, std::size_t batch_size);

/// Spike trains of one LIF layer as a T x N x neurons 0/1 tensor.
struct SpikeTrace {
  std::string layer;
  Tensor spikes;
};

/// Unpacks the activation codes of a forward pass into per-layer spike trains.
std::vector<SpikeTrace> export_spike_trace(const NetworkInstance& net, const ForwardResult& fwd);

/// Weight count of the single-path network, from closed-form op sizes.
std::uint64_t count_params(const ArchitectureSpec& spec, const MacroConfig& config);

}  // namespace lightsnn
