#pragma once

#include <cstddef>
#include <cstdint>

#include "lightsnn/tensor.hpp"

namespace lightsnn {

/// Discrete LIF parameters: v <- decay * v + I, fire when v >= v_threshold,
/// then hard reset to v_reset.
struct LIFConfig {
  float v_threshold = 1.0f;
  float v_reset = 0.0f;
  float decay = 0.5f;

  /// Throws std::invalid_argument unless v_threshold > v_reset and 0 < decay <= 1.
  void validate() const;
};

/// Membrane potentials of one LIF layer plus a running spike counter.
/// The leading dimension of `shape` is the batch.
class LIFState {
 public:
  LIFState(Shape shape, const LIFConfig& cfg);

  const Tensor& membrane() const noexcept { return membrane_; }
  std::uint64_t spike_count() const noexcept { return spike_count_; }
  /// Neurons per sample.
  std::size_t neuron_count() const noexcept { return neuron_count_; }
  std::size_t batch_size() const noexcept { return membrane_.dim(0); }
  std::size_t steps() const noexcept { return steps_; }

 private:
  friend Tensor lif_step(LIFState&, const Tensor&, const LIFConfig&);
  friend void lif_reset(LIFState&, const LIFConfig&);

  Tensor membrane_;
  std::uint64_t spike_count_ = 0;
  std::size_t neuron_count_ = 0;
  std::size_t steps_ = 0;
};

/// Advances the layer one timestep and returns the binary spike tensor.
Tensor lif_step(LIFState& state, const Tensor& input_current, const LIFConfig& cfg);

/// Membrane back to v_reset, counters to zero.
void lif_reset(LIFState& state, const LIFConfig& cfg);

}  // namespace lightsnn
