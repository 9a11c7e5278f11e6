#include "lightsnn/lif.hpp"

#include <cmath>
#include <stdexcept>

namespace lightsnn {

void LIFConfig::validate() const {
  if (!std::isfinite(v_threshold) || !std::isfinite(v_reset) || !(v_threshold > v_reset))
    throw std::invalid_argument("LIFConfig: v_threshold must exceed v_reset");
  if (!(decay > 0.0f && decay <= 1.0f)) throw std::invalid_argument("LIFConfig: decay must lie in (0, 1]");
}

LIFState::LIFState(Shape shape, const LIFConfig& cfg) : membrane_(std::move(shape), cfg.v_reset) {
  cfg.validate();
  neuron_count_ = membrane_.size() / membrane_.dim(0);
}

Tensor lif_step(LIFState& state, const Tensor& input_current, const LIFConfig& cfg) {
  if (input_current.shape() != state.membrane_.shape())
    throw std::invalid_argument("lif_step: input " + shape_to_string(input_current.shape()) +
                                " does not match membrane " + shape_to_string(state.membrane_.shape()));
  require_finite(input_current, "lif_step");
  Tensor spikes(input_current.shape());
  auto v = state.membrane_.data();
  auto in = input_current.data();
  auto out = spikes.data();
  std::uint64_t fired = 0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const float next = cfg.decay * v[i] + in[i];
    const bool fire = next >= cfg.v_threshold;
    out[i] = fire ? 1.0f : 0.0f;
    v[i] = fire ? cfg.v_reset : next;
    fired += fire ? 1 : 0;
  }
  state.spike_count_ += fired;
  ++state.steps_;
  return spikes;
}

void lif_reset(LIFState& state, const LIFConfig& cfg) {
  for (float& v : state.membrane_.data()) v = cfg.v_reset;
  state.spike_count_ = 0;
  state.steps_ = 0;
}

}  // namespace lightsnn
