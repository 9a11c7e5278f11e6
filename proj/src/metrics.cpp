#include "lightsnn/metrics.hpp"

#include <stdexcept>

namespace lightsnn {

SarReport sar_from_forward(const NetworkInstance& net, const ForwardResult& fwd, std::size_t batch_size) {
  SarReport r;
  r.timesteps = fwd.codes.size();
  r.batch_size = batch_size;
  const auto& layers = net.layers();
  if (fwd.layer_spikes.size() != layers.size()) throw std::invalid_argument("sar_from_forward: layer count mismatch");
  for (std::size_t l = 0; l < layers.size(); ++l) {
    r.layers.push_back({layers[l].name, layers[l].neurons, fwd.layer_spikes[l]});
    r.total_spikes += fwd.layer_spikes[l];
    r.neuron_count += layers[l].neurons;
  }
  const double denom = static_cast<double>(r.neuron_count) * static_cast<double>(r.timesteps) *
                       static_cast<double>(r.batch_size);
  r.sar = denom > 0 ? static_cast<double>(r.total_spikes) / denom : 0.0;
  return r;
}

SarReport compute_sar(NetworkInstance& net, const Tensor& batch, std::size_t timesteps) {
  net.reset();
  const ForwardResult fwd = net.forward_collect(batch, timesteps);
  return sar_from_forward(net, fwd, batch.dim(0));
}

std::vector<SpikeTrace> export_spike_trace(const NetworkInstance& net, const ForwardResult& fwd) {
  std::vector<SpikeTrace> traces;
  if (fwd.codes.empty()) return traces;
  const std::size_t steps = fwd.codes.size();
  const std::size_t batch = fwd.codes.front().batch;
  for (std::size_t l = 0; l < net.layers().size(); ++l) {
    const std::size_t bits = fwd.codes.front().layers[l].bits;
    Tensor t({steps, batch, bits});
    for (std::size_t s = 0; s < steps; ++s) {
      const LayerCodes& codes = fwd.codes[s].layers[l];
      for (std::size_t n = 0; n < batch; ++n)
        for (std::size_t b = 0; b < bits; ++b) t[(s * batch + n) * bits + b] = codes.bit(n, b) ? 1.0f : 0.0f;
    }
    traces.push_back({net.layers()[l].name, std::move(t)});
  }
  return traces;
}

std::uint64_t count_params(const ArchitectureSpec& spec, const MacroConfig& config) {
  spec.validate();
  const std::uint64_t c1 = config.stem_channels, c2 = 2 * config.stem_channels;
  std::uint64_t total = 9 * config.in_channels * c1 + c1 * c2 + c2 * config.num_classes;
  for (const std::uint64_t c : {c1, c2}) {
    for (OpKind op : spec.ops) {
      if (op == OpKind::Conv1x1) total += c * c;
      if (op == OpKind::Conv3x3) total += 9 * c * c;
    }
  }
  return total;
}

}  // namespace lightsnn
