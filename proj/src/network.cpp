#include "lightsnn/network.hpp"

#include <algorithm>
#include <bit>
#include <stdexcept>

#include "lightsnn/errors.hpp"

namespace lightsnn {
namespace {

enum WeightSite : std::uint64_t { kStem = 1, kReduction = 2, kClassifier = 3, kCellEdge = 4 };

Tensor init_weight(std::uint64_t seed, std::initializer_list<std::uint64_t> key, std::size_t fan_in, Shape shape) {
  Rng rng(Rng::derive(seed, key));
  return kaiming_init(rng, fan_in, std::move(shape));
}

bool all_zero(const Tensor& t) {
  return std::all_of(t.data().begin(), t.data().end(), [](float v) { return v == 0.0f; });
}

void pack_codes(const Tensor& spikes, LayerCodes& out) {
  const std::size_t batch = spikes.dim(0);
  out.bits = spikes.size() / batch;
  out.words_per_sample = (out.bits + 63) / 64;
  out.words.assign(batch * out.words_per_sample, 0);
  const float* s = spikes.data().data();
  for (std::size_t n = 0; n < batch; ++n) {
    std::uint64_t* w = out.words.data() + n * out.words_per_sample;
    const float* row = s + n * out.bits;
    for (std::size_t base = 0; base < out.bits; base += 64) {
      const std::size_t len = std::min<std::size_t>(64, out.bits - base);
      std::uint64_t word = 0;
      for (std::size_t b = 0; b < len; ++b) word |= static_cast<std::uint64_t>(row[base + b] != 0.0f) << b;
      w[base / 64] = word;
    }
  }
}

}  // namespace

void MacroConfig::validate() const {
  if (in_channels == 0 || stem_channels == 0 || num_classes == 0)
    throw std::invalid_argument("MacroConfig: channel and class counts must be positive");
  if (height < 2 || width < 2) throw std::invalid_argument("MacroConfig: input must be at least 2x2");
  lif.validate();
}

std::size_t LayerCodes::popcount(std::size_t sample_index) const {
  std::size_t n = 0;
  for (std::uint64_t w : sample(sample_index)) n += static_cast<std::size_t>(std::popcount(w));
  return n;
}

std::size_t ActivationCodes::neuron_count() const {
  std::size_t n = 0;
  for (const auto& l : layers) n += l.bits;
  return n;
}

std::size_t NetworkInstance::neuron_count() const {
  std::size_t n = 0;
  for (const auto& l : layers_) n += l.neurons;
  return n;
}

std::size_t NetworkInstance::parameter_count() const {
  std::size_t n = stem_weight_.size() + reduction_weight_.size() + classifier_weight_.size();
  for (const auto& cell : cells_)
    for (const auto& edge : cell.edges)
      for (const auto& op : edge)
        if (op.weight) n += op.weight->size();
  return n;
}

void NetworkInstance::reset() {
  for (auto& s : states_) lif_reset(s, config_.lif);
  dirty_ = false;
}

void NetworkInstance::ensure_states(std::size_t batch) {
  if (!states_.empty() && states_.front().batch_size() == batch) return;
  states_.clear();
  auto add = [&](std::size_t c, std::size_t h, std::size_t w) { states_.emplace_back(Shape{batch, c, h, w}, config_.lif); };
  add(config_.stem_channels, config_.height, config_.width);
  for (std::size_t k = 0; k < mask_.topology().node_count(); ++k) add(cells_[0].channels, cells_[0].height, cells_[0].width);
  add(cells_[1].channels, cells_[1].height, cells_[1].width);
  for (std::size_t k = 0; k < mask_.topology().node_count(); ++k) add(cells_[1].channels, cells_[1].height, cells_[1].width);
}

Tensor NetworkInstance::conv_block(const Tensor& x, const Tensor& weight, int padding) const {
  Tensor y = conv2d(x, weight, 1, padding);
  return config_.normalize ? normalize_per_channel(y) : y;
}

Tensor NetworkInstance::apply_op(const OpInstance& op, const Tensor& x) const {
  switch (op.kind) {
    case OpKind::Zeroize:
      return Tensor(x.shape());
    case OpKind::Skip:
      return x;
    case OpKind::Conv1x1:
      return conv_block(x, *op.weight, 0);
    case OpKind::Conv3x3:
      return conv_block(x, *op.weight, 1);
    case OpKind::AvgPool3x3:
      return pool2d(x, PoolKind::Avg, 3, 1, 1);
    case OpKind::MaxPool3x3:
      return pool2d(x, PoolKind::Max, 3, 1, 1);
  }
  throw std::logic_error("apply_op: unknown operation");
}

Tensor NetworkInstance::step_cell(std::size_t cell_index, const Tensor& cell_input, std::size_t& layer_cursor,
                                  std::vector<std::vector<Tensor>>& prev_spikes, bool first_step,
                                  ActivationCodes& codes) {
  const Cell& cell = cells_[cell_index];
  const CellTopology& topo = mask_.topology();
  const std::size_t nodes = topo.node_count();
  std::vector<Tensor> spikes(nodes);

  for (std::size_t j = 0; j < nodes; ++j) {
    Tensor current = j == 0 ? cell_input : Tensor(cell_input.shape());
    for (std::size_t e = 0; e < topo.edge_count(); ++e) {
      const Edge& edge = topo.edge(e);
      if (edge.dst != j || cell.edges[e].empty()) continue;
      const Tensor* source = nullptr;
      if (edge.direction == EdgeDirection::Forward) {
        source = &spikes[edge.src];
      } else {
        // The backward buffer is all zeros before the first step.
        if (first_step) continue;
        source = &prev_spikes[cell_index][edge.src];
      }
      if (all_zero(*source)) continue;
      for (const OpInstance& op : cell.edges[e]) {
        if (op.kind == OpKind::Zeroize) continue;
        add_inplace(current, apply_op(op, *source));
      }
    }
    spikes[j] = lif_step(states_[layer_cursor], current, config_.lif);
    pack_codes(spikes[j], codes.layers[layer_cursor]);
    ++layer_cursor;
  }
  Tensor out = spikes.back();
  prev_spikes[cell_index] = std::move(spikes);
  return out;
}

ForwardResult NetworkInstance::forward_collect(const Tensor& batch, std::size_t timesteps) {
  if (dirty_) throw ContractViolation("forward_collect: network state not reset");
  if (timesteps == 0) throw std::invalid_argument("forward_collect: timesteps must be positive");
  const bool events = batch.rank() == 5;
  if (batch.rank() != 4 && !events) throw std::invalid_argument("forward_collect: batch must be rank 4 or 5");
  const std::size_t off = events ? 1 : 0;
  if (batch.dim(1 + off) != config_.in_channels || batch.dim(2 + off) != config_.height ||
      batch.dim(3 + off) != config_.width)
    throw std::invalid_argument("forward_collect: batch shape " + shape_to_string(batch.shape()) +
                                " does not match network input");
  if (events && batch.dim(1) < timesteps)
    throw std::invalid_argument("forward_collect: event batch has fewer timesteps than requested");

  const std::size_t n_batch = batch.dim(0);
  ensure_states(n_batch);
  dirty_ = true;

  ForwardResult result;
  std::vector<std::vector<Tensor>> prev_spikes(cells_.size());
  Tensor accumulated({n_batch, cells_[1].channels, cells_[1].height, cells_[1].width});

  for (std::size_t t = 0; t < timesteps; ++t) {
    const Tensor frame = events ? timestep_slice(batch, t) : batch;
    ActivationCodes codes;
    codes.batch = n_batch;
    codes.layers.resize(layers_.size());
    std::size_t cursor = 0;

    Tensor s = lif_step(states_[cursor], conv_block(frame, stem_weight_, 1), config_.lif);
    pack_codes(s, codes.layers[cursor++]);

    Tensor c1 = step_cell(0, s, cursor, prev_spikes, t == 0, codes);

    Tensor pooled = pool2d(c1, PoolKind::Max, 2, 2, 0);
    Tensor r = lif_step(states_[cursor], conv_block(pooled, reduction_weight_, 0), config_.lif);
    pack_codes(r, codes.layers[cursor++]);

    Tensor c2 = step_cell(1, r, cursor, prev_spikes, t == 0, codes);
    add_inplace(accumulated, c2);
    result.codes.push_back(std::move(codes));
  }

  result.logits = linear(global_avg_pool(accumulated), classifier_weight_);
  for (const auto& st : states_) result.layer_spikes.push_back(st.spike_count());
  return result;
}

NetworkInstance build_network(const SupernetMask& mask, std::uint64_t weight_seed, const MacroConfig& config) {
  config.validate();
  NetworkInstance net(mask, config);
  const std::size_t c1 = config.stem_channels, c2 = 2 * config.stem_channels;
  const std::size_t h2 = config.height / 2, w2 = config.width / 2;
  const CellTopology& topo = mask.topology();

  net.stem_weight_ = init_weight(weight_seed, {kStem}, config.in_channels * 9, {c1, config.in_channels, 3, 3});
  net.reduction_weight_ = init_weight(weight_seed, {kReduction}, c1, {c2, c1, 1, 1});
  net.classifier_weight_ = init_weight(weight_seed, {kClassifier}, c2, {config.num_classes, c2});

  net.cells_.resize(2);
  net.cells_[0] = {c1, config.height, config.width, {}};
  net.cells_[1] = {c2, h2, w2, {}};
  for (std::size_t ci = 0; ci < 2; ++ci) {
    auto& cell = net.cells_[ci];
    cell.edges.resize(topo.edge_count());
    for (std::size_t e = 0; e < topo.edge_count(); ++e) {
      for (OpKind op : mask.active_ops(e)) {
        NetworkInstance::OpInstance inst{op, std::nullopt};
        const std::uint64_t key_op = static_cast<std::uint64_t>(op);
        const std::size_t c = cell.channels;
        if (op == OpKind::Conv1x1)
          inst.weight = init_weight(weight_seed, {kCellEdge, ci, e, key_op}, c, {c, c, 1, 1});
        else if (op == OpKind::Conv3x3)
          inst.weight = init_weight(weight_seed, {kCellEdge, ci, e, key_op}, c * 9, {c, c, 3, 3});
        cell.edges[e].push_back(std::move(inst));
      }
    }
  }

  net.layers_.push_back({"stem", c1 * config.height * config.width});
  for (std::size_t k = 0; k < topo.node_count(); ++k)
    net.layers_.push_back({"cell1.node" + std::to_string(k), c1 * config.height * config.width});
  net.layers_.push_back({"reduction", c2 * h2 * w2});
  for (std::size_t k = 0; k < topo.node_count(); ++k)
    net.layers_.push_back({"cell2.node" + std::to_string(k), c2 * h2 * w2});
  return net;
}

NetworkInstance build_network(const ArchitectureSpec& spec, std::uint64_t weight_seed, const MacroConfig& config) {
  return build_network(SupernetMask::from_spec(spec), weight_seed, config);
}

}  // namespace lightsnn
