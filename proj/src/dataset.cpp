#include "lightsnn/dataset.hpp"

#include <fstream>
#include <iterator>
#include <stdexcept>
#include <string>

#include "lightsnn/errors.hpp"

namespace lightsnn {
namespace {

constexpr std::size_t kCifarPixels = 3 * 32 * 32;

}  // namespace

std::size_t cifar_record_size(CifarVariant variant) {
  return kCifarPixels + (variant == CifarVariant::Cifar10 ? 1 : 2);
}

DatasetBatch parse_cifar_batch(std::span<const std::uint8_t> bytes, std::size_t n, Rng& rng, CifarVariant variant) {
  const std::size_t record = cifar_record_size(variant);
  const std::size_t label_bytes = record - kCifarPixels;
  if (bytes.empty() || bytes.size() % record != 0)
    throw DataFormatError("CIFAR: file length " + std::to_string(bytes.size()) + " is not a multiple of " +
                          std::to_string(record));
  const std::size_t records = bytes.size() / record;
  const int label_limit = variant == CifarVariant::Cifar10 ? 10 : 100;
  for (std::size_t r = 0; r < records; ++r) {
    const int fine = bytes[r * record + label_bytes - 1];
    if (fine >= label_limit) throw DataFormatError("CIFAR: record " + std::to_string(r) + " has label " + std::to_string(fine));
    if (variant == CifarVariant::Cifar100 && bytes[r * record] >= 20)
      throw DataFormatError("CIFAR: record " + std::to_string(r) + " has coarse label out of range");
  }
  if (n == 0 || n > records)
    throw std::invalid_argument("CIFAR: cannot sample " + std::to_string(n) + " of " + std::to_string(records) +
                                " records");

  // Partial Fisher-Yates.
  std::vector<std::size_t> order(records);
  for (std::size_t i = 0; i < records; ++i) order[i] = i;
  for (std::size_t i = 0; i < n; ++i) std::swap(order[i], order[i + rng.uniform_index(records - i)]);

  DatasetBatch batch{Tensor({n, 3, 32, 32}), {}};
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint8_t* rec = bytes.data() + order[i] * record;
    batch.labels.push_back(rec[label_bytes - 1]);
    for (std::size_t p = 0; p < kCifarPixels; ++p)
      batch.images[i * kCifarPixels + p] = static_cast<float>(rec[label_bytes + p]) / 255.0f;
  }
  return batch;
}

DatasetBatch load_cifar_batch(const std::filesystem::path& path, std::size_t n, Rng& rng, CifarVariant variant) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataFormatError("cannot open " + path.string());
  const std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_cifar_batch(bytes, n, rng, variant);
}

DatasetBatch sample_events(Rng& rng, const std::vector<Tensor>& rate_maps, const std::vector<int>& labels,
                           std::size_t timesteps) {
  if (rate_maps.empty() || labels.empty() || timesteps == 0)
    throw std::invalid_argument("sample_events: need rate maps, labels and timesteps");
  const Shape& frame = rate_maps.front().shape();
  if (frame.size() != 3) throw std::invalid_argument("sample_events: rate maps must be C x H x W");
  for (const auto& m : rate_maps)
    if (m.shape() != frame) throw std::invalid_argument("sample_events: rate maps differ in shape");
  const std::size_t frame_size = shape_numel(frame);

  DatasetBatch batch{Tensor({labels.size(), timesteps, frame[0], frame[1], frame[2]}), labels};
  for (std::size_t n = 0; n < labels.size(); ++n) {
    if (labels[n] < 0 || static_cast<std::size_t>(labels[n]) >= rate_maps.size())
      throw std::invalid_argument("sample_events: label without a rate map");
    const Tensor& rates = rate_maps[static_cast<std::size_t>(labels[n])];
    for (std::size_t t = 0; t < timesteps; ++t) {
      float* dst = batch.images.data().data() + (n * timesteps + t) * frame_size;
      for (std::size_t p = 0; p < frame_size; ++p) dst[p] = rng.bernoulli(rates[p]) ? 1.0f : 0.0f;
    }
  }
  return batch;
}

DatasetBatch gen_synthetic_events(Rng& rng, std::size_t n, std::size_t timesteps, std::size_t classes,
                                  std::size_t channels, std::size_t height, std::size_t width) {
  if (classes < 2) throw std::invalid_argument("gen_synthetic_events: need at least 2 classes");
  if (n == 0) throw std::invalid_argument("gen_synthetic_events: need at least one sample");
  std::vector<Tensor> maps;
  for (std::size_t c = 0; c < classes; ++c) {
    Tensor m({channels, height, width});
    for (float& v : m.data()) v = static_cast<float>(0.5 * rng.uniform());
    maps.push_back(std::move(m));
  }
  std::vector<int> labels(n);
  for (auto& l : labels) l = static_cast<int>(rng.uniform_index(classes));
  return sample_events(rng, maps, labels, timesteps);
}

}  // namespace lightsnn
