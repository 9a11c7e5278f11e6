#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "lightsnn/rng.hpp"
#include "lightsnn/tensor.hpp"

namespace lightsnn {

/// N x C x H x W in [0, 1] for static images, N x T x C x H x W in {0, 1}
/// for event streams. Labels are carried for provenance only.
struct DatasetBatch {
  Tensor images;
  std::vector<int> labels;

  bool is_event() const { return images.rank() == 5; }
};

enum class CifarVariant {
  /// 1 label byte + 3072 pixel bytes per record.
  Cifar10,
  /// coarse label byte + fine label byte + 3072 pixel bytes per record.
  Cifar100,
};

std::size_t cifar_record_size(CifarVariant variant);

/// Samples n records uniformly without replacement and scales pixels by 1/255.
/// Throws DataFormatError on a bad length or an out-of-range label.
DatasetBatch parse_cifar_batch(std::span<const std::uint8_t> bytes, std::size_t n, Rng& rng, CifarVariant variant);
DatasetBatch load_cifar_batch(const std::filesystem::path& path, std::size_t n, Rng& rng,
                              CifarVariant variant = CifarVariant::Cifar10);

/// Draws binary events i.i.d. Bernoulli(rate) per timestep and pixel from the
/// C x H x W rate map of each sample's label.
DatasetBatch sample_events(Rng& rng, const std::vector<Tensor>& rate_maps, const std::vector<int>& labels,
                           std::size_t timesteps);

/// Synthetic event-stream stand-in: one random rate map in [0, 0.5] per class,
/// uniformly random labels, then sample_events.
DatasetBatch gen_synthetic_events(Rng& rng, std::size_t n, std::size_t timesteps, std::size_t classes,
                                  std::size_t channels, std::size_t height, std::size_t width);

}  // namespace lightsnn
