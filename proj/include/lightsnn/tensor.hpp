#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "lightsnn/rng.hpp"

namespace lightsnn {

using Shape = std::vector<std::size_t>;

std::size_t shape_numel(const Shape& shape);
std::string shape_to_string(const Shape& shape);

/// Dense row-major float tensor. Activations use NCHW layout; event batches
/// use N x T x C x H x W.
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(Shape shape, float fill = 0.0f);
  Tensor(Shape shape, std::vector<float> data);

  const Shape& shape() const noexcept { return shape_; }
  std::size_t rank() const noexcept { return shape_.size(); }
  std::size_t dim(std::size_t i) const { return shape_.at(i); }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  std::span<float> data() noexcept { return data_; }
  std::span<const float> data() const noexcept { return data_; }
  const std::vector<float>& values() const noexcept { return data_; }

  float& operator[](std::size_t i) { return data_[i]; }
  float operator[](std::size_t i) const { return data_[i]; }

  /// NCHW element access; only valid on rank-4 tensors.
  float& at(std::size_t n, std::size_t c, std::size_t h, std::size_t w);
  float at(std::size_t n, std::size_t c, std::size_t h, std::size_t w) const;

  bool operator==(const Tensor& other) const = default;

 private:
  Shape shape_;
  std::vector<float> data_;
};

/// Throws NumericError naming `op` if any element is NaN or Inf.
void require_finite(const Tensor& t, const char* op);

/// i.i.d. N(0, 2 / fan_in).
Tensor kaiming_init(Rng& rng, std::size_t fan_in, Shape shape);

/// Cross-correlation of an NCHW input with an O x C x k x k weight.
/// Reductions accumulate in double.
Tensor conv2d(const Tensor& input, const Tensor& weight, int stride, int padding);

enum class PoolKind { Avg, Max };

/// Average pooling counts padded cells as zeros and divides by k*k. Max
/// pooling ignores padded cells.
Tensor pool2d(const Tensor& input, PoolKind kind, int kernel, int stride, int padding);

/// Parameter-free per-channel standardization over (N, H, W) with
/// variance epsilon 1e-5.
Tensor normalize_per_channel(const Tensor& input);

/// Mean over H and W: N x C x H x W -> N x C.
Tensor global_avg_pool(const Tensor& input);

/// N x F input times O x F weight -> N x O.
Tensor linear(const Tensor& input, const Tensor& weight);

/// acc += x elementwise; shapes must match.
void add_inplace(Tensor& acc, const Tensor& x);

/// Slice timestep t out of an N x T x C x H x W tensor.
Tensor timestep_slice(const Tensor& events, std::size_t t);

// LSNT: "LSNT", u32 rank, rank x u32 dims, f32 values; all little-endian.
void write_lsnt(std::ostream& out, const Tensor& t);
Tensor read_lsnt(std::istream& in);
void save_lsnt(const std::filesystem::path& path, const Tensor& t);
Tensor load_lsnt(const std::filesystem::path& path);

}  // namespace lightsnn
