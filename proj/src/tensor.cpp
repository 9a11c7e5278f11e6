#include "lightsnn/tensor.hpp"

#include <algorithm>
#include <array>
#include <cstdint>
#include <cstring>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <utility>
#include <vector>

#include "lightsnn/errors.hpp"

namespace lightsnn {

std::size_t shape_numel(const Shape& shape) {
  std::size_t n = 1;
  for (std::size_t d : shape) n *= d;
  return n;
}

std::string shape_to_string(const Shape& shape) {
  std::ostringstream os;
  for (std::size_t i = 0; i < shape.size(); ++i) os << (i ? "x" : "") << shape[i];
  return os.str();
}

Tensor::Tensor(Shape shape, float fill) : shape_(std::move(shape)) {
  if (shape_.empty()) throw std::invalid_argument("Tensor: shape must be nonempty");
  for (std::size_t d : shape_)
    if (d == 0) throw std::invalid_argument("Tensor: dimensions must be positive");
  data_.assign(shape_numel(shape_), fill);
}

Tensor::Tensor(Shape shape, std::vector<float> data) : shape_(std::move(shape)), data_(std::move(data)) {
  if (shape_.empty()) throw std::invalid_argument("Tensor: shape must be nonempty");
  for (std::size_t d : shape_)
    if (d == 0) throw std::invalid_argument("Tensor: dimensions must be positive");
  if (shape_numel(shape_) != data_.size())
    throw std::invalid_argument("Tensor: shape " + shape_to_string(shape_) + " does not match " +
                                std::to_string(data_.size()) + " values");
}

float& Tensor::at(std::size_t n, std::size_t c, std::size_t h, std::size_t w) {
  return data_[((n * shape_[1] + c) * shape_[2] + h) * shape_[3] + w];
}

float Tensor::at(std::size_t n, std::size_t c, std::size_t h, std::size_t w) const {
  return data_[((n * shape_[1] + c) * shape_[2] + h) * shape_[3] + w];
}

void require_finite(const Tensor& t, const char* op) {
  // An all-ones exponent marks inf or NaN; OR-reducing the test keeps the loop branch-free.
  std::uint32_t bad = 0;
  for (float v : t.data()) {
    std::uint32_t bits;
    std::memcpy(&bits, &v, sizeof bits);
    bad |= static_cast<std::uint32_t>((bits & 0x7f800000u) == 0x7f800000u);
  }
  if (bad) throw NumericError(std::string(op) + ": non-finite value in output");
}

Tensor kaiming_init(Rng& rng, std::size_t fan_in, Shape shape) {
  if (fan_in == 0) throw std::invalid_argument("kaiming_init: fan_in must be positive");
  Tensor t(std::move(shape));
  const double stddev = std::sqrt(2.0 / static_cast<double>(fan_in));
  for (float& v : t.data()) v = static_cast<float>(rng.normal() * stddev);
  return t;
}

namespace {

void require_rank(const Tensor& t, std::size_t rank, const char* op) {
  if (t.rank() != rank)
    throw std::invalid_argument(std::string(op) + ": expected rank " + std::to_string(rank) + ", got " +
                                shape_to_string(t.shape()));
}

// Output extent of a sliding window; throws when the geometry is empty.
std::size_t window_extent(std::size_t in, int k, int stride, int pad, const char* op) {
  const long long span = static_cast<long long>(in) + 2LL * pad - k;
  if (k <= 0 || stride <= 0 || pad < 0 || span < 0)
    throw std::invalid_argument(std::string(op) + ": invalid window geometry");
  return static_cast<std::size_t>(span / stride + 1);
}

}  // namespace

Tensor conv2d(const Tensor& input, const Tensor& weight, int stride, int padding) {
  require_rank(input, 4, "conv2d");
  require_rank(weight, 4, "conv2d");
  const std::size_t n_batch = input.dim(0), channels = input.dim(1), height = input.dim(2), width = input.dim(3);
  const std::size_t out_channels = weight.dim(0), k = weight.dim(2);
  if (weight.dim(1) != channels)
    throw std::invalid_argument("conv2d: weight expects " + std::to_string(weight.dim(1)) +
                                " input channels, input has " + std::to_string(channels));
  if (weight.dim(3) != k) throw std::invalid_argument("conv2d: kernel must be square");
  const int ki = static_cast<int>(k);
  const std::size_t out_h = window_extent(height, ki, stride, padding, "conv2d");
  const std::size_t out_w = window_extent(width, ki, stride, padding, "conv2d");

  Tensor out({n_batch, out_channels, out_h, out_w});
  const std::size_t plane_out = out_h * out_w;

  // Weights as [c][ky][kx][o] so the innermost loop runs over output channels.
  std::vector<float> wt(weight.size());
  for (std::size_t o = 0; o < out_channels; ++o)
    for (std::size_t c = 0; c < channels; ++c)
      for (std::size_t t = 0; t < k * k; ++t) wt[(c * k * k + t) * out_channels + o] = weight[(o * channels + c) * k * k + t];

  // Accumulator as [position][o]. Each nonzero input scatters into the
  // outputs it touches, so zero-heavy spike maps cost proportionally less.
  std::vector<float> acc(plane_out * out_channels);
  const float* in = input.data().data();
  float* dst = out.data().data();
  const long long pad = padding, st = stride;

  for (std::size_t n = 0; n < n_batch; ++n) {
    std::fill(acc.begin(), acc.end(), 0.0f);
    for (std::size_t c = 0; c < channels; ++c) {
      const float* plane = in + (n * channels + c) * height * width;
      for (std::size_t iy = 0; iy < height; ++iy) {
        for (std::size_t ix = 0; ix < width; ++ix) {
          const float v = plane[iy * width + ix];
          if (v == 0.0f) continue;
          for (int ky = 0; ky < ki; ++ky) {
            const long long ty = static_cast<long long>(iy) + pad - ky;
            if (ty < 0 || ty % st) continue;
            const auto oy = static_cast<std::size_t>(ty / st);
            if (oy >= out_h) continue;
            for (int kx = 0; kx < ki; ++kx) {
              const long long tx = static_cast<long long>(ix) + pad - kx;
              if (tx < 0 || tx % st) continue;
              const auto ox = static_cast<std::size_t>(tx / st);
              if (ox >= out_w) continue;
              float* a = acc.data() + (oy * out_w + ox) * out_channels;
              const float* w = wt.data() + ((c * k + static_cast<std::size_t>(ky)) * k + static_cast<std::size_t>(kx)) * out_channels;
              for (std::size_t o = 0; o < out_channels; ++o) a[o] += v * w[o];
            }
          }
        }
      }
    }
    float* o_batch = dst + n * out_channels * plane_out;
    for (std::size_t p = 0; p < plane_out; ++p)
      for (std::size_t o = 0; o < out_channels; ++o) o_batch[o * plane_out + p] = acc[p * out_channels + o];
  }
  require_finite(out, "conv2d");
  return out;
}

Tensor pool2d(const Tensor& input, PoolKind kind, int kernel, int stride, int padding) {
  require_rank(input, 4, "pool2d");
  if (padding * 2 > kernel) throw std::invalid_argument("pool2d: padding exceeds half the window");
  const std::size_t n_batch = input.dim(0), channels = input.dim(1), height = input.dim(2), width = input.dim(3);
  const std::size_t out_h = window_extent(height, kernel, stride, padding, "pool2d");
  const std::size_t out_w = window_extent(width, kernel, stride, padding, "pool2d");
  Tensor out({n_batch, channels, out_h, out_w});
  const double inv_area = 1.0 / static_cast<double>(kernel * kernel);

  for (std::size_t p = 0; p < n_batch * channels; ++p) {
    const float* plane = input.data().data() + p * height * width;
    float* o_plane = out.data().data() + p * out_h * out_w;
    for (std::size_t oy = 0; oy < out_h; ++oy) {
      for (std::size_t ox = 0; ox < out_w; ++ox) {
        double sum = 0.0;
        float best = -std::numeric_limits<float>::infinity();
        for (int ky = 0; ky < kernel; ++ky) {
          const long long iy = static_cast<long long>(oy) * stride - padding + ky;
          if (iy < 0 || iy >= static_cast<long long>(height)) continue;
          for (int kx = 0; kx < kernel; ++kx) {
            const long long ix = static_cast<long long>(ox) * stride - padding + kx;
            if (ix < 0 || ix >= static_cast<long long>(width)) continue;
            const float v = plane[iy * width + ix];
            sum += v;
            best = std::max(best, v);
          }
        }
        o_plane[oy * out_w + ox] = kind == PoolKind::Max ? best : static_cast<float>(sum * inv_area);
      }
    }
  }
  require_finite(out, "pool2d");
  return out;
}

Tensor normalize_per_channel(const Tensor& input) {
  if (input.rank() < 2) throw std::invalid_argument("normalize_per_channel: needs batch and channel dims");
  constexpr double kEps = 1e-5;
  const std::size_t n_batch = input.dim(0), channels = input.dim(1);
  const std::size_t inner = input.size() / (n_batch * channels);
  Tensor out = input;
  const float* src = input.data().data();
  float* dst = out.data().data();
  const double count = static_cast<double>(n_batch * inner);

  for (std::size_t c = 0; c < channels; ++c) {
    double sum = 0.0;
    for (std::size_t n = 0; n < n_batch; ++n) {
      const float* p = src + (n * channels + c) * inner;
      for (std::size_t i = 0; i < inner; ++i) sum += p[i];
    }
    const double mean = sum / count;
    double sq = 0.0;
    for (std::size_t n = 0; n < n_batch; ++n) {
      const float* p = src + (n * channels + c) * inner;
      for (std::size_t i = 0; i < inner; ++i) {
        const double d = p[i] - mean;
        sq += d * d;
      }
    }
    const double inv_std = 1.0 / std::sqrt(sq / count + kEps);
    for (std::size_t n = 0; n < n_batch; ++n) {
      const float* p = src + (n * channels + c) * inner;
      float* q = dst + (n * channels + c) * inner;
      for (std::size_t i = 0; i < inner; ++i) q[i] = static_cast<float>((p[i] - mean) * inv_std);
    }
  }
  require_finite(out, "normalize_per_channel");
  return out;
}

Tensor global_avg_pool(const Tensor& input) {
  require_rank(input, 4, "global_avg_pool");
  const std::size_t n_batch = input.dim(0), channels = input.dim(1);
  const std::size_t area = input.dim(2) * input.dim(3);
  Tensor out({n_batch, channels});
  for (std::size_t p = 0; p < n_batch * channels; ++p) {
    double sum = 0.0;
    const float* plane = input.data().data() + p * area;
    for (std::size_t i = 0; i < area; ++i) sum += plane[i];
    out[p] = static_cast<float>(sum / static_cast<double>(area));
  }
  return out;
}

Tensor linear(const Tensor& input, const Tensor& weight) {
  require_rank(input, 2, "linear");
  require_rank(weight, 2, "linear");
  if (input.dim(1) != weight.dim(1)) throw std::invalid_argument("linear: feature dimension mismatch");
  const std::size_t n_batch = input.dim(0), features = input.dim(1), outputs = weight.dim(0);
  Tensor out({n_batch, outputs});
  for (std::size_t n = 0; n < n_batch; ++n) {
    for (std::size_t o = 0; o < outputs; ++o) {
      double sum = 0.0;
      for (std::size_t f = 0; f < features; ++f)
        sum += static_cast<double>(input[n * features + f]) * weight[o * features + f];
      out[n * outputs + o] = static_cast<float>(sum);
    }
  }
  require_finite(out, "linear");
  return out;
}

void add_inplace(Tensor& acc, const Tensor& x) {
  if (acc.shape() != x.shape())
    throw std::invalid_argument("add_inplace: shape " + shape_to_string(acc.shape()) + " vs " +
                                shape_to_string(x.shape()));
  auto a = acc.data();
  auto b = x.data();
  for (std::size_t i = 0; i < a.size(); ++i) a[i] += b[i];
}

Tensor timestep_slice(const Tensor& events, std::size_t t) {
  require_rank(events, 5, "timestep_slice");
  const std::size_t n_batch = events.dim(0), steps = events.dim(1);
  if (t >= steps) throw std::invalid_argument("timestep_slice: timestep out of range");
  const std::size_t frame = events.dim(2) * events.dim(3) * events.dim(4);
  Tensor out({n_batch, events.dim(2), events.dim(3), events.dim(4)});
  for (std::size_t n = 0; n < n_batch; ++n) {
    const auto src = events.data().subspan((n * steps + t) * frame, frame);
    std::copy(src.begin(), src.end(), out.data().begin() + static_cast<std::ptrdiff_t>(n * frame));
  }
  return out;
}

namespace {

constexpr std::array<char, 4> kMagic{'L', 'S', 'N', 'T'};

void put_u32(std::ostream& out, std::uint32_t v) {
  const char bytes[4] = {static_cast<char>(v & 0xFF), static_cast<char>((v >> 8) & 0xFF),
                         static_cast<char>((v >> 16) & 0xFF), static_cast<char>((v >> 24) & 0xFF)};
  out.write(bytes, 4);
}

std::uint32_t get_u32(std::istream& in) {
  unsigned char bytes[4];
  if (!in.read(reinterpret_cast<char*>(bytes), 4)) throw DataFormatError("LSNT: truncated header");
  return static_cast<std::uint32_t>(bytes[0]) | (static_cast<std::uint32_t>(bytes[1]) << 8) |
         (static_cast<std::uint32_t>(bytes[2]) << 16) | (static_cast<std::uint32_t>(bytes[3]) << 24);
}

}  // namespace

void write_lsnt(std::ostream& out, const Tensor& t) {
  out.write(kMagic.data(), kMagic.size());
  put_u32(out, static_cast<std::uint32_t>(t.rank()));
  for (std::size_t d : t.shape()) put_u32(out, static_cast<std::uint32_t>(d));
  for (float v : t.data()) {
    std::uint32_t bits;
    static_assert(sizeof(bits) == sizeof(v));
    std::memcpy(&bits, &v, sizeof(bits));
    put_u32(out, bits);
  }
  if (!out) throw DataFormatError("LSNT: write failed");
}

Tensor read_lsnt(std::istream& in) {
  std::array<char, 4> magic{};
  if (!in.read(magic.data(), magic.size()) || magic != kMagic) throw DataFormatError("LSNT: bad magic");
  const std::uint32_t rank = get_u32(in);
  if (rank == 0 || rank > 8) throw DataFormatError("LSNT: unsupported rank " + std::to_string(rank));
  Shape shape(rank);
  std::size_t count = 1;
  for (auto& d : shape) {
    d = get_u32(in);
    if (d == 0) throw DataFormatError("LSNT: zero dimension");
    count *= d;
    if (count > (std::size_t{1} << 32)) throw DataFormatError("LSNT: tensor too large");
  }
  std::vector<float> data(count);
  for (auto& v : data) {
    const std::uint32_t bits = get_u32(in);
    std::memcpy(&v, &bits, sizeof(v));
  }
  if (in.peek() != std::char_traits<char>::eof()) throw DataFormatError("LSNT: trailing bytes");
  return Tensor(std::move(shape), std::move(data));
}

void save_lsnt(const std::filesystem::path& path, const Tensor& t) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataFormatError("cannot open " + path.string() + " for writing");
  write_lsnt(out, t);
}

Tensor load_lsnt(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataFormatError("cannot open " + path.string());
  return read_lsnt(in);
}

}  // namespace lightsnn
