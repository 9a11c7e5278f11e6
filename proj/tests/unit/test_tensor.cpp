#include <doctest.h>

#include <cmath>
#include <sstream>

#include "lightsnn/errors.hpp"
#include "lightsnn/tensor.hpp"
#include "oracles.hpp"

using namespace lightsnn;

namespace {

Tensor random_tensor(Rng& rng, Shape shape) {
  Tensor t(std::move(shape));
  for (float& v : t.data()) v = static_cast<float>(rng.uniform() * 2.0 - 1.0);
  return t;
}

}  // namespace

TEST_CASE("rng is reproducible and seeds diverge") {
  Rng a(42), b(42), c(43);
  for (int i = 0; i < 100; ++i) {
    const auto x = a.next_u64();
    CHECK(x == b.next_u64());
    (void)c;
  }
  Rng d(42), e(43);
  CHECK(d.next_u64() != e.next_u64());
  CHECK(Rng::derive(1, SeedPurpose::Weights) != Rng::derive(1, SeedPurpose::Data));
  CHECK(Rng::derive(1, {2, 3}) != Rng::derive(1, {3, 2}));
}

TEST_CASE("rng uniform_index stays in range and rejects zero") {
  Rng rng(9);
  for (int i = 0; i < 1000; ++i) CHECK(rng.uniform_index(7) < 7);
  CHECK_THROWS_AS(rng.uniform_index(0), std::invalid_argument);
}

TEST_CASE("kaiming_init moments") {
  SUBCASE("fan_in 8, 10^4 draws: sample variance within 10% of 0.25") {
    Rng rng(1);
    const Tensor t = kaiming_init(rng, 8, {10000});
    double mean = 0, sq = 0;
    for (float v : t.data()) mean += v;
    mean /= t.size();
    for (float v : t.data()) sq += (v - mean) * (v - mean);
    const double var = sq / (t.size() - 1);
    CHECK(std::abs(var - 0.25) < 0.025);
  }
  SUBCASE("10^5 draws: mean near 0, variance near 2/fan_in") {
    Rng rng(2);
    const Tensor t = kaiming_init(rng, 18, {100000});
    double mean = 0, sq = 0;
    for (float v : t.data()) mean += v;
    mean /= t.size();
    for (float v : t.data()) sq += (v - mean) * (v - mean);
    const double var = sq / (t.size() - 1);
    const double expected = 2.0 / 18.0;
    // Standard error of the mean is sqrt(var/n) ~ 1e-3; of the variance ~ var*sqrt(2/n).
    CHECK(std::abs(mean) < 5 * std::sqrt(expected / t.size()));
    CHECK(std::abs(var - expected) < 5 * expected * std::sqrt(2.0 / t.size()));
  }
  SUBCASE("same seed, same tensor") {
    Rng a(5), b(5);
    CHECK(kaiming_init(a, 9, {4, 3, 3}) == kaiming_init(b, 9, {4, 3, 3}));
  }
  SUBCASE("fan_in 0 is rejected") {
    Rng rng(0);
    CHECK_THROWS_AS(kaiming_init(rng, 0, {3}), std::invalid_argument);
  }
}

TEST_CASE("conv2d examples") {
  SUBCASE("1x1 identity weight reproduces the input") {
    Rng rng(3);
    const Tensor x = random_tensor(rng, {2, 4, 5, 5});
    Tensor w({4, 4, 1, 1});
    for (std::size_t c = 0; c < 4; ++c) w.at(c, c, 0, 0) = 1.0f;
    CHECK(conv2d(x, w, 1, 0) == x);
  }
  SUBCASE("all-ones 3x3 on all-ones 3x3 with pad 1: centre 9, corners 4") {
    const Tensor x({1, 1, 3, 3}, 1.0f);
    const Tensor w({1, 1, 3, 3}, 1.0f);
    const Tensor y = conv2d(x, w, 1, 1);
    CHECK(y.at(0, 0, 1, 1) == 9.0f);
    CHECK(y.at(0, 0, 0, 0) == 4.0f);
    CHECK(y.at(0, 0, 0, 2) == 4.0f);
    CHECK(y.at(0, 0, 2, 0) == 4.0f);
    CHECK(y.at(0, 0, 2, 2) == 4.0f);
    CHECK(y.at(0, 0, 0, 1) == 6.0f);
  }
  SUBCASE("output shape arithmetic") {
    const Tensor y = conv2d(Tensor({2, 4, 8, 8}), Tensor({16, 4, 3, 3}), 1, 1);
    CHECK(y.shape() == Shape{2, 16, 8, 8});
    CHECK(conv2d(Tensor({1, 2, 9, 9}), Tensor({3, 2, 3, 3}), 2, 1).shape() == Shape{1, 3, 5, 5});
  }
  SUBCASE("channel mismatch is rejected") {
    CHECK_THROWS_AS(conv2d(Tensor({1, 3, 4, 4}), Tensor({2, 4, 3, 3}), 1, 1), std::invalid_argument);
    CHECK_THROWS_AS(conv2d(Tensor({1, 3, 4}), Tensor({2, 3, 3, 3}), 1, 1), std::invalid_argument);
  }
}

TEST_CASE("conv2d matches the naive six-loop reference") {
  Rng rng(11);
  struct Case {
    Shape in;
    std::size_t out_c, k;
    int stride, pad;
  };
  const Case cases[] = {{{2, 8, 16, 16}, 8, 3, 1, 1}, {{2, 8, 16, 16}, 5, 1, 1, 0}, {{1, 3, 7, 9}, 4, 3, 2, 1},
                        {{2, 2, 5, 5}, 3, 3, 1, 0}, {{1, 1, 2, 2}, 1, 3, 1, 1}};
  for (const auto& c : cases) {
    for (double density : {1.0, 0.1, 0.0}) {
      Tensor x = random_tensor(rng, c.in);
      // Sparse binary maps take the scatter path.
      if (density < 1.0)
        for (float& v : x.data()) v = rng.bernoulli(density) ? 1.0f : 0.0f;
      const Tensor w = random_tensor(rng, {c.out_c, c.in[1], c.k, c.k});
      const Tensor fast = conv2d(x, w, c.stride, c.pad);
      const Tensor slow = oracle::naive_conv2d(x, w, c.stride, c.pad);
      REQUIRE(fast.shape() == slow.shape());
      double worst = 0;
      for (std::size_t i = 0; i < fast.size(); ++i) {
        const double denom = std::max(1.0, std::abs(static_cast<double>(slow[i])));
        worst = std::max(worst, std::abs(fast[i] - slow[i]) / denom);
      }
      CHECK(worst <= 1e-5);
    }
  }
}

TEST_CASE("pool2d") {
  SUBCASE("max pool keeps binary maps binary") {
    Rng rng(4);
    Tensor x({2, 3, 6, 6});
    for (float& v : x.data()) v = rng.bernoulli(0.3) ? 1.0f : 0.0f;
    for (const Tensor& y : {pool2d(x, PoolKind::Max, 3, 1, 1), pool2d(x, PoolKind::Max, 2, 2, 0)})
      for (float v : y.data()) CHECK((v == 0.0f || v == 1.0f));
  }
  SUBCASE("avg pool 3x3 pad 1 on a constant: interior v, corner 4v/9, edge 6v/9") {
    const float v = 0.75f;
    const Tensor y = pool2d(Tensor({1, 1, 5, 5}, v), PoolKind::Avg, 3, 1, 1);
    CHECK(y.at(0, 0, 2, 2) == doctest::Approx(v));
    CHECK(y.at(0, 0, 0, 0) == doctest::Approx(4 * v / 9));
    CHECK(y.at(0, 0, 4, 4) == doctest::Approx(4 * v / 9));
    CHECK(y.at(0, 0, 0, 2) == doctest::Approx(6 * v / 9));
  }
  SUBCASE("max pool ignores padding for negative inputs") {
    const Tensor y = pool2d(Tensor({1, 1, 3, 3}, -2.0f), PoolKind::Max, 3, 1, 1);
    CHECK(y.at(0, 0, 0, 0) == -2.0f);
  }
  SUBCASE("2x2 stride 2 halves spatial dims") {
    CHECK(pool2d(Tensor({2, 4, 8, 6}), PoolKind::Max, 2, 2, 0).shape() == Shape{2, 4, 4, 3});
  }
  SUBCASE("invalid geometry is rejected") {
    CHECK_THROWS_AS(pool2d(Tensor({1, 1, 4, 4}), PoolKind::Max, 0, 1, 0), std::invalid_argument);
    CHECK_THROWS_AS(pool2d(Tensor({1, 1, 4, 4}), PoolKind::Max, 3, 0, 1), std::invalid_argument);
    CHECK_THROWS_AS(pool2d(Tensor({1, 1, 4, 4}), PoolKind::Avg, 3, 1, 2), std::invalid_argument);
    CHECK_THROWS_AS(pool2d(Tensor({1, 1, 2, 2}), PoolKind::Avg, 5, 1, 0), std::invalid_argument);
  }
}

TEST_CASE("normalize_per_channel") {
  SUBCASE("constant channel maps to zeros") {
    const Tensor y = normalize_per_channel(Tensor({3, 2, 4, 4}, 5.0f));
    for (float v : y.data()) CHECK(v == 0.0f);
  }
  SUBCASE("random input: per-channel mean 0 and std 1") {
    Rng rng(8);
    Tensor x = random_tensor(rng, {4, 3, 6, 6});
    for (float& v : x.data()) v = v * 3.0f + 2.0f;
    const Tensor y = normalize_per_channel(x);
    const std::size_t inner = 36;
    for (std::size_t c = 0; c < 3; ++c) {
      double sum = 0, sq = 0;
      for (std::size_t n = 0; n < 4; ++n)
        for (std::size_t i = 0; i < inner; ++i) sum += y[(n * 3 + c) * inner + i];
      const double mean = sum / (4 * inner);
      for (std::size_t n = 0; n < 4; ++n)
        for (std::size_t i = 0; i < inner; ++i) sq += std::pow(y[(n * 3 + c) * inner + i] - mean, 2);
      CHECK(std::abs(mean) < 1e-5);
      CHECK(std::abs(std::sqrt(sq / (4 * inner)) - 1.0) < 1e-3);
    }
  }
  SUBCASE("idempotent within 1e-4") {
    Rng rng(9);
    const Tensor once = normalize_per_channel(random_tensor(rng, {3, 4, 5, 5}));
    const Tensor twice = normalize_per_channel(once);
    for (std::size_t i = 0; i < once.size(); ++i) CHECK(std::abs(once[i] - twice[i]) < 1e-4);
  }
}

TEST_CASE("linear and global average pool") {
  Tensor x({1, 2, 2, 2}, 0.0f);
  for (std::size_t i = 0; i < 4; ++i) x[i] = static_cast<float>(i);  // channel 0: 0..3, channel 1: 0
  const Tensor g = global_avg_pool(x);
  CHECK(g.shape() == Shape{1, 2});
  CHECK(g[0] == 1.5f);
  CHECK(g[1] == 0.0f);
  const Tensor w({3, 2}, std::vector<float>{1, 0, 0, 1, 2, 2});
  const Tensor y = linear(g, w);
  CHECK(y.shape() == Shape{1, 3});
  CHECK(y[0] == 1.5f);
  CHECK(y[1] == 0.0f);
  CHECK(y[2] == 3.0f);
}

TEST_CASE("non-finite values are an error state") {
  Tensor x({1, 1, 2, 2}, 1.0f);
  x[0] = std::numeric_limits<float>::infinity();
  CHECK_THROWS_AS(conv2d(x, Tensor({1, 1, 1, 1}, 1.0f), 1, 0), NumericError);
  CHECK_THROWS_AS(require_finite(x, "test"), NumericError);
}

TEST_CASE("tensor construction checks shapes") {
  CHECK_THROWS_AS(Tensor({2, 2}, std::vector<float>(3)), std::invalid_argument);
  CHECK_THROWS_AS(Tensor(Shape{2, 0}), std::invalid_argument);
  CHECK_THROWS_AS(Tensor(Shape{}), std::invalid_argument);
}

TEST_CASE("timestep_slice picks one frame per sample") {
  Tensor ev({2, 3, 1, 1, 2});
  for (std::size_t i = 0; i < ev.size(); ++i) ev[i] = static_cast<float>(i);
  const Tensor f = timestep_slice(ev, 1);
  CHECK(f.shape() == Shape{2, 1, 1, 2});
  CHECK(f.values() == std::vector<float>{2, 3, 8, 9});
  CHECK_THROWS_AS(timestep_slice(ev, 3), std::invalid_argument);
}

TEST_CASE("LSNT layout is bit-exact") {
  const Tensor t({2}, std::vector<float>{1.0f, -2.5f});
  std::ostringstream os;
  write_lsnt(os, t);
  const std::string bytes = os.str();
  const std::string expected = std::string("LSNT") + std::string("\x01\x00\x00\x00", 4) +
                               std::string("\x02\x00\x00\x00", 4) + std::string("\x00\x00\x80\x3f", 4) +
                               std::string("\x00\x00\x20\xc0", 4);
  CHECK(bytes == expected);
}

TEST_CASE("LSNT round-trips and rejects malformed input") {
  Rng rng(12);
  const Tensor t = random_tensor(rng, {2, 3, 4, 5});
  std::ostringstream os;
  write_lsnt(os, t);
  std::istringstream is(os.str());
  const Tensor back = read_lsnt(is);
  CHECK(back == t);
  std::ostringstream again;
  write_lsnt(again, back);
  CHECK(again.str() == os.str());

  std::istringstream bad_magic("LSNX\x01\x00\x00\x00");
  CHECK_THROWS_AS(read_lsnt(bad_magic), DataFormatError);
  std::istringstream truncated(os.str().substr(0, os.str().size() - 1));
  CHECK_THROWS_AS(read_lsnt(truncated), DataFormatError);
  std::istringstream trailing(os.str() + "x");
  CHECK_THROWS_AS(read_lsnt(trailing), DataFormatError);
}
