#include <doctest.h>

#include "lightsnn/lif.hpp"

using namespace lightsnn;

TEST_CASE("config validation") {
  CHECK_NOTHROW(LIFConfig{}.validate());
  CHECK_THROWS_AS((LIFConfig{0.0f, 0.0f, 0.5f}.validate()), std::invalid_argument);
  CHECK_THROWS_AS((LIFConfig{1.0f, 0.0f, 0.0f}.validate()), std::invalid_argument);
  CHECK_THROWS_AS((LIFConfig{1.0f, 0.0f, 1.5f}.validate()), std::invalid_argument);
  CHECK_NOTHROW((LIFConfig{1.0f, 0.0f, 1.0f}.validate()));
}

TEST_CASE("supra-threshold input fires immediately and hard-resets") {
  const LIFConfig cfg{1.0f, 0.0f, 0.5f};
  LIFState st({1, 1}, cfg);
  const Tensor s = lif_step(st, Tensor({1, 1}, 2.0f), cfg);
  CHECK(s[0] == 1.0f);
  CHECK(st.membrane()[0] == 0.0f);
  CHECK(st.spike_count() == 1);
}

TEST_CASE("fires exactly at threshold") {
  const LIFConfig cfg{1.0f, 0.0f, 0.5f};
  LIFState st({1, 1}, cfg);
  CHECK(lif_step(st, Tensor({1, 1}, 1.0f), cfg)[0] == 1.0f);
}

TEST_CASE("constant 0.4 with decay 0.5 converges to 0.8 without firing") {
  const LIFConfig cfg{1.0f, 0.0f, 0.5f};
  LIFState st({1, 1}, cfg);
  for (int t = 0; t < 100; ++t) CHECK(lif_step(st, Tensor({1, 1}, 0.4f), cfg)[0] == 0.0f);
  CHECK(st.membrane()[0] == doctest::Approx(0.8f).epsilon(1e-5));
  CHECK(st.spike_count() == 0);
}

TEST_CASE("silence produces no spikes") {
  const LIFConfig cfg{};
  LIFState st({3, 4}, cfg);
  for (int t = 0; t < 20; ++t) lif_step(st, Tensor({3, 4}), cfg);
  CHECK(st.spike_count() == 0);
  CHECK(st.steps() == 20);
}

TEST_CASE("periodic firing under a supra-threshold drift") {
  // decay 1, input 0.3: v = 0.3, 0.6, 0.9, 1.2 -> spike every 4th step.
  const LIFConfig cfg{1.0f, 0.0f, 1.0f};
  LIFState st({1, 1}, cfg);
  std::vector<float> train;
  for (int t = 0; t < 8; ++t) train.push_back(lif_step(st, Tensor({1, 1}, 0.3f), cfg)[0]);
  CHECK(train == std::vector<float>{0, 0, 0, 1, 0, 0, 0, 1});
}

TEST_CASE("reset restores a fresh state") {
  const LIFConfig cfg{};
  Rng rng(3);
  std::vector<Tensor> inputs;
  for (int t = 0; t < 10; ++t) {
    Tensor x({2, 8});
    for (float& v : x.data()) v = static_cast<float>(rng.uniform() * 1.5);
    inputs.push_back(x);
  }
  LIFState st({2, 8}, cfg);
  std::vector<Tensor> first, second;
  for (const auto& x : inputs) first.push_back(lif_step(st, x, cfg));
  CHECK(st.spike_count() > 0);
  lif_reset(st, cfg);
  CHECK(st.spike_count() == 0);
  CHECK(st.steps() == 0);
  for (const auto& x : inputs) second.push_back(lif_step(st, x, cfg));
  CHECK(first == second);

  LIFState fresh({2, 8}, cfg);
  const Tensor before = fresh.membrane();
  lif_reset(fresh, cfg);
  CHECK(fresh.membrane() == before);
}

TEST_CASE("random steps keep spikes binary, membranes sub-threshold and counts bounded") {
  const LIFConfig cfg{0.7f, -0.2f, 0.8f};
  LIFState st({4, 16}, cfg);
  Rng rng(17);
  for (int t = 0; t < 200; ++t) {
    Tensor x({4, 16});
    for (float& v : x.data()) v = static_cast<float>(rng.normal());
    const Tensor s = lif_step(st, x, cfg);
    for (float v : s.data()) CHECK((v == 0.0f || v == 1.0f));
    for (float v : st.membrane().data()) CHECK(v < cfg.v_threshold);
  }
  CHECK(st.neuron_count() == 16);
  CHECK(st.spike_count() <= st.neuron_count() * st.steps() * st.batch_size());
}

TEST_CASE("shape mismatch is rejected") {
  const LIFConfig cfg{};
  LIFState st({1, 4}, cfg);
  CHECK_THROWS_AS(lif_step(st, Tensor({1, 5}), cfg), std::invalid_argument);
}
