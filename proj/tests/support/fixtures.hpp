// Small workloads shared by the unit and acceptance suites.
#pragma once

#include "lightsnn/dataset.hpp"
#include "lightsnn/network.hpp"
#include "lightsnn/search.hpp"

namespace fixture {

// 8 channels, 8x8 frames: the desk-scale geometry used across the tests.
inline lightsnn::MacroConfig toy_macro(std::size_t in_channels = 2) {
  lightsnn::MacroConfig m;
  m.in_channels = in_channels;
  m.height = 8;
  m.width = 8;
  m.stem_channels = 8;
  m.num_classes = 4;
  return m;
}

inline lightsnn::Tensor toy_events(std::uint64_t seed, std::size_t batch = 8, std::size_t steps = 2,
                                   std::size_t channels = 2) {
  lightsnn::Rng rng(lightsnn::Rng::derive(seed, lightsnn::SeedPurpose::Data));
  return lightsnn::gen_synthetic_events(rng, batch, steps, 4, channels, 8, 8).images;
}

inline lightsnn::Tensor toy_images(std::uint64_t seed, std::size_t batch = 8, std::size_t channels = 3) {
  lightsnn::Rng rng(seed);
  lightsnn::Tensor t({batch, channels, 8, 8});
  for (float& v : t.data()) v = static_cast<float>(rng.uniform());
  return t;
}

inline lightsnn::SearchProblem toy_problem(std::uint64_t seed, const lightsnn::OpSetProfile& profile,
                                           std::size_t nodes = 4, std::size_t timesteps = 2) {
  lightsnn::SearchProblem p;
  p.profile = profile;
  p.topology = lightsnn::CellTopology(nodes);
  p.batch = toy_events(seed, 8, timesteps);
  p.timesteps = timesteps;
  p.weight_seed = lightsnn::Rng::derive(seed, lightsnn::SeedPurpose::Weights);
  p.macro = toy_macro();
  p.threads = 1;
  return p;
}

}  // namespace fixture
