#include "diffuseslide/noise.hpp"

#include <random>

namespace dslide {
namespace {

std::mt19937_64 make_engine(const NoiseSeed& s) {
    const auto lo = [](std::uint64_t v) { return static_cast<std::uint32_t>(v & 0xffffffffu); };
    const auto hi = [](std::uint64_t v) { return static_cast<std::uint32_t>(v >> 32); };
    std::seed_seq seq{lo(s.seed), hi(s.seed), lo(s.step), hi(s.step), lo(s.iteration), hi(s.iteration),
                      static_cast<std::uint32_t>(s.purpose)};
    return std::mt19937_64(seq);
}

}  // namespace

void fill_standard_normal(const NoiseSeed& seed, std::span<double> out) {
    auto engine = make_engine(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (double& v : out) v = normal(engine);
}

void fill_uniform(const NoiseSeed& seed, double lo, double hi, std::span<double> out) {
    auto engine = make_engine(seed);
    std::uniform_real_distribution<double> uniform(lo, hi);
    for (double& v : out) v = uniform(engine);
}

}  // namespace dslide
