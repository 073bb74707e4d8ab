#pragma once

#include <cstdint>
#include <span>

namespace dslide {

enum class NoisePurpose : std::uint32_t {
    Injection = 1,
    Reinjection = 2,
    Sampling = 3,
    CorpusCoefficients = 4,
    BasisParameters = 5,
    Auxiliary = 15,
};

/// Seed plus the labels identifying one independent noise substream.
///
/// Every random tensor in a run is drawn from its own substream keyed by
/// (seed, step, iteration, purpose), so the draw never depends on how many
/// other tensors were generated before it or on which thread asked.
struct NoiseSeed {
    std::uint64_t seed = 0;
    std::uint64_t step = 0;
    std::uint64_t iteration = 0;
    NoisePurpose purpose = NoisePurpose::Injection;

    NoiseSeed with(std::uint64_t step_label, std::uint64_t iteration_label, NoisePurpose p) const {
        return NoiseSeed{seed, step_label, iteration_label, p};
    }

    friend bool operator==(const NoiseSeed&, const NoiseSeed&) = default;
};

void fill_standard_normal(const NoiseSeed& seed, std::span<double> out);
void fill_uniform(const NoiseSeed& seed, double lo, double hi, std::span<double> out);

}  // namespace dslide
