#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <utility>

#include "sgda/mcsa.hpp"
#include "sgda/signal.hpp"

namespace sgda {

// Synthetic single-channel current signal: supply tone, odd harmonics,
// Gaussian noise, and optional fault tones placed at the MCSA frequencies.
struct SynthConfig {
    MotorParams params;
    HarmonicOrders orders;
    double duration_s = 1.0;
    double base_amplitude = 1.0;
    std::map<int, double> harmonic_amplitudes = {{3, 0.05}, {5, 0.02}};  // odd order -> amplitude
    double noise_std = 0.01;
    std::optional<std::pair<FaultType, double>> fault;  // (type, fault_amplitude)
    std::uint64_t seed = 0;

    void validate() const;
};

RawSignal generate(const SynthConfig& cfg);

}  // namespace sgda
