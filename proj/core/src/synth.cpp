#include "sgda/synth.hpp"

#include <cmath>

#include "sgda/errors.hpp"
#include "sgda/rng.hpp"

namespace sgda {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;
}

void SynthConfig::validate() const {
    params.validate();
    orders.validate();
    if (!(duration_s > 0.0)) throw ConfigError("synth.duration_s: must be > 0");
    if (std::llround(duration_s * params.sampling_rate_hz) < 1)
        throw ConfigError("synth.duration_s: duration * sampling_rate must be >= 1 sample");
    if (!(base_amplitude > 0.0)) throw ConfigError("synth.base_amplitude: must be > 0");
    for (const auto& [order, amp] : harmonic_amplitudes) {
        if (order < 3 || order % 2 == 0)
            throw ConfigError("synth.harmonics: orders must be odd integers >= 3");
        if (amp < 0.0) throw ConfigError("synth.harmonics: amplitudes must be >= 0");
    }
    if (noise_std < 0.0) throw ConfigError("synth.noise_std: must be >= 0");
    if (fault) {
        if (!(fault->second > 0.0)) throw ConfigError("synth.fault_amplitude: must be > 0");
        if (!(fault->second < base_amplitude))
            throw ConfigError("synth.fault_amplitude: must be smaller than base_amplitude");
    }
}

RawSignal generate(const SynthConfig& cfg) {
    cfg.validate();

    const double fs = cfg.params.sampling_rate_hz;
    const double f1 = cfg.params.supply_frequency_hz;
    const std::size_t n = static_cast<std::size_t>(std::llround(cfg.duration_s * fs));

    std::vector<double> fault_freqs;
    double fault_amp = 0.0;
    if (cfg.fault) {
        const auto map = fault_frequency_map(cfg.params, {cfg.fault->first}, cfg.orders);
        const auto it = map.sets.find(cfg.fault->first);
        if (it == map.sets.end())
            throw DataError(std::string("synth: no in-band frequencies for fault ") +
                            to_string(cfg.fault->first));
        fault_freqs = it->second.frequencies_hz;
        fault_amp = cfg.fault->second;
    }

    Philox noise(derive_seed(cfg.seed, "synth-noise"));

    RawSignal signal;
    signal.sampling_rate_hz = fs;
    signal.source_id = cfg.params.name.empty() ? "synthetic" : cfg.params.name;
    signal.channels.assign(1, std::vector<double>(n));
    auto& ch = signal.channels[0];

    for (std::size_t i = 0; i < n; ++i) {
        const double t = static_cast<double>(i) / fs;
        double v = cfg.base_amplitude * std::sin(kTwoPi * f1 * t);
        for (const auto& [order, amp] : cfg.harmonic_amplitudes)
            v += amp * std::sin(kTwoPi * static_cast<double>(order) * f1 * t);
        for (double f : fault_freqs) v += fault_amp * std::sin(kTwoPi * f * t);
        if (cfg.noise_std > 0.0) v += cfg.noise_std * noise.normal();
        ch[i] = v;
    }
    return signal;
}

}  // namespace sgda
