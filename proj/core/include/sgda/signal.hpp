#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace sgda {

// Multichannel current recording, channel-major: channels[j][n].
struct RawSignal {
    std::vector<std::vector<double>> channels;
    double sampling_rate_hz = 0.0;
    std::string source_id;

    std::size_t channel_count() const { return channels.size(); }
    std::size_t length() const { return channels.empty() ? 0 : channels[0].size(); }
};

struct SegmentConfig {
    std::size_t segment_len_samples = 0;  // L
    std::size_t step_samples = 0;         // delta, 1 <= delta <= L
};

struct Segment {
    std::vector<std::vector<double>> channels;  // [channel][0..L-1]
    std::size_t index = 0;
    std::string parent;
    double sampling_rate_hz = 0.0;
};

enum class SpectrumStage { Magnitude, Decibel, Normalized, Augmented };

enum class NormalizationMode { PerSegmentChannel, GlobalPerChannel };

// One segment's one-sided spectrum as it moves through the dB and
// normalization stages. freq_hz[k] = k * fs / L for k = 0..floor(L/2).
struct Spectrum {
    std::vector<std::vector<double>> bins;  // [channel][bin]
    std::vector<double> freq_hz;
    SpectrumStage stage = SpectrumStage::Magnitude;
    std::vector<std::uint8_t> degenerate_channel;  // set by normalize when max == min
    bool out_of_range = false;  // set when context-reuse normalization leaves [0,1]

    std::size_t channel_count() const { return bins.size(); }
    std::size_t bin_count() const { return freq_hz.size(); }
};

// Extrema captured during normalization; required to normalize future
// spectra consistently under GlobalPerChannel.
struct NormalizationContext {
    NormalizationMode mode = NormalizationMode::PerSegmentChannel;
    std::vector<double> min_db;  // per channel, GlobalPerChannel only
    std::vector<double> max_db;
};

struct NormalizeResult {
    std::vector<Spectrum> spectra;
    NormalizationContext context;
};

constexpr double kDefaultDbEpsilon = 1e-12;

// CSV: one row per sample, one column per channel, optional header row.
RawSignal load_signal_csv(const std::string& path, double sampling_rate_hz);
void save_signal_csv(const RawSignal& signal, const std::string& path);

std::vector<Segment> segment(const RawSignal& signal, const SegmentConfig& cfg);

Spectrum fft_magnitude(const Segment& seg);

Spectrum db_scale(const Spectrum& spec, double epsilon = kDefaultDbEpsilon);

NormalizeResult normalize(const std::vector<Spectrum>& specs, NormalizationMode mode);

// Normalize one spectrum against previously captured global extrema.
// Bins may leave [0,1] when the incoming spectrum exceeds the training
// extrema; that is reported via Spectrum::out_of_range, not clamped.
Spectrum normalize_with_context(const Spectrum& spec, const NormalizationContext& ctx);

// Split a multichannel spectrum into single-channel spectra (augmentation
// and classification treat channels independently).
std::vector<Spectrum> split_channels(const Spectrum& spec);

void save_spectrum_csv(const Spectrum& spec, const std::string& path);

}  // namespace sgda
