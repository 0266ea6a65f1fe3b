#include "sgda/signal.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "sgda/errors.hpp"
#include "sgda/fft.hpp"

namespace sgda {

namespace {

bool parse_double(std::string_view token, double& out) {
    // trim spaces and a possible trailing '\r'
    while (!token.empty() && (token.front() == ' ' || token.front() == '\t')) token.remove_prefix(1);
    while (!token.empty() &&
           (token.back() == ' ' || token.back() == '\t' || token.back() == '\r'))
        token.remove_suffix(1);
    if (token.empty()) return false;
    const char* begin = token.data();
    const char* end = begin + token.size();
    auto [ptr, ec] = std::from_chars(begin, end, out);
    return ec == std::errc{} && ptr == end;
}

std::vector<std::string_view> split_row(std::string_view line) {
    std::vector<std::string_view> cells;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            cells.push_back(line.substr(start));
            break;
        }
        cells.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
    return cells;
}

}  // namespace

RawSignal load_signal_csv(const std::string& path, double sampling_rate_hz) {
    if (!(sampling_rate_hz > 0.0)) throw ConfigError("sampling_rate_hz: must be > 0");
    std::ifstream in(path);
    if (!in) throw DataError(path + ": cannot open file");

    RawSignal signal;
    signal.sampling_rate_hz = sampling_rate_hz;
    signal.source_id = path;

    std::string line;
    std::size_t row = 0;
    std::size_t data_rows = 0;
    std::size_t columns = 0;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty() || line == "\r") continue;
        const auto cells = split_row(line);

        std::vector<double> values(cells.size());
        bool numeric = true;
        for (std::size_t j = 0; j < cells.size(); ++j) {
            if (!parse_double(cells[j], values[j])) {
                numeric = false;
                break;
            }
        }
        if (!numeric) {
            if (data_rows == 0 && row == 1) continue;  // header row
            throw DataError(path + ": row " + std::to_string(row) + ": unparseable value");
        }
        if (data_rows == 0) {
            columns = cells.size();
            signal.channels.assign(columns, {});
        } else if (cells.size() != columns) {
            throw DataError(path + ": row " + std::to_string(row) + ": expected " +
                            std::to_string(columns) + " columns, got " +
                            std::to_string(cells.size()));
        }
        for (std::size_t j = 0; j < columns; ++j) {
            if (!std::isfinite(values[j]))
                throw DataError(path + ": row " + std::to_string(row) + ": non-finite value");
            signal.channels[j].push_back(values[j]);
        }
        ++data_rows;
    }
    if (data_rows == 0) throw DataError(path + ": no data rows");
    return signal;
}

void save_signal_csv(const RawSignal& signal, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DataError(path + ": cannot open file for writing");
    out.precision(17);
    const std::size_t n = signal.length();
    const std::size_t d = signal.channel_count();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < d; ++j) {
            if (j) out << ',';
            out << signal.channels[j][i];
        }
        out << '\n';
    }
    if (!out) throw DataError(path + ": write failed");
}

std::vector<Segment> segment(const RawSignal& signal, const SegmentConfig& cfg) {
    const std::size_t n = signal.length();
    const std::size_t l = cfg.segment_len_samples;
    const std::size_t step = cfg.step_samples;
    if (l == 0) throw ConfigError("segment.segment_len_samples: must be > 0");
    if (step == 0 || step > l)
        throw ConfigError("segment.step_samples: must satisfy 1 <= step <= segment_len");
    if (n < l)
        throw DataError(signal.source_id + ": signal length " + std::to_string(n) +
                        " shorter than segment length " + std::to_string(l));

    const std::size_t count = (n - l) / step + 1;
    std::vector<Segment> segments;
    segments.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        Segment seg;
        seg.index = i;
        seg.parent = signal.source_id;
        seg.sampling_rate_hz = signal.sampling_rate_hz;
        seg.channels.reserve(signal.channel_count());
        const std::size_t start = i * step;
        for (const auto& ch : signal.channels)
            seg.channels.emplace_back(ch.begin() + static_cast<std::ptrdiff_t>(start),
                                      ch.begin() + static_cast<std::ptrdiff_t>(start + l));
        segments.push_back(std::move(seg));
    }
    return segments;
}

Spectrum fft_magnitude(const Segment& seg) {
    if (seg.channels.empty() || seg.channels[0].empty())
        throw DataError("fft_magnitude: empty segment");
    const std::size_t l = seg.channels[0].size();

    Spectrum spec;
    spec.stage = SpectrumStage::Magnitude;
    spec.freq_hz.resize(l / 2 + 1);
    for (std::size_t k = 0; k < spec.freq_hz.size(); ++k)
        spec.freq_hz[k] =
            static_cast<double>(k) * seg.sampling_rate_hz / static_cast<double>(l);
    spec.bins.reserve(seg.channels.size());
    for (const auto& ch : seg.channels) spec.bins.push_back(fft_magnitude_onesided(ch));
    return spec;
}

Spectrum db_scale(const Spectrum& spec, double epsilon) {
    if (spec.stage != SpectrumStage::Magnitude)
        throw DataError("db_scale: expected a Magnitude-stage spectrum");
    if (!(epsilon > 0.0)) throw ConfigError("db epsilon: must be > 0");

    Spectrum out = spec;
    out.stage = SpectrumStage::Decibel;
    for (auto& ch : out.bins)
        for (double& v : ch) v = 20.0 * std::log10(v + epsilon);
    return out;
}

NormalizeResult normalize(const std::vector<Spectrum>& specs, NormalizationMode mode) {
    if (specs.empty()) throw DataError("normalize: empty spectrum list");
    const std::size_t d = specs[0].channel_count();
    for (const auto& s : specs) {
        if (s.stage != SpectrumStage::Decibel)
            throw DataError("normalize: expected Decibel-stage spectra");
        if (s.channel_count() != d)
            throw DataError("normalize: inconsistent channel counts");
    }

    NormalizeResult result;
    result.context.mode = mode;

    if (mode == NormalizationMode::GlobalPerChannel) {
        result.context.min_db.assign(d, std::numeric_limits<double>::infinity());
        result.context.max_db.assign(d, -std::numeric_limits<double>::infinity());
        for (const auto& s : specs) {
            for (std::size_t j = 0; j < d; ++j) {
                const auto [lo, hi] = std::minmax_element(s.bins[j].begin(), s.bins[j].end());
                result.context.min_db[j] = std::min(result.context.min_db[j], *lo);
                result.context.max_db[j] = std::max(result.context.max_db[j], *hi);
            }
        }
    }

    result.spectra.reserve(specs.size());
    for (const auto& s : specs) {
        Spectrum out = s;
        out.stage = SpectrumStage::Normalized;
        out.degenerate_channel.assign(d, 0);
        for (std::size_t j = 0; j < d; ++j) {
            double lo, hi;
            if (mode == NormalizationMode::GlobalPerChannel) {
                lo = result.context.min_db[j];
                hi = result.context.max_db[j];
            } else {
                const auto [plo, phi] = std::minmax_element(s.bins[j].begin(), s.bins[j].end());
                lo = *plo;
                hi = *phi;
            }
            if (hi == lo) {
                // constant channel: pin to mid-range instead of dividing by zero
                out.degenerate_channel[j] = 1;
                std::fill(out.bins[j].begin(), out.bins[j].end(), 0.5);
                continue;
            }
            const double scale = 1.0 / (hi - lo);
            for (double& v : out.bins[j]) v = (v - lo) * scale;
        }
        result.spectra.push_back(std::move(out));
    }
    return result;
}

Spectrum normalize_with_context(const Spectrum& spec, const NormalizationContext& ctx) {
    if (ctx.mode == NormalizationMode::PerSegmentChannel)
        return normalize({spec}, NormalizationMode::PerSegmentChannel).spectra[0];

    if (spec.stage != SpectrumStage::Decibel)
        throw DataError("normalize_with_context: expected a Decibel-stage spectrum");
    if (ctx.min_db.size() != spec.channel_count())
        throw DataError("normalize_with_context: context channel count mismatch");

    Spectrum out = spec;
    out.stage = SpectrumStage::Normalized;
    out.degenerate_channel.assign(spec.channel_count(), 0);
    for (std::size_t j = 0; j < spec.channel_count(); ++j) {
        const double lo = ctx.min_db[j];
        const double hi = ctx.max_db[j];
        if (hi == lo) {
            out.degenerate_channel[j] = 1;
            std::fill(out.bins[j].begin(), out.bins[j].end(), 0.5);
            continue;
        }
        const double scale = 1.0 / (hi - lo);
        for (double& v : out.bins[j]) {
            v = (v - lo) * scale;
            if (v < 0.0 || v > 1.0) out.out_of_range = true;
        }
    }
    return out;
}

std::vector<Spectrum> split_channels(const Spectrum& spec) {
    std::vector<Spectrum> out;
    out.reserve(spec.channel_count());
    for (std::size_t j = 0; j < spec.channel_count(); ++j) {
        Spectrum s;
        s.bins = {spec.bins[j]};
        s.freq_hz = spec.freq_hz;
        s.stage = spec.stage;
        if (!spec.degenerate_channel.empty()) s.degenerate_channel = {spec.degenerate_channel[j]};
        s.out_of_range = spec.out_of_range;
        out.push_back(std::move(s));
    }
    return out;
}

void save_spectrum_csv(const Spectrum& spec, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DataError(path + ": cannot open file for writing");
    out.precision(17);
    out << "freq_hz";
    for (std::size_t j = 0; j < spec.channel_count(); ++j) out << ",channel_" << j;
    out << '\n';
    for (std::size_t k = 0; k < spec.bin_count(); ++k) {
        out << spec.freq_hz[k];
        for (std::size_t j = 0; j < spec.channel_count(); ++j) out << ',' << spec.bins[j][k];
        out << '\n';
    }
    if (!out) throw DataError(path + ": write failed");
}

}  // namespace sgda
