#include "sgda/augment.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>

#include "json.hpp"
#include "sgda/errors.hpp"

namespace sgda {

namespace {

constexpr char kDatasetMagic[8] = {'S', 'G', 'D', 'A', 'D', 'S', '0', '1'};

// Mean absolute successive-bin difference of the parent channel; the
// config's operationalization of "average local spectral variability".
double local_variability(const std::vector<double>& bins) {
    if (bins.size() < 2) return 0.0;
    double acc = 0.0;
    for (std::size_t k = 1; k < bins.size(); ++k) acc += std::abs(bins[k] - bins[k - 1]);
    return acc / static_cast<double>(bins.size() - 1);
}

std::vector<double> merged_anchor_union(const std::map<FaultType, FrequencySet>& fault_map) {
    std::vector<double> all;
    for (const auto& [fault, set] : fault_map)
        all.insert(all.end(), set.frequencies_hz.begin(), set.frequencies_hz.end());
    std::sort(all.begin(), all.end());
    std::vector<double> out;
    for (double f : all)
        if (out.empty() || std::abs(f - out.back()) > 1e-9) out.push_back(f);
    return out;
}

}  // namespace

void AugmentConfig::validate() const {
    if (a_min && (*a_min < 0.0)) throw ConfigError("augment.a_min: must be >= 0");
    if (!(a_max > 0.0)) throw ConfigError("augment.a_max: must be > 0");
    if (a_min && *a_min > a_max) throw ConfigError("augment.a_min: must not exceed a_max");
    if (!(sigma_min_hz > 0.0)) throw ConfigError("augment.sigma_min_hz: must be > 0");
    if (!(sigma_max_hz >= sigma_min_hz))
        throw ConfigError("augment.sigma_max_hz: must be >= sigma_min_hz");
    if (!(epsilon_f_hz > 0.0)) throw ConfigError("augment.epsilon_f_hz: must be > 0");
}

void Task::validate() const {
    if (faults.empty()) throw ConfigError("task.faults: must be nonempty");
    for (std::size_t i = 0; i < faults.size(); ++i)
        for (std::size_t j = i + 1; j < faults.size(); ++j)
            if (faults[i] == faults[j]) throw ConfigError("task.faults: duplicate fault type");
}

std::vector<ClassLabel> Task::class_order() const {
    std::vector<ClassLabel> order{ClassLabel::Normal};
    if (kind == TaskKind::Binary) {
        order.push_back(ClassLabel::Anomalous);
    } else {
        for (FaultType t : faults) order.push_back(to_class_label(t));
    }
    return order;
}

std::size_t Task::variants_per_segment(unsigned replication_r) const {
    const std::size_t per_class = 1 + static_cast<std::size_t>(replication_r);
    return kind == TaskKind::Binary ? per_class : faults.size() * per_class;
}

std::vector<double> gaussian_peak_vector(const std::vector<double>& freq_axis,
                                         const PeakParams& peak, double epsilon_f_hz) {
    if (!(peak.sigma_hz > 0.0)) throw ConfigError("peak.sigma_hz: must be > 0");
    std::vector<double> out(freq_axis.size(), 0.0);
    const double inv_two_sigma_sq = 1.0 / (2.0 * peak.sigma_hz * peak.sigma_hz);
    for (std::size_t k = 0; k < freq_axis.size(); ++k) {
        const double x = freq_axis[k] - peak.anchor_hz;
        if (std::abs(x) > epsilon_f_hz) continue;
        const double d = x - peak.mu_hz;
        out[k] = peak.amplitude * std::exp(-d * d * inv_two_sigma_sq);
    }
    return out;
}

PeakParams sample_peak(double anchor_hz, const AugmentConfig& cfg, Philox& rng) {
    cfg.validate();
    PeakParams p;
    p.anchor_hz = anchor_hz;
    const double a = rng.uniform(cfg.a_min.value_or(0.0), cfg.a_max);
    const double sign = rng.uniform() < 0.5 ? -1.0 : 1.0;
    p.amplitude = sign * a;
    p.mu_hz = rng.uniform(-cfg.epsilon_f_hz, cfg.epsilon_f_hz);
    p.sigma_hz = rng.uniform(cfg.sigma_min_hz, cfg.sigma_max_hz);
    return p;
}

std::vector<double> anchors_for_label(const AugmentConfig& cfg, ClassLabel label) {
    if (label == ClassLabel::Normal) return {};
    if (label == ClassLabel::Anomalous) {
        if (cfg.fault_map.empty())
            throw ConfigError("augment.fault_map: empty; cannot build the anomalous union set");
        return merged_anchor_union(cfg.fault_map);
    }
    for (const auto& [fault, set] : cfg.fault_map)
        if (to_class_label(fault) == label) return set.frequencies_hz;
    throw DataError(std::string("fault label missing from fault_map: ") + to_string(label));
}

LabeledSpectrum augment_spectrum(const Spectrum& parent, ClassLabel label,
                                 const AugmentConfig& cfg, Philox& rng) {
    if (parent.stage != SpectrumStage::Normalized)
        throw DataError("augment_spectrum: expected a Normalized-stage parent");
    if (parent.channel_count() != 1)
        throw DataError("augment_spectrum: single-channel spectra only; split channels first");

    LabeledSpectrum out;
    out.label = label;
    out.spectrum = parent;
    if (label == ClassLabel::Normal) return out;

    const std::vector<double> anchors = anchors_for_label(cfg, label);

    AugmentConfig effective = cfg;
    if (!effective.a_min) effective.a_min = local_variability(parent.bins[0]);

    out.spectrum.stage = SpectrumStage::Augmented;
    auto& bins = out.spectrum.bins[0];
    for (double anchor : anchors) {
        const PeakParams peak = sample_peak(anchor, effective, rng);
        const auto delta = gaussian_peak_vector(parent.freq_hz, peak, effective.epsilon_f_hz);
        for (std::size_t k = 0; k < bins.size(); ++k) bins[k] += delta[k];
    }
    return out;
}

std::vector<LabeledSpectrum> build_epoch_dataset(const std::vector<Spectrum>& parents,
                                                 const AugmentConfig& cfg, const Task& task,
                                                 std::int64_t epoch) {
    cfg.validate();
    task.validate();
    if (parents.empty()) throw DataError("build_epoch_dataset: no parent spectra");
    for (const auto& p : parents)
        if (p.stage != SpectrumStage::Normalized)
            throw DataError("build_epoch_dataset: parents must be Normalized-stage");
    for (FaultType t : task.faults)
        if (!cfg.fault_map.count(t))
            throw DataError(std::string("fault label missing from fault_map: ") + to_string(t));

    const std::size_t replicas = 1 + cfg.replication_r;           // normal copies per parent
    const std::size_t k_variants = task.variants_per_segment(cfg.replication_r);
    const std::uint64_t epoch_key =
        derive_seed(cfg.seed, "augment-epoch", static_cast<std::uint64_t>(epoch));

    std::vector<LabeledSpectrum> dataset;
    dataset.reserve(parents.size() * (replicas + k_variants));

    for (std::size_t ip = 0; ip < parents.size(); ++ip) {
        for (std::size_t r = 0; r < replicas; ++r) {
            LabeledSpectrum normal;
            normal.spectrum = parents[ip];
            normal.label = ClassLabel::Normal;
            normal.provenance = {ip, epoch, r};
            dataset.push_back(std::move(normal));
        }
        for (std::size_t v = 0; v < k_variants; ++v) {
            const std::size_t variant_index = replicas + v;
            Philox rng(epoch_key,
                       (static_cast<std::uint64_t>(ip) << 32) | static_cast<std::uint64_t>(variant_index));

            ClassLabel label;
            if (task.kind == TaskKind::Binary) {
                label = ClassLabel::Anomalous;
            } else if (cfg.stratified) {
                label = to_class_label(task.faults[v % task.faults.size()]);
            } else {
                const auto pick = static_cast<std::size_t>(rng.uniform() *
                                                           static_cast<double>(task.faults.size()));
                label = to_class_label(task.faults[std::min(pick, task.faults.size() - 1)]);
            }

            LabeledSpectrum sample = augment_spectrum(parents[ip], label, cfg, rng);
            sample.provenance = {ip, epoch, variant_index};
            dataset.push_back(std::move(sample));
        }
    }
    return dataset;
}

FrozenDataset freeze(const std::vector<LabeledSpectrum>& data,
                     const std::vector<ClassLabel>& class_order, std::int64_t epoch,
                     const std::string& config_echo_json) {
    if (data.empty()) throw DataError("freeze: empty dataset");
    FrozenDataset ds;
    ds.epoch = epoch;
    ds.config_echo_json = config_echo_json;
    for (ClassLabel l : class_order) ds.class_order.push_back(to_string(l));
    ds.freq_hz = data[0].spectrum.freq_hz;
    ds.n_bins = data[0].spectrum.bin_count();

    ds.bins.reserve(data.size() * ds.n_bins);
    ds.labels.reserve(data.size());
    for (const auto& sample : data) {
        if (sample.spectrum.channel_count() != 1)
            throw DataError("freeze: single-channel spectra only");
        if (sample.spectrum.bin_count() != ds.n_bins)
            throw DataError("freeze: inconsistent bin counts");
        const auto it = std::find(class_order.begin(), class_order.end(), sample.label);
        if (it == class_order.end())
            throw DataError(std::string("freeze: label not in class order: ") +
                            to_string(sample.label));
        ds.labels.push_back(static_cast<std::int32_t>(it - class_order.begin()));
        ds.parent_index.push_back(static_cast<std::int32_t>(sample.provenance.parent_index));
        ds.variant_index.push_back(static_cast<std::int32_t>(sample.provenance.variant_index));
        for (double v : sample.spectrum.bins[0]) ds.bins.push_back(static_cast<float>(v));
    }
    return ds;
}

void save_dataset(const FrozenDataset& ds, const std::string& path) {
    nlohmann::json header;
    header["format"] = "sgda-dataset";
    header["version"] = 1;
    header["n_samples"] = ds.sample_count();
    header["n_bins"] = ds.n_bins;
    header["epoch"] = ds.epoch;
    header["class_order"] = ds.class_order;
    std::map<std::string, std::size_t> counts;
    for (const auto& name : ds.class_order) counts[name] = 0;
    for (std::int32_t l : ds.labels) counts[ds.class_order.at(static_cast<std::size_t>(l))]++;
    header["class_counts"] = counts;
    header["freq_hz"] = ds.freq_hz;
    header["parent_index"] = ds.parent_index;
    header["variant_index"] = ds.variant_index;
    header["bins_dtype"] = "float32le";
    header["labels_dtype"] = "int32le";
    header["config"] = nlohmann::json::parse(ds.config_echo_json);

    const std::string header_text = header.dump();
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError(path + ": cannot open file for writing");
    out.write(kDatasetMagic, sizeof(kDatasetMagic));
    const std::uint64_t header_len = header_text.size();
    out.write(reinterpret_cast<const char*>(&header_len), sizeof(header_len));
    out.write(header_text.data(), static_cast<std::streamsize>(header_text.size()));
    out.write(reinterpret_cast<const char*>(ds.bins.data()),
              static_cast<std::streamsize>(ds.bins.size() * sizeof(float)));
    out.write(reinterpret_cast<const char*>(ds.labels.data()),
              static_cast<std::streamsize>(ds.labels.size() * sizeof(std::int32_t)));
    if (!out) throw DataError(path + ": write failed");
}

FrozenDataset load_dataset(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError(path + ": cannot open file");

    char magic[8];
    in.read(magic, sizeof(magic));
    if (!in || std::memcmp(magic, kDatasetMagic, sizeof(magic)) != 0)
        throw DataError(path + ": not an sgda dataset file");

    std::uint64_t header_len = 0;
    in.read(reinterpret_cast<char*>(&header_len), sizeof(header_len));
    std::string header_text(header_len, '\0');
    in.read(header_text.data(), static_cast<std::streamsize>(header_len));
    if (!in) throw DataError(path + ": truncated header");

    nlohmann::json header;
    try {
        header = nlohmann::json::parse(header_text);
    } catch (const nlohmann::json::exception& e) {
        throw DataError(path + ": bad dataset header: " + e.what());
    }

    FrozenDataset ds;
    ds.class_order = header.at("class_order").get<std::vector<std::string>>();
    ds.freq_hz = header.at("freq_hz").get<std::vector<double>>();
    ds.n_bins = header.at("n_bins").get<std::size_t>();
    ds.epoch = header.at("epoch").get<std::int64_t>();
    ds.parent_index = header.at("parent_index").get<std::vector<std::int32_t>>();
    ds.variant_index = header.at("variant_index").get<std::vector<std::int32_t>>();
    ds.config_echo_json = header.at("config").dump();
    const auto n_samples = header.at("n_samples").get<std::size_t>();

    ds.bins.resize(n_samples * ds.n_bins);
    in.read(reinterpret_cast<char*>(ds.bins.data()),
            static_cast<std::streamsize>(ds.bins.size() * sizeof(float)));
    ds.labels.resize(n_samples);
    in.read(reinterpret_cast<char*>(ds.labels.data()),
            static_cast<std::streamsize>(ds.labels.size() * sizeof(std::int32_t)));
    if (!in) throw DataError(path + ": truncated payload");
    return ds;
}

}  // namespace sgda
