#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sgda/mcsa.hpp"
#include "sgda/rng.hpp"
#include "sgda/signal.hpp"

namespace sgda {

// One sampled Gaussian anomaly: value A*exp(-(x-mu)^2 / (2*sigma^2)) on the
// window |x| <= epsilon_f, where x = f_k - anchor.
struct PeakParams {
    double amplitude = 0.0;  // signed, |amplitude| in [a_min, a_max]
    double mu_hz = 0.0;      // in [-epsilon_f, epsilon_f]
    double sigma_hz = 0.0;   // in [sigma_min, sigma_max]
    double anchor_hz = 0.0;  // f*
};

struct AugmentConfig {
    // When a_min is unset it is estimated per parent spectrum as the mean
    // absolute successive-bin difference (the local spectral variability).
    std::optional<double> a_min;
    double a_max = 1.0;
    double sigma_min_hz = 0.1;
    double sigma_max_hz = 0.5;
    double epsilon_f_hz = 2.0;
    unsigned replication_r = 0;  // R identical normal copies beyond the first
    bool stratified = true;      // false: draw fault types uniformly instead of cycling
    std::uint64_t seed = 0;
    std::map<FaultType, FrequencySet> fault_map;

    void validate() const;
};

enum class TaskKind { Binary, Multiclass };

struct Task {
    TaskKind kind = TaskKind::Binary;
    std::vector<FaultType> faults;  // the fault set T, nonempty

    void validate() const;
    // Normal first, then Anomalous (binary) or the fault labels in T order.
    std::vector<ClassLabel> class_order() const;
    std::size_t variants_per_segment(unsigned replication_r) const;  // K
};

struct Provenance {
    std::size_t parent_index = 0;
    std::int64_t epoch = 0;
    std::size_t variant_index = 0;
};

struct LabeledSpectrum {
    Spectrum spectrum;
    ClassLabel label = ClassLabel::Normal;
    Provenance provenance;
};

std::vector<double> gaussian_peak_vector(const std::vector<double>& freq_axis,
                                         const PeakParams& peak, double epsilon_f_hz);

PeakParams sample_peak(double anchor_hz, const AugmentConfig& cfg, Philox& rng);

// The augmentation operator: identity for Normal, otherwise the parent plus
// one freshly sampled peak per anchor frequency of the label's fault set
// (for Anomalous, the union over all faults in cfg.fault_map).
LabeledSpectrum augment_spectrum(const Spectrum& parent, ClassLabel label,
                                 const AugmentConfig& cfg, Philox& rng);

// Per-epoch balanced dataset: for each parent, R+1 normal copies followed by
// K fault variants. Every class ends up with exactly |parents|*(1+R) samples
// (stratified mode); rng streams are keyed by (seed, epoch, parent, variant).
std::vector<LabeledSpectrum> build_epoch_dataset(const std::vector<Spectrum>& parents,
                                                 const AugmentConfig& cfg, const Task& task,
                                                 std::int64_t epoch);

// Anchor frequencies for a class label under this config (union for Anomalous).
std::vector<double> anchors_for_label(const AugmentConfig& cfg, ClassLabel label);

// --- frozen dataset container ------------------------------------------------
// Binary file: magic "SGDADS01", little-endian u64 header length, JSON header,
// then n*b float32 bins (row-major) and n int32 labels.

struct FrozenDataset {
    std::vector<std::string> class_order;
    std::vector<double> freq_hz;
    std::vector<float> bins;           // n_samples * n_bins, row-major
    std::vector<std::int32_t> labels;  // index into class_order
    std::vector<std::int32_t> parent_index;
    std::vector<std::int32_t> variant_index;
    std::int64_t epoch = 0;
    std::string config_echo_json;  // serialized JSON object, may be "{}"

    std::size_t n_bins = 0;
    std::size_t sample_count() const { return labels.size(); }
};

FrozenDataset freeze(const std::vector<LabeledSpectrum>& data,
                     const std::vector<ClassLabel>& class_order, std::int64_t epoch,
                     const std::string& config_echo_json = "{}");

void save_dataset(const FrozenDataset& ds, const std::string& path);
FrozenDataset load_dataset(const std::string& path);

}  // namespace sgda
