#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "sgda/augment.hpp"
#include "sgda/labels.hpp"
#include "sgda/signal.hpp"

namespace sgda {

enum class ModelKind { Logistic, OneHidden };

struct ModelConfig {
    ModelKind kind = ModelKind::OneHidden;
    unsigned hidden_units = 64;
    std::size_t input_dim = 0;
    std::vector<ClassLabel> classes;  // Normal always at index 0
    double learning_rate = 1e-3;      // Adam initial rate
    unsigned batch_size = 32;
    unsigned max_epochs = 40;
    unsigned plateau_patience = 10;   // epochs without loss improvement before decay
    double plateau_factor = 0.5;
    double lr_floor = 1e-6;
    std::uint64_t seed = 0;

    void validate() const;
    // 1 sigmoid logit for two classes, softmax over |classes| otherwise
    std::size_t output_dim() const;
    std::size_t param_count() const;
};

struct EpochLogEntry {
    std::int64_t epoch = 0;
    double loss = 0.0;
    double learning_rate = 0.0;
    double macro_f1 = 0.0;
    std::map<std::string, std::size_t> class_counts;
};

struct TrainedModel {
    ModelConfig config;
    std::vector<double> params;  // flat; layout W1,b1[,W2,b2] by kind
    NormalizationContext normalization;
    std::vector<double> freq_hz;  // training-time frequency axis, for provenance
    std::vector<EpochLogEntry> train_log;
};

struct Prediction {
    std::vector<double> probabilities;  // over config.classes, sums to 1
    ClassLabel label = ClassLabel::Normal;
    std::size_t label_index = 0;
};

struct Metrics {
    double accuracy = 0.0;
    double macro_f1 = 0.0;
    std::vector<double> precision, recall, f1;   // per class
    std::vector<std::vector<double>> confusion;  // row-normalized, rows = true class
    std::vector<std::size_t> support;
};

struct GradientCheckReport {
    double max_rel_error = 0.0;
    std::size_t checked_params = 0;
    std::size_t sample_count = 0;
    bool pass = false;
};

using DatasetProvider = std::function<std::vector<LabeledSpectrum>(std::int64_t epoch)>;

// Accuracy, per-class precision/recall/F1, macro-F1 and a row-normalized
// confusion matrix from parallel truth/prediction index vectors.
Metrics compute_metrics(const std::vector<std::size_t>& truth,
                        const std::vector<std::size_t>& predicted, std::size_t class_count);

// Minimizes cross-entropy with Adam over per-epoch datasets from `provider`.
// The learning rate is multiplied by plateau_factor whenever the epoch loss
// fails to improve for plateau_patience consecutive epochs.
TrainedModel train(const DatasetProvider& provider, const ModelConfig& cfg);

Prediction predict(const TrainedModel& model, const Spectrum& spec);

Metrics evaluate(const TrainedModel& model, const std::vector<LabeledSpectrum>& data);

// Analytic gradients vs central finite differences (step 1e-5) on random
// small instances; passes iff the worst relative error stays below tolerance.
GradientCheckReport gradient_check(const ModelConfig& cfg, std::size_t sample_count,
                                   double tolerance);

void save_model(const TrainedModel& model, const std::string& path);
TrainedModel load_model(const std::string& path);

}  // namespace sgda
