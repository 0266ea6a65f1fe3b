#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sgda/model.hpp"
#include "sgda/signal.hpp"

namespace sgda {

// Signal-level verdict from per-segment votes. On ties the most severe tied
// label wins: any fault beats Normal, and among faults the lower class index.
struct VoteReport {
    std::string source_id;
    std::vector<std::pair<std::size_t, Prediction>> segment_predictions;  // (segment idx, ...)
    std::map<ClassLabel, std::size_t> vote_counts;
    ClassLabel verdict = ClassLabel::Normal;
    bool tie_flag = false;
    double confidence = 0.0;  // vote_counts[verdict] / total votes
    std::optional<ClassLabel> truth;
};

struct BatchMetrics {
    Metrics segment_level;
    Metrics signal_level;
};

struct BatchDiagnosis {
    std::vector<VoteReport> reports;
    std::vector<std::pair<std::string, std::string>> errors;  // (source, message)
    std::optional<BatchMetrics> metrics;  // present when ground truth was given
};

// Tie resolution over vote counts, exposed for testing.
std::pair<ClassLabel, bool> resolve_votes(const std::map<ClassLabel, std::size_t>& counts,
                                          const std::vector<ClassLabel>& class_order);

VoteReport diagnose_signal(const RawSignal& signal, const TrainedModel& model,
                           const SegmentConfig& seg_cfg, NormalizationMode norm_mode);

BatchDiagnosis batch_diagnose(const std::vector<RawSignal>& signals, const TrainedModel& model,
                              const SegmentConfig& seg_cfg, NormalizationMode norm_mode,
                              const std::vector<std::optional<ClassLabel>>& truths = {});

}  // namespace sgda
