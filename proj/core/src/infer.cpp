#include "sgda/infer.hpp"

#include <algorithm>

#include "sgda/errors.hpp"

namespace sgda {

std::pair<ClassLabel, bool> resolve_votes(const std::map<ClassLabel, std::size_t>& counts,
                                          const std::vector<ClassLabel>& class_order) {
    std::size_t best = 0;
    for (const auto& [label, count] : counts) best = std::max(best, count);
    if (best == 0) throw DataError("resolve_votes: no votes");

    std::vector<ClassLabel> tied;
    for (ClassLabel label : class_order) {
        const auto it = counts.find(label);
        if (it != counts.end() && it->second == best) tied.push_back(label);
    }
    if (tied.size() == 1) return {tied[0], false};

    // fault beats Normal; among faults the lower class index wins
    for (ClassLabel label : tied)
        if (label != ClassLabel::Normal) return {label, true};
    return {ClassLabel::Normal, true};
}

VoteReport diagnose_signal(const RawSignal& signal, const TrainedModel& model,
                           const SegmentConfig& seg_cfg, NormalizationMode norm_mode) {
    if (norm_mode == NormalizationMode::GlobalPerChannel &&
        model.normalization.mode != NormalizationMode::GlobalPerChannel)
        throw DataError("diagnose_signal: model carries no global normalization context");

    VoteReport report;
    report.source_id = signal.source_id;
    for (ClassLabel label : model.config.classes) report.vote_counts[label] = 0;

    const auto segments = segment(signal, seg_cfg);
    for (const auto& seg : segments) {
        const Spectrum db = db_scale(fft_magnitude(seg));
        Spectrum normalized;
        if (norm_mode == NormalizationMode::GlobalPerChannel) {
            normalized = normalize_with_context(db, model.normalization);
        } else {
            normalized = normalize({db}, NormalizationMode::PerSegmentChannel).spectra[0];
        }
        for (const Spectrum& channel : split_channels(normalized)) {
            Prediction pred = predict(model, channel);
            report.vote_counts[pred.label]++;
            report.segment_predictions.emplace_back(seg.index, std::move(pred));
        }
    }

    const auto [verdict, tie] = resolve_votes(report.vote_counts, model.config.classes);
    report.verdict = verdict;
    report.tie_flag = tie;
    report.confidence = static_cast<double>(report.vote_counts.at(verdict)) /
                        static_cast<double>(report.segment_predictions.size());
    return report;
}

BatchDiagnosis batch_diagnose(const std::vector<RawSignal>& signals, const TrainedModel& model,
                              const SegmentConfig& seg_cfg, NormalizationMode norm_mode,
                              const std::vector<std::optional<ClassLabel>>& truths) {
    if (signals.empty()) throw DataError("batch_diagnose: empty signal list");
    if (!truths.empty() && truths.size() != signals.size())
        throw DataError("batch_diagnose: truth list length does not match signals");

    BatchDiagnosis batch;
    for (std::size_t i = 0; i < signals.size(); ++i) {
        try {
            VoteReport report = diagnose_signal(signals[i], model, seg_cfg, norm_mode);
            if (!truths.empty()) report.truth = truths[i];
            batch.reports.push_back(std::move(report));
        } catch (const std::exception& e) {
            batch.errors.emplace_back(signals[i].source_id, e.what());
        }
    }

    const bool all_labeled =
        !batch.reports.empty() &&
        std::all_of(batch.reports.begin(), batch.reports.end(),
                    [](const VoteReport& r) { return r.truth.has_value(); });
    if (all_labeled) {
        const auto index_of = [&](ClassLabel l) {
            for (std::size_t k = 0; k < model.config.classes.size(); ++k)
                if (model.config.classes[k] == l) return k;
            throw DataError(std::string("label not in model class order: ") + to_string(l));
        };
        std::vector<std::size_t> sig_truth, sig_pred, seg_truth, seg_pred;
        for (const auto& r : batch.reports) {
            const std::size_t t = index_of(*r.truth);
            sig_truth.push_back(t);
            sig_pred.push_back(index_of(r.verdict));
            for (const auto& [idx, pred] : r.segment_predictions) {
                (void)idx;
                seg_truth.push_back(t);
                seg_pred.push_back(pred.label_index);
            }
        }
        BatchMetrics metrics;
        metrics.signal_level =
            compute_metrics(sig_truth, sig_pred, model.config.classes.size());
        metrics.segment_level =
            compute_metrics(seg_truth, seg_pred, model.config.classes.size());
        batch.metrics = metrics;
    }
    return batch;
}

}  // namespace sgda
