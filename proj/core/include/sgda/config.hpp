#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sgda/augment.hpp"
#include "sgda/mcsa.hpp"
#include "sgda/model.hpp"
#include "sgda/signal.hpp"

namespace sgda {

struct SegmentSection {
    std::size_t segment_len_samples = 0;  // 0 -> one second (round(fs))
    std::size_t train_step_samples = 0;   // 0 -> L/2 (overlapping windows)
    std::size_t infer_step_samples = 0;   // 0 -> L (non-overlapping)
};

struct SynthSection {
    double duration_s = 5.0;
    double base_amplitude = 1.0;
    std::map<int, double> harmonics = {{3, 0.05}, {5, 0.02}};
    double noise_std = 0.01;
    double fault_amplitude = 0.05;
    unsigned healthy_count = 10;
    std::map<FaultType, unsigned> fault_counts;
};

struct PathsSection {
    std::string out_dir = "out";
    std::string input_dir;
    std::string model_path;  // empty -> <out_dir>/model.json
};

// Top-level run configuration; a single seed derives every module stream.
struct RunConfig {
    std::uint64_t seed = 0;
    MotorParams motor;
    HarmonicOrders orders;
    Task task;
    SegmentSection segment;
    NormalizationMode normalization = NormalizationMode::PerSegmentChannel;
    AugmentConfig augment;  // seed and fault_map are filled by the pipeline
    ModelConfig model;      // input_dim and classes are filled by the pipeline
    SynthSection synth;
    PathsSection paths;

    std::size_t segment_len() const;
    std::size_t train_step() const;
    std::size_t infer_step() const;
    std::string model_path() const;
    void validate() const;
};

// Parse + validate a config document. `origin` names the source in errors;
// parse errors report line and column.
RunConfig parse_run_config(const std::string& json_text, const std::string& origin);

// Load from file, apply dotted-path overrides ("model.max_epochs=10"), then
// the --seed / --out flag values, then parse.
RunConfig load_run_config(const std::string& path, const std::vector<std::string>& overrides = {},
                          std::optional<std::uint64_t> seed_flag = {},
                          std::optional<std::string> out_flag = {});

// Effective configuration as a JSON document (the echo embedded in outputs).
std::string run_config_to_json(const RunConfig& cfg, int indent = -1);

}  // namespace sgda
