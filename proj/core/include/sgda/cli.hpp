#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "sgda/config.hpp"
#include "sgda/infer.hpp"

namespace sgda::cli {

// Command implementations behind the `sgda` tool. Each writes its artifacts
// under cfg.paths.out_dir (atomically) and prints a short summary to `out`.

void run_freqs(const RunConfig& cfg, std::ostream& out);

void run_synth(const RunConfig& cfg, std::ostream& out);

void run_preprocess(const RunConfig& cfg, const std::vector<std::string>& signal_paths,
                    std::ostream& out);

// Trains on healthy signals from cfg.paths.input_dir. A manifest.json in the
// directory is honored; any fault-labeled entry is rejected, since the
// pipeline trains on healthy data exclusively.
void run_train(const RunConfig& cfg, std::ostream& out);

void run_diagnose(const RunConfig& cfg, const std::vector<std::string>& signal_paths,
                  std::ostream& out);

void run_evaluate(const RunConfig& cfg, const std::string& manifest_path, std::ostream& out);

// Shared helpers (exposed for tests).
void write_file_atomic(const std::string& path, const std::string& content);
std::string manifest_label_dir(const std::string& manifest_path);

}  // namespace sgda::cli
