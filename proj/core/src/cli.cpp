#include "sgda/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "json.hpp"
#include "sgda/errors.hpp"
#include "sgda/synth.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace sgda::cli {

namespace {

void ensure_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw DataError(dir + ": cannot create directory: " + ec.message());
}

json config_echo(const RunConfig& cfg) { return json::parse(run_config_to_json(cfg)); }

json metrics_to_json(const Metrics& m, const std::vector<ClassLabel>& classes) {
    json j;
    j["accuracy"] = m.accuracy;
    j["macro_f1"] = m.macro_f1;
    json per_class = json::object();
    for (std::size_t k = 0; k < classes.size(); ++k) {
        per_class[to_string(classes[k])] = {{"precision", m.precision[k]},
                                            {"recall", m.recall[k]},
                                            {"f1", m.f1[k]},
                                            {"support", m.support[k]}};
    }
    j["per_class"] = per_class;
    j["confusion_rows_true"] = m.confusion;
    std::vector<std::string> names;
    for (ClassLabel l : classes) names.emplace_back(to_string(l));
    j["class_order"] = names;
    return j;
}

std::string confusion_csv(const Metrics& m, const std::vector<ClassLabel>& classes) {
    std::ostringstream out;
    out.precision(17);
    out << "true_class";
    for (ClassLabel l : classes) out << ",pred_" << to_string(l);
    out << '\n';
    for (std::size_t i = 0; i < classes.size(); ++i) {
        out << to_string(classes[i]);
        for (std::size_t j = 0; j < classes.size(); ++j) out << ',' << m.confusion[i][j];
        out << '\n';
    }
    return out.str();
}

json report_to_json(const VoteReport& report) {
    json votes = json::object();
    for (const auto& [label, count] : report.vote_counts) votes[to_string(label)] = count;
    json segments = json::array();
    for (const auto& [index, pred] : report.segment_predictions) {
        segments.push_back({{"segment", index},
                            {"label", to_string(pred.label)},
                            {"probabilities", pred.probabilities}});
    }
    json j{{"source", report.source_id},
           {"verdict", to_string(report.verdict)},
           {"tie", report.tie_flag},
           {"confidence", report.confidence},
           {"votes", votes},
           {"segments", segments}};
    if (report.truth) j["truth"] = to_string(*report.truth);
    return j;
}

struct ManifestEntry {
    std::string file;  // relative to the manifest directory
    ClassLabel label = ClassLabel::Normal;
};

std::vector<ManifestEntry> read_manifest(const std::string& manifest_path) {
    std::ifstream in(manifest_path);
    if (!in) throw DataError(manifest_path + ": cannot open manifest");
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw DataError(manifest_path + ": bad manifest: " + e.what());
    }
    std::vector<ManifestEntry> entries;
    for (const auto& item : j.at("signals")) {
        ManifestEntry e;
        e.file = item.at("file").get<std::string>();
        const auto label_name = item.at("label").get<std::string>();
        try {
            e.label = class_label_from_string(label_name);
        } catch (const ConfigError&) {
            throw DataError(manifest_path + ": unknown label '" + label_name + "' for file " +
                            e.file);
        }
        entries.push_back(std::move(e));
    }
    return entries;
}

// Preprocess one signal into normalized single-channel parent spectra.
struct PreprocessedSignal {
    std::vector<Spectrum> db_spectra;  // per segment, possibly multichannel
};

std::vector<Spectrum> db_spectra_of(const RawSignal& signal, std::size_t seg_len,
                                    std::size_t step) {
    SegmentConfig seg_cfg{seg_len, step};
    std::vector<Spectrum> out;
    for (const auto& seg : segment(signal, seg_cfg)) out.push_back(db_scale(fft_magnitude(seg)));
    return out;
}

// Truth label translated into the model's class space: under the binary task
// every fault maps onto the grouped anomalous class.
ClassLabel truth_in_class_space(ClassLabel truth, const Task& task) {
    if (truth == ClassLabel::Normal) return truth;
    if (task.kind == TaskKind::Binary) return ClassLabel::Anomalous;
    return truth;
}

std::map<FaultType, FrequencySet> build_fault_map(const RunConfig& cfg) {
    const FaultFrequencyMap map = fault_frequency_map(cfg.motor, cfg.task.faults, cfg.orders);
    if (!map.no_inband.empty())
        throw ConfigError(std::string("fault has no in-band frequencies: ") +
                          to_string(map.no_inband.front()));
    return map.sets;
}

}  // namespace

void write_file_atomic(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw DataError(tmp + ": cannot open file for writing");
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) throw DataError(tmp + ": write failed");
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) throw DataError(path + ": rename failed: " + ec.message());
}

std::string manifest_label_dir(const std::string& manifest_path) {
    return fs::path(manifest_path).parent_path().string();
}

void run_freqs(const RunConfig& cfg, std::ostream& out) {
    const FaultFrequencyMap map = fault_frequency_map(cfg.motor, cfg.task.faults, cfg.orders);

    out << "fault frequencies for " << (cfg.motor.name.empty() ? "motor" : cfg.motor.name)
        << " (rotor orders";
    for (int n : cfg.orders.rotor_orders) out << ' ' << n;
    out << "; itsc k";
    for (int k : cfg.orders.itsc_k) out << ' ' << k;
    out << ", m";
    for (int m : cfg.orders.itsc_m) out << ' ' << m;
    out << ")\n";

    json jfreqs = json::object();
    for (const auto& [fault, set] : map.sets) {
        out << "  " << to_string(fault) << ':';
        std::ostringstream line;
        line.precision(6);
        for (double f : set.frequencies_hz) line << ' ' << f;
        out << line.str();
        if (set.dropped > 0) out << "  (" << set.dropped << " out-of-band dropped)";
        out << '\n';
        jfreqs[to_string(fault)] = {{"frequencies_hz", set.frequencies_hz},
                                    {"dropped", set.dropped}};
    }
    for (FaultType fault : map.no_inband) {
        out << "  " << to_string(fault) << ": no in-band frequencies\n";
        jfreqs[to_string(fault)] = {{"frequencies_hz", json::array()}, {"note", "no in-band frequencies"}};
    }

    ensure_dir(cfg.paths.out_dir);
    json doc{{"run_config", config_echo(cfg)}, {"faults", jfreqs}};
    write_file_atomic(cfg.paths.out_dir + "/freqs.json", doc.dump(2) + "\n");

    std::ostringstream csv;
    csv.precision(17);
    csv << "fault,frequency_hz\n";
    for (const auto& [fault, set] : map.sets)
        for (double f : set.frequencies_hz) csv << to_string(fault) << ',' << f << '\n';
    write_file_atomic(cfg.paths.out_dir + "/freqs.csv", csv.str());
}

void run_synth(const RunConfig& cfg, std::ostream& out) {
    ensure_dir(cfg.paths.out_dir);

    SynthConfig base;
    base.params = cfg.motor;
    base.orders = cfg.orders;
    base.duration_s = cfg.synth.duration_s;
    base.base_amplitude = cfg.synth.base_amplitude;
    base.harmonic_amplitudes = cfg.synth.harmonics;
    base.noise_std = cfg.synth.noise_std;

    json signals = json::array();
    json label_groups = json::object();
    std::size_t written = 0;

    const auto emit = [&](const std::string& stem, ClassLabel label,
                          std::optional<FaultType> fault, unsigned count) {
        for (unsigned i = 0; i < count; ++i) {
            SynthConfig sc = base;
            sc.seed = derive_seed(cfg.seed, std::string("synth/") + stem, i);
            if (fault) sc.fault = std::make_pair(*fault, cfg.synth.fault_amplitude);
            RawSignal signal = generate(sc);
            std::ostringstream name;
            name << stem << '_' << std::setw(3) << std::setfill('0') << i << ".csv";
            const std::string file = name.str();
            save_signal_csv(signal, cfg.paths.out_dir + "/" + file);
            signals.push_back({{"file", file},
                               {"label", to_string(label)},
                               {"seed", sc.seed},
                               {"sampling_rate_hz", cfg.motor.sampling_rate_hz}});
            label_groups[to_string(label)].push_back(file);
            ++written;
        }
    };

    emit("healthy", ClassLabel::Normal, std::nullopt, cfg.synth.healthy_count);
    for (const auto& [fault, count] : cfg.synth.fault_counts)
        emit(to_string(fault), to_class_label(fault), fault, count);

    json manifest{{"run_config", config_echo(cfg)},
                  {"signals", signals},
                  {"label_groups", label_groups}};
    write_file_atomic(cfg.paths.out_dir + "/manifest.json", manifest.dump(2) + "\n");
    out << "wrote " << written << " signals and manifest.json to " << cfg.paths.out_dir << '\n';
}

void run_preprocess(const RunConfig& cfg, const std::vector<std::string>& signal_paths,
                    std::ostream& out) {
    std::vector<std::string> inputs = signal_paths;
    if (inputs.empty()) {
        if (cfg.paths.input_dir.empty())
            throw ConfigError("paths.input_dir: required when no signal files are given");
        for (const auto& entry : fs::directory_iterator(cfg.paths.input_dir))
            if (entry.path().extension() == ".csv") inputs.push_back(entry.path().string());
        std::sort(inputs.begin(), inputs.end());
    }
    if (inputs.empty()) throw DataError("preprocess: no input signals");

    ensure_dir(cfg.paths.out_dir);
    const std::string spectra_dir = cfg.paths.out_dir + "/spectra";
    ensure_dir(spectra_dir);

    const std::size_t seg_len = cfg.segment_len();
    const std::size_t step = cfg.train_step();

    std::vector<Spectrum> all_db;
    std::vector<std::string> stems;
    for (const auto& path : inputs) {
        const RawSignal signal = load_signal_csv(path, cfg.motor.sampling_rate_hz);
        const auto db = db_spectra_of(signal, seg_len, step);
        const std::string stem = fs::path(path).stem().string();
        for (std::size_t i = 0; i < db.size(); ++i) {
            all_db.push_back(db[i]);
            stems.push_back(stem + "_seg" + std::to_string(i));
        }
    }

    const NormalizeResult norm = normalize(all_db, cfg.normalization);
    for (std::size_t i = 0; i < norm.spectra.size(); ++i)
        save_spectrum_csv(norm.spectra[i], spectra_dir + "/" + stems[i] + ".csv");

    // single-channel parents, labeled Normal, frozen for inspection/reuse
    std::vector<LabeledSpectrum> parents;
    for (const auto& spec : norm.spectra)
        for (auto& channel : split_channels(spec))
            parents.push_back({std::move(channel), ClassLabel::Normal, {parents.size(), -1, 0}});
    const FrozenDataset frozen =
        freeze(parents, {ClassLabel::Normal}, -1, run_config_to_json(cfg));
    save_dataset(frozen, cfg.paths.out_dir + "/spectra.sgdads");

    json ctx{{"run_config", config_echo(cfg)},
             {"normalization",
              {{"mode",
                norm.context.mode == NormalizationMode::GlobalPerChannel ? "global"
                                                                         : "per_segment"},
               {"min_db", norm.context.min_db},
               {"max_db", norm.context.max_db}}},
             {"segments", norm.spectra.size()},
             {"parents", parents.size()}};
    write_file_atomic(cfg.paths.out_dir + "/preprocess.json", ctx.dump(2) + "\n");
    out << "preprocessed " << inputs.size() << " signals into " << parents.size()
        << " parent spectra\n";
}

void run_train(const RunConfig& cfg, std::ostream& out) {
    if (cfg.paths.input_dir.empty())
        throw ConfigError("paths.input_dir: required for the train command");

    // Gather healthy inputs; a manifest with any fault label is a contract
    // violation, because training uses healthy recordings exclusively.
    std::vector<std::string> files;
    const std::string manifest_path = cfg.paths.input_dir + "/manifest.json";
    if (fs::exists(manifest_path)) {
        for (const auto& entry : read_manifest(manifest_path)) {
            if (entry.label != ClassLabel::Normal)
                throw DataError("train: input '" + entry.file +
                                "' is labeled '" + to_string(entry.label) +
                                "'; training accepts healthy signals only");
            files.push_back(cfg.paths.input_dir + "/" + entry.file);
        }
    } else {
        for (const auto& entry : fs::directory_iterator(cfg.paths.input_dir))
            if (entry.path().extension() == ".csv") files.push_back(entry.path().string());
        std::sort(files.begin(), files.end());
    }
    if (files.empty()) throw DataError(cfg.paths.input_dir + ": no training signals found");

    const std::size_t seg_len = cfg.segment_len();
    std::vector<Spectrum> all_db;
    for (const auto& path : files) {
        const RawSignal signal = load_signal_csv(path, cfg.motor.sampling_rate_hz);
        for (auto& spec : db_spectra_of(signal, seg_len, cfg.train_step()))
            all_db.push_back(std::move(spec));
    }

    const NormalizeResult norm = normalize(all_db, cfg.normalization);
    std::vector<Spectrum> parents;
    for (const auto& spec : norm.spectra)
        for (auto& channel : split_channels(spec)) parents.push_back(std::move(channel));

    AugmentConfig acfg = cfg.augment;
    acfg.fault_map = build_fault_map(cfg);

    ModelConfig mcfg = cfg.model;
    mcfg.input_dim = parents[0].bin_count();
    mcfg.classes = cfg.task.class_order();

    const Task task = cfg.task;
    const DatasetProvider provider = [&parents, &acfg, &task](std::int64_t epoch) {
        return build_epoch_dataset(parents, acfg, task, epoch);
    };

    TrainedModel model = train(provider, mcfg);
    model.normalization = norm.context;
    if (!parents.empty()) model.freq_hz = parents[0].freq_hz;

    ensure_dir(cfg.paths.out_dir);
    save_model(model, cfg.model_path());

    json log = json::array();
    std::ostringstream csv;
    csv.precision(17);
    csv << "epoch,loss,learning_rate,macro_f1";
    std::vector<std::string> class_names;
    for (ClassLabel l : mcfg.classes) {
        class_names.emplace_back(to_string(l));
        csv << ",count_" << to_string(l);
    }
    csv << '\n';
    for (const auto& e : model.train_log) {
        json cc = json::object();
        csv << e.epoch << ',' << e.loss << ',' << e.learning_rate << ',' << e.macro_f1;
        for (const auto& name : class_names) {
            const auto it = e.class_counts.find(name);
            const std::size_t count = it == e.class_counts.end() ? 0 : it->second;
            cc[name] = count;
            csv << ',' << count;
        }
        csv << '\n';
        log.push_back({{"epoch", e.epoch},
                       {"loss", e.loss},
                       {"learning_rate", e.learning_rate},
                       {"macro_f1", e.macro_f1},
                       {"class_counts", cc}});
    }
    json jlog{{"run_config", config_echo(cfg)},
              {"parents", parents.size()},
              {"epochs", log}};
    write_file_atomic(cfg.paths.out_dir + "/train_log.json", jlog.dump(2) + "\n");
    write_file_atomic(cfg.paths.out_dir + "/train_log.csv", csv.str());

    out << "trained on " << parents.size() << " healthy parent spectra from " << files.size()
        << " signals; model written to " << cfg.model_path() << '\n';
}

void run_diagnose(const RunConfig& cfg, const std::vector<std::string>& signal_paths,
                  std::ostream& out) {
    if (signal_paths.empty()) throw ConfigError("diagnose: no signal files given");
    const TrainedModel model = load_model(cfg.model_path());

    std::vector<RawSignal> signals;
    for (const auto& path : signal_paths)
        signals.push_back(load_signal_csv(path, cfg.motor.sampling_rate_hz));

    const SegmentConfig seg_cfg{cfg.segment_len(), cfg.infer_step()};
    const BatchDiagnosis batch = batch_diagnose(signals, model, seg_cfg, cfg.normalization);

    ensure_dir(cfg.paths.out_dir);
    json reports = json::array();
    for (const auto& r : batch.reports) reports.push_back(report_to_json(r));
    json errors = json::array();
    for (const auto& [source, message] : batch.errors)
        errors.push_back({{"source", source}, {"error", message}});
    json doc{{"run_config", config_echo(cfg)}, {"reports", reports}, {"errors", errors}};
    write_file_atomic(cfg.paths.out_dir + "/diagnosis.json", doc.dump(2) + "\n");

    std::ostringstream csv;
    csv.precision(17);
    csv << "source,verdict,tie,confidence,segments\n";
    for (const auto& r : batch.reports) {
        csv << fs::path(r.source_id).filename().string() << ',' << to_string(r.verdict) << ','
            << (r.tie_flag ? 1 : 0) << ',' << r.confidence << ',' << r.segment_predictions.size()
            << '\n';
        out << fs::path(r.source_id).filename().string() << ": " << to_string(r.verdict)
            << " (confidence " << r.confidence << (r.tie_flag ? ", tie)" : ")") << '\n';
    }
    for (const auto& [source, message] : batch.errors)
        out << source << ": error: " << message << '\n';
    write_file_atomic(cfg.paths.out_dir + "/diagnosis.csv", csv.str());
}

void run_evaluate(const RunConfig& cfg, const std::string& manifest_path, std::ostream& out) {
    const TrainedModel model = load_model(cfg.model_path());
    const auto entries = read_manifest(manifest_path);
    if (entries.empty()) throw DataError(manifest_path + ": manifest lists no signals");
    const std::string dir = manifest_label_dir(manifest_path);

    std::vector<RawSignal> signals;
    std::vector<std::optional<ClassLabel>> truths;
    for (const auto& entry : entries) {
        signals.push_back(load_signal_csv(dir.empty() ? entry.file : dir + "/" + entry.file,
                                          cfg.motor.sampling_rate_hz));
        const ClassLabel truth = truth_in_class_space(entry.label, cfg.task);
        if (std::find(model.config.classes.begin(), model.config.classes.end(), truth) ==
            model.config.classes.end())
            throw DataError(manifest_path + ": label '" + to_string(entry.label) +
                            "' is outside the model's class order");
        truths.emplace_back(truth);
    }

    const SegmentConfig seg_cfg{cfg.segment_len(), cfg.infer_step()};
    const BatchDiagnosis batch =
        batch_diagnose(signals, model, seg_cfg, cfg.normalization, truths);
    if (!batch.errors.empty())
        throw DataError("evaluate: " + batch.errors.front().first + ": " +
                        batch.errors.front().second);
    if (!batch.metrics) throw DataError("evaluate: metrics unavailable");

    ensure_dir(cfg.paths.out_dir);
    json reports = json::array();
    for (const auto& r : batch.reports) reports.push_back(report_to_json(r));
    json doc{{"run_config", config_echo(cfg)},
             {"segment_level", metrics_to_json(batch.metrics->segment_level, model.config.classes)},
             {"signal_level", metrics_to_json(batch.metrics->signal_level, model.config.classes)},
             {"reports", reports}};
    write_file_atomic(cfg.paths.out_dir + "/evaluation.json", doc.dump(2) + "\n");

    // plot-ready with/without-voting comparison
    std::ostringstream csv;
    csv.precision(17);
    csv << "granularity,accuracy,macro_f1\n";
    csv << "segment," << batch.metrics->segment_level.accuracy << ','
        << batch.metrics->segment_level.macro_f1 << '\n';
    csv << "signal_majority_vote," << batch.metrics->signal_level.accuracy << ','
        << batch.metrics->signal_level.macro_f1 << '\n';
    write_file_atomic(cfg.paths.out_dir + "/evaluation_summary.csv", csv.str());
    write_file_atomic(cfg.paths.out_dir + "/confusion_segment.csv",
                      confusion_csv(batch.metrics->segment_level, model.config.classes));
    write_file_atomic(cfg.paths.out_dir + "/confusion_signal.csv",
                      confusion_csv(batch.metrics->signal_level, model.config.classes));

    out << "segment level: accuracy " << batch.metrics->segment_level.accuracy << ", macro-F1 "
        << batch.metrics->segment_level.macro_f1 << '\n';
    out << "signal level (majority vote): accuracy " << batch.metrics->signal_level.accuracy
        << ", macro-F1 " << batch.metrics->signal_level.macro_f1 << '\n';
}

}  // namespace sgda::cli
