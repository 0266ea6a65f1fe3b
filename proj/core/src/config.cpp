#include "sgda/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "sgda/errors.hpp"

namespace sgda {

namespace {

using nlohmann::json;

// Field accessor that carries the dotted path into every error message.
class Section {
public:
    Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {}

    bool has(const char* key) const { return j_.contains(key) && !j_.at(key).is_null(); }

    Section child(const char* key) const {
        const json& sub = j_.at(key);
        if (!sub.is_object()) throw ConfigError(join(key) + ": expected an object");
        return Section(sub, join(key));
    }

    template <typename T>
    T get(const char* key) const {
        if (!has(key)) throw ConfigError(join(key) + ": missing required field");
        return as<T>(key);
    }

    template <typename T>
    T get_or(const char* key, T fallback) const {
        if (!has(key)) return fallback;
        return as<T>(key);
    }

    template <typename T>
    std::optional<T> get_optional(const char* key) const {
        if (!has(key)) return std::nullopt;
        return as<T>(key);
    }

    const json& raw() const { return j_; }
    const std::string& path() const { return path_; }
    std::string join(const char* key) const {
        return path_.empty() ? key : path_ + "." + key;
    }

private:
    template <typename T>
    T as(const char* key) const {
        try {
            return j_.at(key).get<T>();
        } catch (const json::exception& e) {
            throw ConfigError(join(key) + ": " + e.what());
        }
    }

    const json& j_;
    std::string path_;
};

std::pair<std::size_t, std::size_t> line_col_of(const std::string& text, std::size_t byte) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return {line, col};
}

MotorParams parse_motor(const Section& s) {
    MotorParams m;
    m.name = s.get_or<std::string>("name", "");
    m.supply_frequency_hz = s.get<double>("supply_frequency_hz");
    m.slip = s.get<double>("slip");
    m.pole_pairs = s.get_or<int>("pole_pairs", 1);
    m.rotor_frequency_hz = s.get_optional<double>("rotor_frequency_hz");
    m.sampling_rate_hz = s.get<double>("sampling_rate_hz");
    m.rotor_bar_count = s.get_optional<int>("rotor_bar_count");
    if (s.has("bearing")) {
        const Section b = s.child("bearing");
        BearingGeometry g;
        g.n_elements = b.get<int>("n_elements");
        g.ball_diameter_m = b.get<double>("ball_diameter_m");
        g.pitch_diameter_m = b.get<double>("pitch_diameter_m");
        g.contact_angle_rad = b.get_or<double>("contact_angle_rad", 0.0);
        m.bearing = g;
    }
    return m;
}

HarmonicOrders parse_orders(const Section& s) {
    HarmonicOrders o;
    o.rotor_orders = s.get_or<std::vector<int>>("rotor", o.rotor_orders);
    o.itsc_k = s.get_or<std::vector<int>>("itsc_k", o.itsc_k);
    o.itsc_m = s.get_or<std::vector<int>>("itsc_m", o.itsc_m);
    return o;
}

Task parse_task(const Section& s) {
    Task t;
    const std::string kind = s.get_or<std::string>("kind", "binary");
    if (kind == "binary") {
        t.kind = TaskKind::Binary;
    } else if (kind == "multiclass") {
        t.kind = TaskKind::Multiclass;
    } else {
        throw ConfigError(s.join("kind") + ": expected 'binary' or 'multiclass', got '" + kind +
                          "'");
    }
    std::vector<std::string> names =
        s.get_or<std::vector<std::string>>("faults", {"rbd", "itsc"});
    t.faults.clear();
    for (const auto& name : names) {
        try {
            t.faults.push_back(fault_from_string(name));
        } catch (const ConfigError& e) {
            throw ConfigError(s.join("faults") + ": " + e.what());
        }
    }
    return t;
}

AugmentConfig parse_augment(const Section& s) {
    AugmentConfig a;
    a.a_min = s.get_optional<double>("a_min");
    a.a_max = s.get_or<double>("a_max", a.a_max);
    a.sigma_min_hz = s.get_or<double>("sigma_min_hz", a.sigma_min_hz);
    a.sigma_max_hz = s.get_or<double>("sigma_max_hz", a.sigma_max_hz);
    a.epsilon_f_hz = s.get_or<double>("epsilon_f_hz", a.epsilon_f_hz);
    a.replication_r = s.get_or<unsigned>("replication_r", a.replication_r);
    a.stratified = s.get_or<bool>("stratified", a.stratified);
    return a;
}

ModelConfig parse_model(const Section& s) {
    ModelConfig m;
    const std::string kind = s.get_or<std::string>("kind", "one_hidden");
    if (kind == "logistic") {
        m.kind = ModelKind::Logistic;
    } else if (kind == "one_hidden") {
        m.kind = ModelKind::OneHidden;
    } else {
        throw ConfigError(s.join("kind") + ": expected 'logistic' or 'one_hidden', got '" + kind +
                          "'");
    }
    m.hidden_units = s.get_or<unsigned>("hidden_units", m.hidden_units);
    m.learning_rate = s.get_or<double>("learning_rate", m.learning_rate);
    m.batch_size = s.get_or<unsigned>("batch_size", m.batch_size);
    m.max_epochs = s.get_or<unsigned>("max_epochs", m.max_epochs);
    m.plateau_patience = s.get_or<unsigned>("plateau_patience", m.plateau_patience);
    m.plateau_factor = s.get_or<double>("plateau_factor", m.plateau_factor);
    m.lr_floor = s.get_or<double>("lr_floor", m.lr_floor);
    return m;
}

SynthSection parse_synth(const Section& s) {
    SynthSection sy;
    sy.duration_s = s.get_or<double>("duration_s", sy.duration_s);
    sy.base_amplitude = s.get_or<double>("base_amplitude", sy.base_amplitude);
    if (s.has("harmonics")) {
        sy.harmonics.clear();
        for (const auto& [key, value] : s.raw().at("harmonics").items()) {
            int order = 0;
            const auto [ptr, ec] = std::from_chars(key.data(), key.data() + key.size(), order);
            if (ec != std::errc{} || ptr != key.data() + key.size())
                throw ConfigError(s.join("harmonics") + ": key '" + key +
                                  "' is not an integer harmonic order");
            if (!value.is_number())
                throw ConfigError(s.join("harmonics") + ": amplitude for '" + key +
                                  "' must be a number");
            sy.harmonics[order] = value.get<double>();
        }
    }
    sy.noise_std = s.get_or<double>("noise_std", sy.noise_std);
    sy.fault_amplitude = s.get_or<double>("fault_amplitude", sy.fault_amplitude);
    sy.healthy_count = s.get_or<unsigned>("healthy_count", sy.healthy_count);
    if (s.has("fault_counts")) {
        for (const auto& [key, value] : s.raw().at("fault_counts").items()) {
            FaultType fault;
            try {
                fault = fault_from_string(key);
            } catch (const ConfigError& e) {
                throw ConfigError(s.join("fault_counts") + ": " + e.what());
            }
            if (!value.is_number_unsigned())
                throw ConfigError(s.join("fault_counts") + ": count for '" + key +
                                  "' must be a nonnegative integer");
            sy.fault_counts[fault] = value.get<unsigned>();
        }
    }
    return sy;
}

}  // namespace

std::size_t RunConfig::segment_len() const {
    if (segment.segment_len_samples > 0) return segment.segment_len_samples;
    return static_cast<std::size_t>(std::llround(motor.sampling_rate_hz));
}

std::size_t RunConfig::train_step() const {
    if (segment.train_step_samples > 0) return segment.train_step_samples;
    return std::max<std::size_t>(1, segment_len() / 2);
}

std::size_t RunConfig::infer_step() const {
    if (segment.infer_step_samples > 0) return segment.infer_step_samples;
    return segment_len();
}

std::string RunConfig::model_path() const {
    if (!paths.model_path.empty()) return paths.model_path;
    return paths.out_dir + "/model.json";
}

void RunConfig::validate() const {
    motor.validate();
    orders.validate();
    task.validate();
    augment.validate();
    if (segment.train_step_samples > segment_len())
        throw ConfigError("segment.train_step_samples: must not exceed the segment length");
    if (segment.infer_step_samples > segment_len())
        throw ConfigError("segment.infer_step_samples: must not exceed the segment length");
    if (!(model.learning_rate > 0.0)) throw ConfigError("model.learning_rate: must be > 0");
    if (model.batch_size == 0) throw ConfigError("model.batch_size: must be > 0");
    if (model.kind == ModelKind::OneHidden && model.hidden_units == 0)
        throw ConfigError("model.hidden_units: must be > 0");
    if (model.plateau_patience == 0) throw ConfigError("model.plateau_patience: must be > 0");
    if (!(model.plateau_factor > 0.0 && model.plateau_factor < 1.0))
        throw ConfigError("model.plateau_factor: must lie in (0, 1)");
    if (!(synth.duration_s > 0.0)) throw ConfigError("synth.duration_s: must be > 0");
    if (!(synth.base_amplitude > 0.0)) throw ConfigError("synth.base_amplitude: must be > 0");
    if (synth.noise_std < 0.0) throw ConfigError("synth.noise_std: must be >= 0");
    if (!(synth.fault_amplitude > 0.0 && synth.fault_amplitude < synth.base_amplitude))
        throw ConfigError("synth.fault_amplitude: must lie in (0, base_amplitude)");
    for (const auto& [order, amp] : synth.harmonics) {
        if (order < 3 || order % 2 == 0)
            throw ConfigError("synth.harmonics: orders must be odd integers >= 3");
        if (amp < 0.0) throw ConfigError("synth.harmonics: amplitudes must be >= 0");
    }
    if (paths.out_dir.empty()) throw ConfigError("paths.out_dir: must be nonempty");
}

RunConfig parse_run_config(const std::string& json_text, const std::string& origin) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::parse_error& e) {
        const auto [line, col] = line_col_of(json_text, e.byte > 0 ? e.byte - 1 : 0);
        throw ConfigError(origin + ": JSON parse error at line " + std::to_string(line) +
                          ", column " + std::to_string(col) + ": " + e.what());
    }
    if (!root.is_object()) throw ConfigError(origin + ": top-level JSON value must be an object");

    const Section top(root, "");
    RunConfig cfg;
    cfg.seed = top.get_or<std::uint64_t>("seed", 0);
    if (!top.has("motor")) throw ConfigError("motor: missing required section");
    cfg.motor = parse_motor(top.child("motor"));
    if (top.has("orders")) cfg.orders = parse_orders(top.child("orders"));
    if (top.has("task")) cfg.task = parse_task(top.child("task"));
    if (top.has("segment")) {
        const Section s = top.child("segment");
        cfg.segment.segment_len_samples = s.get_or<std::size_t>("segment_len_samples", 0);
        cfg.segment.train_step_samples = s.get_or<std::size_t>("train_step_samples", 0);
        cfg.segment.infer_step_samples = s.get_or<std::size_t>("infer_step_samples", 0);
    }
    const std::string norm = top.get_or<std::string>("normalization", "per_segment");
    if (norm == "per_segment") {
        cfg.normalization = NormalizationMode::PerSegmentChannel;
    } else if (norm == "global") {
        cfg.normalization = NormalizationMode::GlobalPerChannel;
    } else {
        throw ConfigError("normalization: expected 'per_segment' or 'global', got '" + norm + "'");
    }
    if (top.has("augment")) cfg.augment = parse_augment(top.child("augment"));
    if (top.has("model")) cfg.model = parse_model(top.child("model"));
    if (top.has("synth")) cfg.synth = parse_synth(top.child("synth"));
    if (top.has("paths")) {
        const Section p = top.child("paths");
        cfg.paths.out_dir = p.get_or<std::string>("out_dir", cfg.paths.out_dir);
        cfg.paths.input_dir = p.get_or<std::string>("input_dir", cfg.paths.input_dir);
        cfg.paths.model_path = p.get_or<std::string>("model_path", cfg.paths.model_path);
    }

    // derived module seeds: one top-level seed reproduces the whole run
    cfg.augment.seed = derive_seed(cfg.seed, "augment");
    cfg.model.seed = derive_seed(cfg.seed, "model");

    cfg.validate();
    return cfg;
}

RunConfig load_run_config(const std::string& path, const std::vector<std::string>& overrides,
                          std::optional<std::uint64_t> seed_flag,
                          std::optional<std::string> out_flag) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path + ": cannot open config file");
    std::stringstream buffer;
    buffer << in.rdbuf();
    std::string text = buffer.str();

    if (!overrides.empty() || seed_flag || out_flag) {
        json root;
        try {
            root = json::parse(text);
        } catch (const json::parse_error& e) {
            const auto [line, col] = line_col_of(text, e.byte > 0 ? e.byte - 1 : 0);
            throw ConfigError(path + ": JSON parse error at line " + std::to_string(line) +
                              ", column " + std::to_string(col) + ": " + e.what());
        }
        for (const std::string& kv : overrides) {
            const std::size_t eq = kv.find('=');
            if (eq == std::string::npos || eq == 0)
                throw ConfigError("--override: expected key=value, got '" + kv + "'");
            const std::string key = kv.substr(0, eq);
            const std::string value = kv.substr(eq + 1);
            json parsed;
            try {
                parsed = json::parse(value);
            } catch (const json::parse_error&) {
                parsed = value;  // bare strings stay strings
            }
            json* node = &root;
            std::size_t start = 0;
            while (true) {
                const std::size_t dot = key.find('.', start);
                const std::string part = key.substr(start, dot - start);
                if (part.empty()) throw ConfigError("--override: empty path element in '" + key + "'");
                if (dot == std::string::npos) {
                    (*node)[part] = parsed;
                    break;
                }
                if (!node->contains(part) || !(*node)[part].is_object()) (*node)[part] = json::object();
                node = &(*node)[part];
                start = dot + 1;
            }
        }
        if (seed_flag) root["seed"] = *seed_flag;
        if (out_flag) root["paths"]["out_dir"] = *out_flag;
        text = root.dump();
    }
    return parse_run_config(text, path);
}

std::string run_config_to_json(const RunConfig& cfg, int indent) {
    json j;
    j["seed"] = cfg.seed;
    j["motor"] = {
        {"name", cfg.motor.name},
        {"supply_frequency_hz", cfg.motor.supply_frequency_hz},
        {"slip", cfg.motor.slip},
        {"pole_pairs", cfg.motor.pole_pairs},
        {"sampling_rate_hz", cfg.motor.sampling_rate_hz},
    };
    if (cfg.motor.rotor_frequency_hz) j["motor"]["rotor_frequency_hz"] = *cfg.motor.rotor_frequency_hz;
    if (cfg.motor.rotor_bar_count) j["motor"]["rotor_bar_count"] = *cfg.motor.rotor_bar_count;
    if (cfg.motor.bearing) {
        j["motor"]["bearing"] = {
            {"n_elements", cfg.motor.bearing->n_elements},
            {"ball_diameter_m", cfg.motor.bearing->ball_diameter_m},
            {"pitch_diameter_m", cfg.motor.bearing->pitch_diameter_m},
            {"contact_angle_rad", cfg.motor.bearing->contact_angle_rad},
        };
    }
    j["orders"] = {{"rotor", cfg.orders.rotor_orders},
                   {"itsc_k", cfg.orders.itsc_k},
                   {"itsc_m", cfg.orders.itsc_m}};
    std::vector<std::string> faults;
    for (FaultType t : cfg.task.faults) faults.emplace_back(to_string(t));
    j["task"] = {{"kind", cfg.task.kind == TaskKind::Binary ? "binary" : "multiclass"},
                 {"faults", faults}};
    j["segment"] = {{"segment_len_samples", cfg.segment_len()},
                    {"train_step_samples", cfg.train_step()},
                    {"infer_step_samples", cfg.infer_step()}};
    j["normalization"] =
        cfg.normalization == NormalizationMode::GlobalPerChannel ? "global" : "per_segment";
    j["augment"] = {{"a_max", cfg.augment.a_max},
                    {"sigma_min_hz", cfg.augment.sigma_min_hz},
                    {"sigma_max_hz", cfg.augment.sigma_max_hz},
                    {"epsilon_f_hz", cfg.augment.epsilon_f_hz},
                    {"replication_r", cfg.augment.replication_r},
                    {"stratified", cfg.augment.stratified}};
    if (cfg.augment.a_min) j["augment"]["a_min"] = *cfg.augment.a_min;
    j["model"] = {{"kind", cfg.model.kind == ModelKind::Logistic ? "logistic" : "one_hidden"},
                  {"hidden_units", cfg.model.hidden_units},
                  {"learning_rate", cfg.model.learning_rate},
                  {"batch_size", cfg.model.batch_size},
                  {"max_epochs", cfg.model.max_epochs},
                  {"plateau_patience", cfg.model.plateau_patience},
                  {"plateau_factor", cfg.model.plateau_factor},
                  {"lr_floor", cfg.model.lr_floor}};
    json harmonics = json::object();
    for (const auto& [order, amp] : cfg.synth.harmonics) harmonics[std::to_string(order)] = amp;
    json fault_counts = json::object();
    for (const auto& [fault, count] : cfg.synth.fault_counts)
        fault_counts[to_string(fault)] = count;
    j["synth"] = {{"duration_s", cfg.synth.duration_s},
                  {"base_amplitude", cfg.synth.base_amplitude},
                  {"harmonics", harmonics},
                  {"noise_std", cfg.synth.noise_std},
                  {"fault_amplitude", cfg.synth.fault_amplitude},
                  {"healthy_count", cfg.synth.healthy_count},
                  {"fault_counts", fault_counts}};
    j["paths"] = {{"out_dir", cfg.paths.out_dir},
                  {"input_dir", cfg.paths.input_dir},
                  {"model_path", cfg.paths.model_path}};
    return indent >= 0 ? j.dump(indent) : j.dump();
}

}  // namespace sgda
