#include "sgda/model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>

#include "json.hpp"
#include "sgda/errors.hpp"
#include "sgda/rng.hpp"

namespace sgda {

namespace {

// Flat parameter layout:
//   Logistic:  W (out x D), b (out)
//   OneHidden: W1 (H x D), b1 (H), W2 (out x H), b2 (out)
struct Layout {
    std::size_t d = 0, h = 0, out = 0;
    std::size_t w1 = 0, b1 = 0, w2 = 0, b2 = 0, total = 0;  // offsets

    explicit Layout(const ModelConfig& cfg) {
        d = cfg.input_dim;
        out = cfg.output_dim();
        if (cfg.kind == ModelKind::Logistic) {
            w1 = 0;
            b1 = out * d;
            total = b1 + out;
        } else {
            h = cfg.hidden_units;
            w1 = 0;
            b1 = h * d;
            w2 = b1 + h;
            b2 = w2 + out * h;
            total = b2 + out;
        }
    }
};

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

// Forward pass; fills `probs` (size = |classes|) and returns intermediate
// activations needed for the backward pass.
struct ForwardState {
    std::vector<double> hidden;  // post-ReLU, OneHidden only
    std::vector<double> logits;  // size out
    std::vector<double> probs;   // size |classes|
};

void forward(const ModelConfig& cfg, const Layout& ly, const std::vector<double>& p,
             const double* x, ForwardState& st) {
    if (cfg.kind == ModelKind::OneHidden) {
        st.hidden.assign(ly.h, 0.0);
        for (std::size_t i = 0; i < ly.h; ++i) {
            double acc = p[ly.b1 + i];
            const double* row = p.data() + ly.w1 + i * ly.d;
            for (std::size_t j = 0; j < ly.d; ++j) acc += row[j] * x[j];
            st.hidden[i] = acc > 0.0 ? acc : 0.0;
        }
        st.logits.assign(ly.out, 0.0);
        for (std::size_t i = 0; i < ly.out; ++i) {
            double acc = p[ly.b2 + i];
            const double* row = p.data() + ly.w2 + i * ly.h;
            for (std::size_t j = 0; j < ly.h; ++j) acc += row[j] * st.hidden[j];
            st.logits[i] = acc;
        }
    } else {
        st.logits.assign(ly.out, 0.0);
        for (std::size_t i = 0; i < ly.out; ++i) {
            double acc = p[ly.b1 + i];
            const double* row = p.data() + ly.w1 + i * ly.d;
            for (std::size_t j = 0; j < ly.d; ++j) acc += row[j] * x[j];
            st.logits[i] = acc;
        }
    }

    const std::size_t c = cfg.classes.size();
    st.probs.assign(c, 0.0);
    if (ly.out == 1) {
        const double pr = sigmoid(st.logits[0]);
        st.probs[0] = 1.0 - pr;
        st.probs[1] = pr;
    } else {
        const double zmax = *std::max_element(st.logits.begin(), st.logits.end());
        double denom = 0.0;
        for (std::size_t i = 0; i < c; ++i) {
            st.probs[i] = std::exp(st.logits[i] - zmax);
            denom += st.probs[i];
        }
        for (double& v : st.probs) v /= denom;
    }
}

// Cross-entropy of one sample given its forward state.
double sample_loss(const ForwardState& st, std::size_t label_index) {
    const double p = std::max(st.probs[label_index], 1e-300);
    return -std::log(p);
}

// Accumulates d(loss)/d(params) for one sample into `grad` with weight
// `scale` (1/batch). dLogits for both heads reduces to (prob - onehot).
void backward(const ModelConfig& cfg, const Layout& ly, const std::vector<double>& p,
              const double* x, const ForwardState& st, std::size_t label_index, double scale,
              std::vector<double>& grad) {
    std::vector<double> dlogits(ly.out, 0.0);
    if (ly.out == 1) {
        dlogits[0] = (st.probs[1] - (label_index == 1 ? 1.0 : 0.0)) * scale;
    } else {
        for (std::size_t i = 0; i < ly.out; ++i)
            dlogits[i] = (st.probs[i] - (i == label_index ? 1.0 : 0.0)) * scale;
    }

    if (cfg.kind == ModelKind::Logistic) {
        for (std::size_t i = 0; i < ly.out; ++i) {
            double* grow = grad.data() + ly.w1 + i * ly.d;
            for (std::size_t j = 0; j < ly.d; ++j) grow[j] += dlogits[i] * x[j];
            grad[ly.b1 + i] += dlogits[i];
        }
        return;
    }

    std::vector<double> dhidden(ly.h, 0.0);
    for (std::size_t i = 0; i < ly.out; ++i) {
        double* grow = grad.data() + ly.w2 + i * ly.h;
        const double* row = p.data() + ly.w2 + i * ly.h;
        for (std::size_t j = 0; j < ly.h; ++j) {
            grow[j] += dlogits[i] * st.hidden[j];
            dhidden[j] += dlogits[i] * row[j];
        }
        grad[ly.b2 + i] += dlogits[i];
    }
    for (std::size_t j = 0; j < ly.h; ++j)
        if (st.hidden[j] <= 0.0) dhidden[j] = 0.0;  // ReLU gate
    for (std::size_t i = 0; i < ly.h; ++i) {
        if (dhidden[i] == 0.0) continue;
        double* grow = grad.data() + ly.w1 + i * ly.d;
        for (std::size_t j = 0; j < ly.d; ++j) grow[j] += dhidden[i] * x[j];
        grad[ly.b1 + i] += dhidden[i];
    }
}

std::vector<double> init_params(const ModelConfig& cfg, const Layout& ly) {
    std::vector<double> p(ly.total, 0.0);
    Philox rng(derive_seed(cfg.seed, "model-init"));
    const auto fill_uniform = [&](std::size_t offset, std::size_t count, std::size_t fan_in) {
        const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
        for (std::size_t i = 0; i < count; ++i) p[offset + i] = rng.uniform(-bound, bound);
    };
    if (cfg.kind == ModelKind::Logistic) {
        fill_uniform(ly.w1, ly.out * ly.d, ly.d);
    } else {
        fill_uniform(ly.w1, ly.h * ly.d, ly.d);
        fill_uniform(ly.w2, ly.out * ly.h, ly.h);
    }
    return p;  // biases stay zero
}

std::size_t label_index_of(const ModelConfig& cfg, ClassLabel label) {
    for (std::size_t i = 0; i < cfg.classes.size(); ++i)
        if (cfg.classes[i] == label) return i;
    throw DataError(std::string("label not in model class order: ") + to_string(label));
}

const char* kind_name(ModelKind k) {
    return k == ModelKind::Logistic ? "logistic" : "one_hidden";
}

ModelKind kind_from_string(const std::string& s) {
    if (s == "logistic") return ModelKind::Logistic;
    if (s == "one_hidden") return ModelKind::OneHidden;
    throw ConfigError("model.kind: expected 'logistic' or 'one_hidden', got '" + s + "'");
}

}  // namespace

Metrics compute_metrics(const std::vector<std::size_t>& truth,
                        const std::vector<std::size_t>& predicted, std::size_t c) {
    Metrics m;
    std::vector<std::vector<std::size_t>> counts(c, std::vector<std::size_t>(c, 0));
    std::size_t correct = 0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        counts[truth[i]][predicted[i]]++;
        if (truth[i] == predicted[i]) ++correct;
    }
    m.accuracy = static_cast<double>(correct) / static_cast<double>(truth.size());

    m.precision.assign(c, 0.0);
    m.recall.assign(c, 0.0);
    m.f1.assign(c, 0.0);
    m.support.assign(c, 0);
    m.confusion.assign(c, std::vector<double>(c, 0.0));
    for (std::size_t k = 0; k < c; ++k) {
        std::size_t tp = counts[k][k], fp = 0, fn = 0;
        for (std::size_t j = 0; j < c; ++j) {
            if (j == k) continue;
            fp += counts[j][k];
            fn += counts[k][j];
        }
        m.support[k] = tp + fn;
        m.precision[k] = (tp + fp) ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 0.0;
        m.recall[k] = (tp + fn) ? static_cast<double>(tp) / static_cast<double>(tp + fn) : 0.0;
        m.f1[k] = (m.precision[k] + m.recall[k] > 0.0)
                      ? 2.0 * m.precision[k] * m.recall[k] / (m.precision[k] + m.recall[k])
                      : 0.0;
        if (m.support[k] > 0) {
            for (std::size_t j = 0; j < c; ++j)
                m.confusion[k][j] =
                    static_cast<double>(counts[k][j]) / static_cast<double>(m.support[k]);
        }
    }
    m.macro_f1 = std::accumulate(m.f1.begin(), m.f1.end(), 0.0) / static_cast<double>(c);
    return m;
}

void ModelConfig::validate() const {
    if (input_dim == 0) throw ConfigError("model.input_dim: must be > 0");
    if (classes.size() < 2) throw ConfigError("model.classes: need at least 2 classes");
    if (classes[0] != ClassLabel::Normal)
        throw ConfigError("model.classes: Normal must be at index 0");
    for (std::size_t i = 0; i < classes.size(); ++i)
        for (std::size_t j = i + 1; j < classes.size(); ++j)
            if (classes[i] == classes[j]) throw ConfigError("model.classes: duplicate label");
    if (kind == ModelKind::OneHidden && hidden_units == 0)
        throw ConfigError("model.hidden_units: must be > 0");
    if (!(learning_rate > 0.0)) throw ConfigError("model.learning_rate: must be > 0");
    if (batch_size == 0) throw ConfigError("model.batch_size: must be > 0");
    if (plateau_patience == 0) throw ConfigError("model.plateau_patience: must be > 0");
    if (!(plateau_factor > 0.0 && plateau_factor < 1.0))
        throw ConfigError("model.plateau_factor: must lie in (0, 1)");
    if (!(lr_floor >= 0.0)) throw ConfigError("model.lr_floor: must be >= 0");
}

std::size_t ModelConfig::output_dim() const { return classes.size() == 2 ? 1 : classes.size(); }

std::size_t ModelConfig::param_count() const { return Layout(*this).total; }

TrainedModel train(const DatasetProvider& provider, const ModelConfig& cfg) {
    cfg.validate();
    const Layout ly(cfg);

    TrainedModel model;
    model.config = cfg;
    model.params = init_params(cfg, ly);
    if (cfg.max_epochs == 0) return model;

    std::vector<double> grad(ly.total, 0.0);
    std::vector<double> adam_m(ly.total, 0.0), adam_v(ly.total, 0.0);
    const double beta1 = 0.9, beta2 = 0.999, adam_eps = 1e-8;
    std::uint64_t adam_t = 0;

    double lr = cfg.learning_rate;
    double best_loss = std::numeric_limits<double>::infinity();
    unsigned stale_epochs = 0;

    ForwardState st;
    for (std::int64_t epoch = 0; epoch < static_cast<std::int64_t>(cfg.max_epochs); ++epoch) {
        const std::vector<LabeledSpectrum> data = provider(epoch);
        if (data.empty()) throw DataError("train: provider returned an empty dataset");

        const std::size_t n = data.size();
        std::vector<std::size_t> labels(n);
        std::map<std::string, std::size_t> class_counts;
        for (std::size_t i = 0; i < n; ++i) {
            const auto& s = data[i];
            if (s.spectrum.channel_count() != 1 || s.spectrum.bin_count() != cfg.input_dim)
                throw DataError("train: sample dimension does not match model.input_dim");
            labels[i] = label_index_of(cfg, s.label);
            class_counts[to_string(s.label)]++;
        }

        // deterministic shuffle
        std::vector<std::size_t> order(n);
        std::iota(order.begin(), order.end(), 0);
        Philox shuffle_rng(derive_seed(cfg.seed, "shuffle", static_cast<std::uint64_t>(epoch)));
        for (std::size_t i = n - 1; i > 0; --i) {
            const auto j = static_cast<std::size_t>(shuffle_rng.uniform() *
                                                    static_cast<double>(i + 1));
            std::swap(order[i], order[std::min(j, i)]);
        }

        double epoch_loss = 0.0;
        for (std::size_t start = 0; start < n; start += cfg.batch_size) {
            const std::size_t stop = std::min(n, start + cfg.batch_size);
            const double scale = 1.0 / static_cast<double>(stop - start);
            std::fill(grad.begin(), grad.end(), 0.0);
            double batch_loss = 0.0;
            for (std::size_t pos = start; pos < stop; ++pos) {
                const std::size_t i = order[pos];
                const double* x = data[i].spectrum.bins[0].data();
                forward(cfg, ly, model.params, x, st);
                batch_loss += sample_loss(st, labels[i]);
                backward(cfg, ly, model.params, x, st, labels[i], scale, grad);
            }
            epoch_loss += batch_loss;

            ++adam_t;
            const double bc1 = 1.0 - std::pow(beta1, static_cast<double>(adam_t));
            const double bc2 = 1.0 - std::pow(beta2, static_cast<double>(adam_t));
            for (std::size_t k = 0; k < ly.total; ++k) {
                adam_m[k] = beta1 * adam_m[k] + (1.0 - beta1) * grad[k];
                adam_v[k] = beta2 * adam_v[k] + (1.0 - beta2) * grad[k] * grad[k];
                model.params[k] -=
                    lr * (adam_m[k] / bc1) / (std::sqrt(adam_v[k] / bc2) + adam_eps);
            }
        }
        epoch_loss /= static_cast<double>(n);
        if (!std::isfinite(epoch_loss))
            throw DataError("train: non-finite loss at epoch " + std::to_string(epoch));

        // post-update macro-F1 on this epoch's dataset
        std::vector<std::size_t> predictions(n);
        for (std::size_t i = 0; i < n; ++i) {
            forward(cfg, ly, model.params, data[i].spectrum.bins[0].data(), st);
            std::size_t arg = 0;
            for (std::size_t k = 1; k < st.probs.size(); ++k)
                if (st.probs[k] > st.probs[arg]) arg = k;
            predictions[i] = arg;
        }
        const Metrics em = compute_metrics(labels, predictions, cfg.classes.size());

        model.train_log.push_back({epoch, epoch_loss, lr, em.macro_f1, class_counts});

        // ReduceLROnPlateau on the epoch training loss
        if (epoch_loss < best_loss - 1e-12) {
            best_loss = epoch_loss;
            stale_epochs = 0;
        } else if (++stale_epochs >= cfg.plateau_patience) {
            lr = std::max(lr * cfg.plateau_factor, cfg.lr_floor);
            stale_epochs = 0;
        }
    }
    return model;
}

Prediction predict(const TrainedModel& model, const Spectrum& spec) {
    if (spec.stage != SpectrumStage::Normalized && spec.stage != SpectrumStage::Augmented)
        throw DataError("predict: expected a Normalized or Augmented spectrum");
    if (spec.channel_count() != 1)
        throw DataError("predict: single-channel spectra only; split channels first");
    if (spec.bin_count() != model.config.input_dim)
        throw DataError("predict: spectrum has " + std::to_string(spec.bin_count()) +
                        " bins, model expects " + std::to_string(model.config.input_dim));

    const Layout ly(model.config);
    ForwardState st;
    forward(model.config, ly, model.params, spec.bins[0].data(), st);

    Prediction out;
    out.probabilities = st.probs;
    out.label_index = 0;
    for (std::size_t k = 1; k < st.probs.size(); ++k)
        if (st.probs[k] > st.probs[out.label_index]) out.label_index = k;  // ties keep lower index
    out.label = model.config.classes[out.label_index];
    return out;
}

Metrics evaluate(const TrainedModel& model, const std::vector<LabeledSpectrum>& data) {
    if (data.empty()) throw DataError("evaluate: empty dataset");
    const std::size_t c = model.config.classes.size();
    std::vector<std::size_t> truth(data.size()), predicted(data.size());
    for (std::size_t i = 0; i < data.size(); ++i) {
        truth[i] = label_index_of(model.config, data[i].label);
        predicted[i] = predict(model, data[i].spectrum).label_index;
    }
    return compute_metrics(truth, predicted, c);
}

GradientCheckReport gradient_check(const ModelConfig& cfg, std::size_t sample_count,
                                   double tolerance) {
    cfg.validate();
    if (sample_count == 0) throw ConfigError("gradient_check: sample_count must be >= 1");
    const Layout ly(cfg);
    const double step = 1e-5;

    GradientCheckReport report;
    report.sample_count = sample_count;

    ForwardState st;
    for (std::size_t s = 0; s < sample_count; ++s) {
        Philox rng(derive_seed(cfg.seed, "gradcheck", s));
        std::vector<double> params(ly.total);
        for (double& v : params) v = rng.uniform(-0.5, 0.5);
        std::vector<double> x(ly.d);
        for (double& v : x) v = rng.uniform();
        const auto label = static_cast<std::size_t>(
            rng.uniform() * static_cast<double>(cfg.classes.size()));
        const std::size_t y = std::min(label, cfg.classes.size() - 1);

        std::vector<double> analytic(ly.total, 0.0);
        forward(cfg, ly, params, x.data(), st);
        backward(cfg, ly, params, x.data(), st, y, 1.0, analytic);

        for (std::size_t k = 0; k < ly.total; ++k) {
            const double saved = params[k];
            params[k] = saved + step;
            forward(cfg, ly, params, x.data(), st);
            const double lp = sample_loss(st, y);
            params[k] = saved - step;
            forward(cfg, ly, params, x.data(), st);
            const double lm = sample_loss(st, y);
            params[k] = saved;
            const double numeric = (lp - lm) / (2.0 * step);
            const double denom = std::max({1.0, std::abs(analytic[k]), std::abs(numeric)});
            report.max_rel_error =
                std::max(report.max_rel_error, std::abs(analytic[k] - numeric) / denom);
            ++report.checked_params;
        }
    }
    report.pass = report.max_rel_error < tolerance;
    return report;
}

void save_model(const TrainedModel& model, const std::string& path) {
    nlohmann::json j;
    j["format"] = "sgda-model";
    j["version"] = 1;
    j["kind"] = kind_name(model.config.kind);
    j["hidden_units"] = model.config.hidden_units;
    j["input_dim"] = model.config.input_dim;
    std::vector<std::string> classes;
    for (ClassLabel l : model.config.classes) classes.emplace_back(to_string(l));
    j["classes"] = classes;
    j["learning_rate"] = model.config.learning_rate;
    j["batch_size"] = model.config.batch_size;
    j["max_epochs"] = model.config.max_epochs;
    j["plateau_patience"] = model.config.plateau_patience;
    j["plateau_factor"] = model.config.plateau_factor;
    j["lr_floor"] = model.config.lr_floor;
    j["seed"] = model.config.seed;
    j["normalization"] = {
        {"mode", model.normalization.mode == NormalizationMode::GlobalPerChannel ? "global"
                                                                                 : "per_segment"},
        {"min_db", model.normalization.min_db},
        {"max_db", model.normalization.max_db},
    };
    j["freq_hz"] = model.freq_hz;
    j["params"] = model.params;
    nlohmann::json log = nlohmann::json::array();
    for (const auto& e : model.train_log) {
        log.push_back({{"epoch", e.epoch},
                       {"loss", e.loss},
                       {"learning_rate", e.learning_rate},
                       {"macro_f1", e.macro_f1},
                       {"class_counts", e.class_counts}});
    }
    j["train_log"] = log;

    std::ofstream out(path);
    if (!out) throw DataError(path + ": cannot open file for writing");
    out << j.dump(2) << '\n';
    if (!out) throw DataError(path + ": write failed");
}

TrainedModel load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError(path + ": cannot open file");
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw DataError(path + ": bad model file: " + e.what());
    }
    if (j.value("format", "") != "sgda-model")
        throw DataError(path + ": not an sgda model file");

    TrainedModel model;
    model.config.kind = kind_from_string(j.at("kind").get<std::string>());
    model.config.hidden_units = j.at("hidden_units").get<unsigned>();
    model.config.input_dim = j.at("input_dim").get<std::size_t>();
    for (const auto& name : j.at("classes"))
        model.config.classes.push_back(class_label_from_string(name.get<std::string>()));
    model.config.learning_rate = j.at("learning_rate").get<double>();
    model.config.batch_size = j.at("batch_size").get<unsigned>();
    model.config.max_epochs = j.at("max_epochs").get<unsigned>();
    model.config.plateau_patience = j.at("plateau_patience").get<unsigned>();
    model.config.plateau_factor = j.at("plateau_factor").get<double>();
    model.config.lr_floor = j.at("lr_floor").get<double>();
    model.config.seed = j.at("seed").get<std::uint64_t>();
    const auto& norm = j.at("normalization");
    model.normalization.mode = norm.at("mode").get<std::string>() == "global"
                                   ? NormalizationMode::GlobalPerChannel
                                   : NormalizationMode::PerSegmentChannel;
    model.normalization.min_db = norm.at("min_db").get<std::vector<double>>();
    model.normalization.max_db = norm.at("max_db").get<std::vector<double>>();
    model.freq_hz = j.at("freq_hz").get<std::vector<double>>();
    model.params = j.at("params").get<std::vector<double>>();
    for (const auto& e : j.at("train_log")) {
        EpochLogEntry entry;
        entry.epoch = e.at("epoch").get<std::int64_t>();
        entry.loss = e.at("loss").get<double>();
        entry.learning_rate = e.at("learning_rate").get<double>();
        entry.macro_f1 = e.at("macro_f1").get<double>();
        entry.class_counts = e.at("class_counts").get<std::map<std::string, std::size_t>>();
        model.train_log.push_back(std::move(entry));
    }
    model.config.validate();
    if (model.params.size() != model.config.param_count())
        throw DataError(path + ": parameter count does not match the model configuration");
    return model;
}

}  // namespace sgda
