#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <memory>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "fshar/data.hpp"
#include "fshar/errors.hpp"
#include "fshar/ngd.hpp"
#include "fshar/relevance.hpp"
#include "fshar/transfer.hpp"

namespace fshar {

enum class Method {
    kRandInit,
    kFetrSoftmax,
    kFetrNn,
    kImprint,
    kFsharCos,
    kFsharSr,
    kFsharNgd,
};

enum class Normalization { kNone, kSoft, kHard };

inline Method method_from_string(const std::string& s) {
    if (s == "randinit") return Method::kRandInit;
    if (s == "fetr_softmax") return Method::kFetrSoftmax;
    if (s == "fetr_nn") return Method::kFetrNn;
    if (s == "imprint") return Method::kImprint;
    if (s == "fshar_cos") return Method::kFsharCos;
    if (s == "fshar_sr") return Method::kFsharSr;
    if (s == "fshar_ngd") return Method::kFsharNgd;
    throw InvalidConfigError("unknown method '" + s + "'");
}

inline std::string method_id(Method m) {
    switch (m) {
        case Method::kRandInit: return "randinit";
        case Method::kFetrSoftmax: return "fetr_softmax";
        case Method::kFetrNn: return "fetr_nn";
        case Method::kImprint: return "imprint";
        case Method::kFsharCos: return "fshar_cos";
        case Method::kFsharSr: return "fshar_sr";
        case Method::kFsharNgd: return "fshar_ngd";
    }
    return "?";
}

inline bool is_fshar(Method m) {
    return m == Method::kFsharCos || m == Method::kFsharSr || m == Method::kFsharNgd;
}

inline std::string normalization_id(Normalization n) {
    switch (n) {
        case Normalization::kNone: return "none";
        case Normalization::kSoft: return "soft";
        case Normalization::kHard: return "hard";
    }
    return "?";
}

// One benchmarked variant: a method plus, for FSHAR methods, a normalization.
struct MethodSpec {
    Method method = Method::kRandInit;
    Normalization norm = Normalization::kNone;

    std::string key() const { return method_id(method) + "/" + normalization_id(norm); }
};

// How the experiment obtains its windowed batch.
struct DataConfig {
    std::string kind = "synthetic";  // synthetic | recording | batch_cache

    // synthetic
    std::size_t classes = 0;
    std::size_t per_class = 0;
    std::size_t timesteps = 0;
    std::size_t channels = 0;
    double noise_sd = 0.0;
    std::uint64_t seed = 0;

    // recording
    std::vector<std::string> paths;
    std::string schema_path;
    double window_seconds = 1.0;
    double overlap = 0.5;
    std::size_t balance_per_class = 0;  // 0 = no balancing
    std::uint64_t balance_seed = 0;

    // batch_cache
    std::string cache_path;
};

struct ExperimentConfig {
    DataConfig data;
    SplitSpec split;
    bool standardize = true;

    std::vector<MethodSpec> methods;
    std::vector<std::size_t> shots{1, 5};
    std::size_t repetitions = 20;

    NetworkShape network{0, 64, 64, 64, 0};  // channels/classes filled from data
    std::size_t source_epochs = 100;
    std::size_t finetune_epochs = 50;
    TrainConfig base_train;  // lr, betas, clipping, batching

    double lambda = 1e-2;
    double solver_tol = 1e-6;
    std::size_t solver_max_iter = 1000;
    bool imprint_normalize = false;

    std::string hit_table_path;
    std::uint64_t base_seed = 42;
    std::size_t threads = 0;  // 0 = hardware concurrency

    std::string out_path = "results.csv";
    std::string format = "csv";  // csv | json

    void validate() const {
        if (repetitions < 1) throw InvalidConfigError("config: repetitions must be >= 1");
        if (methods.empty()) throw InvalidConfigError("config: no methods configured");
        if (shots.empty()) throw InvalidConfigError("config: no shot counts configured");
        for (std::size_t s : shots) {
            if (s < 1) throw InvalidConfigError("config: shots must be >= 1");
        }
        if (format != "csv" && format != "json")
            throw InvalidConfigError("config: format must be csv or json");
        for (const MethodSpec& spec : methods) {
            if (spec.method == Method::kFsharSr && lambda <= 0.0)
                throw InvalidConfigError("config: fshar_sr requires lambda > 0");
            if (spec.method == Method::kFsharNgd && hit_table_path.empty())
                throw InvalidConfigError("config: fshar_ngd requires a hit_table path");
        }
    }

    static ExperimentConfig from_json(const nlohmann::json& j);
    static ExperimentConfig from_file(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw IoError("config: cannot open " + path);
        nlohmann::json j;
        try {
            in >> j;
        } catch (const nlohmann::json::exception& e) {
            throw ParseError("config " + path + ": " + e.what());
        }
        return from_json(j);
    }
};

inline ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& j) {
    ExperimentConfig cfg;
    const nlohmann::json& d = j.at("data");
    cfg.data.kind = d.value("kind", "synthetic");
    if (cfg.data.kind == "synthetic") {
        cfg.data.classes = d.at("classes").get<std::size_t>();
        cfg.data.per_class = d.at("per_class").get<std::size_t>();
        cfg.data.timesteps = d.at("timesteps").get<std::size_t>();
        cfg.data.channels = d.at("channels").get<std::size_t>();
        cfg.data.noise_sd = d.value("noise_sd", 0.0);
        cfg.data.seed = d.value("seed", 0ULL);
    } else if (cfg.data.kind == "recording") {
        cfg.data.paths = d.at("paths").get<std::vector<std::string>>();
        cfg.data.schema_path = d.at("schema").get<std::string>();
        cfg.data.window_seconds = d.value("window_seconds", 1.0);
        cfg.data.overlap = d.value("overlap", 0.5);
        cfg.data.balance_per_class = d.value("balance_per_class", 0ULL);
        cfg.data.balance_seed = d.value("balance_seed", 0ULL);
    } else if (cfg.data.kind == "batch_cache") {
        cfg.data.cache_path = d.at("path").get<std::string>();
    } else {
        throw InvalidConfigError("config: unknown data kind '" + cfg.data.kind + "'");
    }

    if (j.contains("split")) {
        cfg.split = SplitSpec::from_json(j.at("split"));
    } else if (cfg.data.kind == "synthetic" && j.contains("source_class_count")) {
        const auto c_src = j.at("source_class_count").get<std::size_t>();
        for (std::size_t c = 0; c < cfg.data.classes; ++c)
            (c < c_src ? cfg.split.source_classes : cfg.split.target_classes)
                .push_back(static_cast<int>(c));
    } else {
        throw InvalidConfigError("config: missing split");
    }
    cfg.standardize = j.value("standardize", true);

    std::vector<Normalization> norms;
    for (const std::string& n : j.value("normalizations", std::vector<std::string>{"soft"})) {
        if (n == "soft")
            norms.push_back(Normalization::kSoft);
        else if (n == "hard")
            norms.push_back(Normalization::kHard);
        else
            throw InvalidConfigError("config: unknown normalization '" + n + "'");
    }
    for (const std::string& m : j.at("methods").get<std::vector<std::string>>()) {
        const Method method = method_from_string(m);
        if (is_fshar(method)) {
            for (Normalization n : norms) cfg.methods.push_back({method, n});
        } else {
            cfg.methods.push_back({method, Normalization::kNone});
        }
    }

    if (j.contains("shots")) cfg.shots = j.at("shots").get<std::vector<std::size_t>>();
    cfg.repetitions = j.value("repetitions", 20ULL);

    if (j.contains("network")) {
        const nlohmann::json& n = j.at("network");
        cfg.network.lstm_hidden = n.value("lstm_hidden", 64ULL);
        cfg.network.fc1_size = n.value("fc1_size", cfg.network.lstm_hidden);
        cfg.network.embed_dim = n.value("embed_dim", cfg.network.fc1_size);
    }
    if (j.contains("training")) {
        const nlohmann::json& t = j.at("training");
        cfg.source_epochs = t.value("source_epochs", 100ULL);
        cfg.finetune_epochs = t.value("finetune_epochs", 50ULL);
        cfg.base_train.adam.lr = t.value("lr", 1e-3);
        cfg.base_train.adam.beta1 = t.value("beta1", 0.9);
        cfg.base_train.adam.beta2 = t.value("beta2", 0.999);
        cfg.base_train.adam.eps = t.value("eps", 1e-8);
        cfg.base_train.clip_norm = t.value("clip_norm", 5.0);
        cfg.base_train.full_batch_limit = t.value("full_batch_limit", 256ULL);
        cfg.base_train.minibatch = t.value("minibatch", 64ULL);
    }
    cfg.lambda = j.value("lambda", 1e-2);
    if (j.contains("solver")) {
        cfg.solver_tol = j.at("solver").value("tol", 1e-6);
        cfg.solver_max_iter = j.at("solver").value("max_iter", 1000ULL);
    }
    cfg.imprint_normalize = j.value("imprint_normalize", false);
    cfg.hit_table_path = j.value("hit_table", std::string{});
    cfg.base_seed = j.value("base_seed", 42ULL);
    cfg.threads = j.value("threads", 0ULL);
    cfg.out_path = j.value("out", std::string{"results.csv"});
    cfg.format = j.value("format", std::string{"csv"});
    cfg.validate();
    return cfg;
}

struct RepetitionResult {
    std::size_t repetition = 0;
    double accuracy_pct = 0.0;       // after fine-tuning (or the only stage)
    double accuracy_init_pct = 0.0;  // before fine-tuning

    bool operator==(const RepetitionResult&) const = default;
};

struct ResultEntry {
    std::string method;
    std::string normalization;
    std::size_t shots = 0;
    std::vector<RepetitionResult> reps;
    double mean_acc = 0.0;
    double sd_acc = 0.0;

    bool operator==(const ResultEntry&) const = default;
};

struct ResultTable {
    std::vector<ResultEntry> entries;
    std::vector<std::string> failures;

    const ResultEntry* find(const std::string& method, const std::string& normalization,
                            std::size_t shots) const {
        for (const ResultEntry& e : entries) {
            if (e.method == method && e.normalization == normalization && e.shots == shots)
                return &e;
        }
        return nullptr;
    }

    bool operator==(const ResultTable&) const = default;
};

// Arithmetic mean and sample standard deviation (zero for a single value).
inline std::pair<double, double> aggregate(const std::vector<double>& values) {
    if (values.empty()) throw InvalidInputError("aggregate: empty sample");
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(values.size());
    if (values.size() == 1) return {mean, 0.0};
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    return {mean, std::sqrt(ss / static_cast<double>(values.size() - 1))};
}

namespace detail {

inline std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (char c : s) {
        h ^= static_cast<unsigned char>(c);
        h *= 1099511628211ULL;
    }
    return h;
}

// Everything fixed across repetitions: the trained source model, its
// embeddings and labels, and any episode-independent transfer weights.
struct ExperimentContext {
    const ExperimentConfig* cfg = nullptr;
    SourceModel source;
    Matrix source_emb;
    std::vector<int> source_labels;
    std::size_t c_trg = 0;
    // transfer weights for fshar_ngd, per normalization (episode-independent)
    std::optional<Matrix> ngd_soft;
    std::optional<Matrix> ngd_hard;
};

inline TrainConfig finetune_config(const ExperimentConfig& cfg) {
    TrainConfig t = cfg.base_train;
    t.epochs = cfg.finetune_epochs;
    return t;
}

// Run one method variant on one episode; returns (init, final) accuracies.
inline RepetitionResult run_method(const ExperimentContext& ctx, const MethodSpec& spec,
                                   const Episode& ep, std::uint64_t episode_seed,
                                   std::size_t repetition) {
    const ExperimentConfig& cfg = *ctx.cfg;
    const std::uint64_t method_seed = mix_seed(episode_seed, fnv1a(spec.key()));
    const TrainConfig ft = finetune_config(cfg);

    RepetitionResult res;
    res.repetition = repetition;

    if (spec.method == Method::kFetrNn) {
        const std::vector<int> pred = nn_classify(ctx.source, ep.train, ep.test);
        std::size_t hits = 0;
        for (std::size_t i = 0; i < ep.test.n; ++i) {
            if (pred[i] == ep.test.labels[i]) ++hits;
        }
        res.accuracy_pct = 100.0 * static_cast<double>(hits) / static_cast<double>(ep.test.n);
        res.accuracy_init_pct = res.accuracy_pct;  // no fine-tuning stage
        return res;
    }

    TargetInit init;
    init.method = spec.key();
    switch (spec.method) {
        case Method::kRandInit: {
            NetworkShape shape = ctx.source.params.shape();
            shape.num_classes = ctx.c_trg;
            init.params = init_params(shape, method_seed);
            break;
        }
        case Method::kFetrSoftmax:
            init = fetr_softmax_init(ctx.source, ctx.c_trg, method_seed);
            break;
        case Method::kImprint:
            init = imprint_weights(ctx.source, ep.train, cfg.imprint_normalize);
            break;
        case Method::kFsharCos:
        case Method::kFsharSr: {
            const Matrix trg_emb = feature_extract(ctx.source.params, ep.train);
            Matrix sample_rel;
            if (spec.method == Method::kFsharCos) {
                sample_rel = cosine_relevance(ctx.source_emb, trg_emb);
            } else {
                const SparseSolveResult solve = sparse_reconstruction(
                    ctx.source_emb, trg_emb, cfg.lambda, cfg.solver_tol, cfg.solver_max_iter);
                sample_rel = sparse_relevance(solve.a);
            }
            const Matrix o = aggregate_classwise(sample_rel, ctx.source_labels, ep.train.labels);
            const Matrix w = spec.norm == Normalization::kHard ? normalize_hard(o)
                                                               : normalize_soft(o);
            init = init_target(ctx.source, w);
            break;
        }
        case Method::kFsharNgd: {
            const Matrix& w = spec.norm == Normalization::kHard ? *ctx.ngd_hard : *ctx.ngd_soft;
            init = init_target(ctx.source, w);
            break;
        }
        default:
            throw InvalidConfigError("run_method: unhandled method");
    }

    res.accuracy_init_pct = accuracy_pct(init.params, ep.test);
    const NetworkParams tuned = fine_tune(init, ep.train, ft, mix_seed(method_seed, 1));
    res.accuracy_pct = accuracy_pct(tuned, ep.test);
    return res;
}

inline DomainSplit load_experiment_data(const ExperimentConfig& cfg) {
    SequenceBatch batch;
    if (cfg.data.kind == "synthetic") {
        batch = synth_generate(cfg.data.classes, cfg.data.per_class, cfg.data.timesteps,
                               cfg.data.channels, cfg.data.noise_sd, cfg.data.seed);
    } else if (cfg.data.kind == "recording") {
        const RecordingSchema schema = RecordingSchema::from_file(cfg.data.schema_path);
        bool first = true;
        for (const std::string& path : cfg.data.paths) {
            const RawRecording rec = load_recording(path, schema);
            const SequenceBatch windows =
                sliding_window(rec, cfg.data.window_seconds, cfg.data.overlap);
            if (first) {
                batch = windows;
                first = false;
                continue;
            }
            if (windows.T != batch.T || windows.C != batch.C)
                throw InvalidConfigError("recordings disagree on window shape");
            batch.values.insert(batch.values.end(), windows.values.begin(),
                                windows.values.end());
            batch.labels.insert(batch.labels.end(), windows.labels.begin(),
                                windows.labels.end());
            batch.n += windows.n;
        }
        // classes outside the split (e.g. a null class) are dropped first
        std::vector<int> keep = cfg.split.source_classes;
        keep.insert(keep.end(), cfg.split.target_classes.begin(),
                    cfg.split.target_classes.end());
        batch = restrict_to_classes(batch, keep);
        if (cfg.data.balance_per_class > 0)
            batch = balance_classes(batch, cfg.data.balance_per_class, cfg.data.balance_seed);
    } else {
        batch = load_batch(cfg.data.cache_path);
    }
    return split_domains(batch, cfg.split);
}

}  // namespace detail

// Execute the full benchmark: train the source model once, then for every
// (shots, repetition) sample one episode and run every configured method on
// it. Repetitions are independent and run on a small worker pool; results
// are deterministic for a given config and seed regardless of thread count.
inline ResultTable run_experiment(const ExperimentConfig& cfg,
                                  std::ostream* progress = nullptr) {
    cfg.validate();
    DomainSplit split = detail::load_experiment_data(cfg);
    if (cfg.standardize) {
        // statistics from source-domain data only; target stays unleaked
        const ChannelStats stats = channel_stats(split.source);
        standardize(split.source, stats);
        standardize(split.target_pool, stats);
    }

    detail::ExperimentContext ctx;
    ctx.cfg = &cfg;
    ctx.c_trg = split.target_pool.num_classes();

    TrainConfig source_cfg = cfg.base_train;
    source_cfg.epochs = cfg.source_epochs;
    NetworkShape shape = cfg.network;
    shape.input_channels = split.source.C;
    if (progress) *progress << "training source model on " << split.source.n << " samples\n";
    ctx.source = train_source(split.source, shape, source_cfg, cfg.base_seed);
    if (progress)
        *progress << "source loss " << ctx.source.initial_loss << " -> "
                  << ctx.source.final_loss << "\n";

    bool need_embeddings = false, need_ngd = false;
    for (const MethodSpec& spec : cfg.methods) {
        need_embeddings |= spec.method == Method::kFsharCos || spec.method == Method::kFsharSr;
        need_ngd |= spec.method == Method::kFsharNgd;
    }
    if (need_embeddings) {
        ctx.source_emb = feature_extract(ctx.source.params, split.source);
        ctx.source_labels = split.source.labels;
    }

    // An unusable hit table disables the NGD variants only; everything else
    // still runs.
    std::vector<MethodSpec> methods = cfg.methods;
    std::vector<std::string> failures;
    if (need_ngd) {
        try {
            const HitCountTable table = HitCountTable::from_file(cfg.hit_table_path);
            const Matrix o = ngd_class_relevance(split.source_terms(cfg.split),
                                                 split.target_terms(cfg.split), table);
            ctx.ngd_soft = normalize_soft(o);
            ctx.ngd_hard = normalize_hard(o);
        } catch (const Error& e) {
            failures.push_back(std::string("fshar_ngd: ") + e.what());
            methods.erase(std::remove_if(methods.begin(), methods.end(),
                                         [](const MethodSpec& s) {
                                             return s.method == Method::kFsharNgd;
                                         }),
                          methods.end());
        }
    }
    if (methods.empty()) {
        ResultTable table;
        table.failures = std::move(failures);
        return table;
    }

    // slots[shot][method][rep]
    const std::size_t n_shots = cfg.shots.size();
    const std::size_t n_methods = methods.size();
    std::vector<std::optional<RepetitionResult>> slots(n_shots * n_methods * cfg.repetitions);
    std::mutex failures_mutex;

    const std::size_t n_tasks = n_shots * cfg.repetitions;
    std::size_t n_threads = cfg.threads > 0 ? cfg.threads : std::thread::hardware_concurrency();
    n_threads = std::max<std::size_t>(1, std::min(n_threads, n_tasks));

    std::atomic<std::size_t> next_task{0};
    auto worker = [&] {
        while (true) {
            const std::size_t task = next_task.fetch_add(1);
            if (task >= n_tasks) return;
            const std::size_t shot_idx = task / cfg.repetitions;
            const std::size_t rep = task % cfg.repetitions;
            const std::size_t k = cfg.shots[shot_idx];
            const std::uint64_t episode_seed =
                mix_seed(mix_seed(cfg.base_seed, k), rep);

            Episode ep;
            try {
                ep = sample_episode(split.target_pool, k, episode_seed);
            } catch (const Error& e) {
                std::lock_guard<std::mutex> lock(failures_mutex);
                failures.push_back("episode shots=" + std::to_string(k) +
                                   " rep=" + std::to_string(rep) + ": " + e.what());
                continue;
            }
            for (std::size_t mi = 0; mi < n_methods; ++mi) {
                try {
                    slots[(shot_idx * n_methods + mi) * cfg.repetitions + rep] =
                        detail::run_method(ctx, methods[mi], ep, episode_seed, rep);
                } catch (const Error& e) {
                    std::lock_guard<std::mutex> lock(failures_mutex);
                    failures.push_back(methods[mi].key() + " shots=" + std::to_string(k) +
                                       " rep=" + std::to_string(rep) + ": " + e.what());
                }
            }
        }
    };
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();

    ResultTable table;
    // deterministic order: methods as configured, then shots, then repetition
    for (std::size_t mi = 0; mi < n_methods; ++mi) {
        for (std::size_t shot_idx = 0; shot_idx < n_shots; ++shot_idx) {
            ResultEntry entry;
            entry.method = method_id(methods[mi].method);
            entry.normalization = normalization_id(methods[mi].norm);
            entry.shots = cfg.shots[shot_idx];
            std::vector<double> accs;
            for (std::size_t rep = 0; rep < cfg.repetitions; ++rep) {
                const auto& slot =
                    slots[(shot_idx * n_methods + mi) * cfg.repetitions + rep];
                if (!slot) continue;
                entry.reps.push_back(*slot);
                accs.push_back(slot->accuracy_pct);
            }
            if (entry.reps.empty()) continue;  // fully failed; recorded in failures
            const auto [mean, sd] = aggregate(accs);
            entry.mean_acc = mean;
            entry.sd_acc = sd;
            table.entries.push_back(std::move(entry));
        }
    }
    std::sort(failures.begin(), failures.end());
    table.failures = std::move(failures);
    return table;
}

namespace detail {

inline std::string format_acc(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return buf;
}

}  // namespace detail

inline std::string to_csv(const ResultTable& table) {
    std::string out = "method,normalization,shots,mean_acc,sd_acc,n_reps\n";
    for (const ResultEntry& e : table.entries) {
        out += e.method + "," + e.normalization + "," + std::to_string(e.shots) + "," +
               detail::format_acc(e.mean_acc) + "," + detail::format_acc(e.sd_acc) + "," +
               std::to_string(e.reps.size()) + "\n";
    }
    return out;
}

inline nlohmann::json to_json(const ResultTable& table) {
    nlohmann::json entries = nlohmann::json::array();
    for (const ResultEntry& e : table.entries) {
        nlohmann::json reps = nlohmann::json::array();
        for (const RepetitionResult& r : e.reps)
            reps.push_back({{"repetition", r.repetition},
                            {"accuracy", r.accuracy_pct},
                            {"accuracy_init", r.accuracy_init_pct}});
        entries.push_back({{"method", e.method},
                           {"normalization", e.normalization},
                           {"shots", e.shots},
                           {"mean_acc", e.mean_acc},
                           {"sd_acc", e.sd_acc},
                           {"reps", std::move(reps)}});
    }
    return nlohmann::json{{"entries", std::move(entries)}, {"failures", table.failures}};
}

inline ResultTable result_table_from_json(const nlohmann::json& j) {
    ResultTable table;
    for (const nlohmann::json& e : j.at("entries")) {
        ResultEntry entry;
        entry.method = e.at("method").get<std::string>();
        entry.normalization = e.at("normalization").get<std::string>();
        entry.shots = e.at("shots").get<std::size_t>();
        entry.mean_acc = e.at("mean_acc").get<double>();
        entry.sd_acc = e.at("sd_acc").get<double>();
        for (const nlohmann::json& r : e.at("reps"))
            entry.reps.push_back({r.at("repetition").get<std::size_t>(),
                                  r.at("accuracy").get<double>(),
                                  r.at("accuracy_init").get<double>()});
        table.entries.push_back(std::move(entry));
    }
    table.failures = j.at("failures").get<std::vector<std::string>>();
    return table;
}

// Write the table as CSV (summary rows) or JSON (full per-repetition
// detail). Identical tables produce identical bytes.
inline void emit_report(const ResultTable& table, const std::string& format,
                        const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("emit_report: cannot open " + path);
    if (format == "csv") {
        out << to_csv(table);
    } else if (format == "json") {
        out << to_json(table).dump(2) << "\n";
    } else {
        throw InvalidConfigError("emit_report: unknown format '" + format + "'");
    }
    if (!out) throw IoError("emit_report: write failed for " + path);
}

}  // namespace fshar
