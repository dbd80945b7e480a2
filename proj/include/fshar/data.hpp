#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "fshar/batch.hpp"
#include "fshar/errors.hpp"

namespace fshar {

// Column layout of a delimited sensor log: one row per timestep.
struct RecordingSchema {
    char delimiter = ' ';
    std::size_t label_col = 0;
    std::vector<std::size_t> channel_cols;
    double sample_rate_hz = 0.0;

    void validate() const {
        if (channel_cols.empty())
            throw InvalidConfigError("schema: channel_cols must not be empty");
        if (sample_rate_hz <= 0.0)
            throw InvalidConfigError("schema: sample_rate_hz must be positive");
        for (std::size_t c : channel_cols) {
            if (c == label_col)
                throw InvalidConfigError("schema: label_col overlaps channel_cols");
        }
    }

    static RecordingSchema from_json(const nlohmann::json& j) {
        RecordingSchema s;
        const std::string delim = j.value("delimiter", " ");
        if (delim.size() != 1)
            throw InvalidConfigError("schema: delimiter must be a single character");
        s.delimiter = delim[0];
        s.label_col = j.at("label_col").get<std::size_t>();
        s.channel_cols = j.at("channel_cols").get<std::vector<std::size_t>>();
        s.sample_rate_hz = j.at("sample_rate_hz").get<double>();
        s.validate();
        return s;
    }

    static RecordingSchema from_file(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw IoError("schema: cannot open " + path);
        nlohmann::json j;
        try {
            in >> j;
        } catch (const nlohmann::json::exception& e) {
            throw ParseError("schema " + path + ": " + e.what());
        }
        return from_json(j);
    }
};

// Per-timestep sensor rows with class labels, before windowing.
struct RawRecording {
    std::size_t channels = 0;
    double sample_rate_hz = 0.0;
    std::vector<double> values;  // n_rows x channels, row-major
    std::vector<int> labels;     // one per row
    std::size_t dropped_rows = 0;

    std::size_t rows() const { return labels.size(); }
    double value(std::size_t r, std::size_t c) const { return values[r * channels + c]; }
};

// Parse a delimited log. Rows with non-finite channel values or labels are
// dropped and counted; structurally malformed rows abort with a line number.
inline RawRecording load_recording(const std::string& path, const RecordingSchema& schema) {
    schema.validate();
    std::ifstream in(path);
    if (!in) throw IoError("load_recording: cannot open " + path);

    RawRecording rec;
    rec.channels = schema.channel_cols.size();
    rec.sample_rate_hz = schema.sample_rate_hz;

    const std::size_t max_col =
        std::max(schema.label_col,
                 *std::max_element(schema.channel_cols.begin(), schema.channel_cols.end()));

    std::string line;
    std::size_t line_no = 0;
    std::size_t expected_width = 0;
    std::vector<std::string> fields;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        if (!line.empty() && line.back() == '\r') line.pop_back();

        fields.clear();
        std::size_t start = 0;
        while (true) {
            const std::size_t pos = line.find(schema.delimiter, start);
            fields.push_back(line.substr(start, pos - start));
            if (pos == std::string::npos) break;
            start = pos + 1;
        }

        if (expected_width == 0) {
            expected_width = fields.size();
            if (max_col >= expected_width)
                throw InvalidConfigError("schema: column index " + std::to_string(max_col) +
                                         " out of bounds for rows of width " +
                                         std::to_string(expected_width));
        } else if (fields.size() != expected_width) {
            throw ParseError(path + ":" + std::to_string(line_no) + ": expected " +
                             std::to_string(expected_width) + " fields, got " +
                             std::to_string(fields.size()));
        }

        auto parse_field = [&](std::size_t col) {
            const std::string& f = fields[col];
            char* end = nullptr;
            const double v = std::strtod(f.c_str(), &end);
            if (end == f.c_str() || *end != '\0')
                throw ParseError(path + ":" + std::to_string(line_no) + ": cannot parse '" + f +
                                 "'");
            return v;
        };

        const double label_value = parse_field(schema.label_col);
        std::vector<double> row(rec.channels);
        bool finite = std::isfinite(label_value);
        for (std::size_t c = 0; c < rec.channels; ++c) {
            row[c] = parse_field(schema.channel_cols[c]);
            finite = finite && std::isfinite(row[c]);
        }
        if (!finite) {
            ++rec.dropped_rows;
            continue;
        }
        if (std::floor(label_value) != label_value || label_value < 0)
            throw ParseError(path + ":" + std::to_string(line_no) + ": label '" +
                             std::to_string(label_value) + "' is not a non-negative integer");

        rec.values.insert(rec.values.end(), row.begin(), row.end());
        rec.labels.push_back(static_cast<int>(label_value));
    }
    if (line_no == 0) throw InvalidInputError("load_recording: " + path + " is empty");
    return rec;
}

// Segment a recording into fixed windows. Window length is
// round(duration_s * sample_rate); stride is floor(T * (1 - overlap)), at
// least 1. A window takes the majority label, ties to the label occurring
// earliest inside the window. A too-short recording gives an empty batch.
inline SequenceBatch sliding_window(const RawRecording& rec, double duration_s, double overlap) {
    if (rec.sample_rate_hz <= 0.0)
        throw InvalidConfigError("sliding_window: sample rate must be positive");
    const long t_long = std::lround(duration_s * rec.sample_rate_hz);
    if (t_long < 1)
        throw InvalidConfigError("sliding_window: window spans fewer than one sample");
    if (overlap < 0.0 || overlap >= 1.0)
        throw InvalidConfigError("sliding_window: overlap must be in [0, 1)");

    const std::size_t T = static_cast<std::size_t>(t_long);
    const std::size_t stride = std::max<std::size_t>(
        1, static_cast<std::size_t>(static_cast<double>(T) * (1.0 - overlap)));

    std::vector<std::size_t> starts;
    for (std::size_t s = 0; s + T <= rec.rows(); s += stride) starts.push_back(s);

    SequenceBatch batch(starts.size(), T, rec.channels);
    for (std::size_t w = 0; w < starts.size(); ++w) {
        const std::size_t s = starts[w];
        std::map<int, std::size_t> votes;
        std::map<int, std::size_t> first_seen;
        for (std::size_t t = 0; t < T; ++t) {
            const int l = rec.labels[s + t];
            if (votes[l]++ == 0) first_seen[l] = t;
            for (std::size_t c = 0; c < rec.channels; ++c)
                batch.value(w, t, c) = rec.value(s + t, c);
        }
        int best = rec.labels[s];
        for (const auto& [label, count] : votes) {
            if (count > votes[best] ||
                (count == votes[best] && first_seen[label] < first_seen[best]))
                best = label;
        }
        batch.labels[w] = best;
    }
    return batch;
}

namespace detail {

inline std::map<int, std::vector<std::size_t>> indices_by_class(const SequenceBatch& batch) {
    std::map<int, std::vector<std::size_t>> by_class;
    for (std::size_t i = 0; i < batch.n; ++i) by_class[batch.labels[i]].push_back(i);
    return by_class;
}

}  // namespace detail

// Keep only samples whose label is in the given set; labels are unchanged.
inline SequenceBatch restrict_to_classes(const SequenceBatch& batch,
                                         const std::vector<int>& classes) {
    const std::set<int> keep(classes.begin(), classes.end());
    std::vector<std::size_t> indices;
    for (std::size_t i = 0; i < batch.n; ++i) {
        if (keep.count(batch.labels[i])) indices.push_back(i);
    }
    return batch.select(indices);
}

// Uniform selection without replacement of exactly per_class samples from
// every class present, deterministic for a given seed.
inline SequenceBatch balance_classes(const SequenceBatch& batch, std::size_t per_class,
                                     std::uint64_t seed) {
    if (per_class == 0) throw InvalidConfigError("balance_classes: per_class must be positive");
    const auto by_class = detail::indices_by_class(batch);
    std::vector<std::size_t> selected;
    for (const auto& [label, indices] : by_class) {
        if (indices.size() < per_class)
            throw InsufficientSamplesError("balance_classes: class " + std::to_string(label) +
                                           " has " + std::to_string(indices.size()) +
                                           " samples, needs " + std::to_string(per_class));
        std::vector<std::size_t> pool = indices;
        std::mt19937_64 rng(mix_seed(seed, static_cast<std::uint64_t>(label)));
        std::shuffle(pool.begin(), pool.end(), rng);
        selected.insert(selected.end(), pool.begin(), pool.begin() + per_class);
    }
    std::sort(selected.begin(), selected.end());
    return batch.select(selected);
}

// Which original classes form the source and target tasks, plus one textual
// description per class for semantic relevance.
struct SplitSpec {
    std::vector<int> source_classes;
    std::vector<int> target_classes;
    std::map<int, std::string> class_terms;

    void validate() const {
        if (source_classes.empty() || target_classes.empty())
            throw InvalidConfigError("split: source and target class lists must be non-empty");
        std::set<int> src(source_classes.begin(), source_classes.end());
        for (int t : target_classes) {
            if (src.count(t))
                throw InvalidConfigError("split: class " + std::to_string(t) +
                                         " appears in both source and target");
        }
        if (src.size() != source_classes.size())
            throw InvalidConfigError("split: duplicate source class");
        std::set<int> trg(target_classes.begin(), target_classes.end());
        if (trg.size() != target_classes.size())
            throw InvalidConfigError("split: duplicate target class");
    }

    static SplitSpec from_json(const nlohmann::json& j) {
        SplitSpec s;
        s.source_classes = j.at("source_classes").get<std::vector<int>>();
        s.target_classes = j.at("target_classes").get<std::vector<int>>();
        if (j.contains("class_terms")) {
            for (const auto& [key, value] : j.at("class_terms").items())
                s.class_terms[std::stoi(key)] = value.get<std::string>();
        }
        s.validate();
        return s;
    }
};

// Disjoint source/target partition with per-domain labels re-indexed to the
// order of the spec's class lists; the original ids are retained.
struct DomainSplit {
    SequenceBatch source;
    SequenceBatch target_pool;
    std::vector<int> source_original_ids;  // source label i came from this class id
    std::vector<int> target_original_ids;

    std::vector<std::string> source_terms(const SplitSpec& spec) const {
        return terms_for(spec, source_original_ids);
    }
    std::vector<std::string> target_terms(const SplitSpec& spec) const {
        return terms_for(spec, target_original_ids);
    }

private:
    static std::vector<std::string> terms_for(const SplitSpec& spec, const std::vector<int>& ids) {
        std::vector<std::string> terms;
        for (int id : ids) {
            const auto it = spec.class_terms.find(id);
            if (it == spec.class_terms.end())
                throw InvalidConfigError("split: no class term for class " + std::to_string(id));
            terms.push_back(it->second);
        }
        return terms;
    }
};

inline DomainSplit split_domains(const SequenceBatch& batch, const SplitSpec& spec) {
    spec.validate();
    std::map<int, int> relabel;  // original id -> (domain, new label)
    std::map<int, bool> is_source;
    for (std::size_t i = 0; i < spec.source_classes.size(); ++i) {
        relabel[spec.source_classes[i]] = static_cast<int>(i);
        is_source[spec.source_classes[i]] = true;
    }
    for (std::size_t i = 0; i < spec.target_classes.size(); ++i) {
        relabel[spec.target_classes[i]] = static_cast<int>(i);
        is_source[spec.target_classes[i]] = false;
    }

    const auto by_class = detail::indices_by_class(batch);
    for (int c : spec.source_classes) {
        if (!by_class.count(c))
            throw InvalidInputError("split: source class " + std::to_string(c) +
                                    " absent from batch");
    }
    for (int c : spec.target_classes) {
        if (!by_class.count(c))
            throw InvalidInputError("split: target class " + std::to_string(c) +
                                    " absent from batch");
    }

    std::vector<std::size_t> src_idx, trg_idx;
    for (std::size_t i = 0; i < batch.n; ++i) {
        const auto it = relabel.find(batch.labels[i]);
        if (it == relabel.end()) continue;  // class not in either task
        (is_source[batch.labels[i]] ? src_idx : trg_idx).push_back(i);
    }

    DomainSplit split;
    split.source = batch.select(src_idx);
    split.target_pool = batch.select(trg_idx);
    for (std::size_t k = 0; k < split.source.n; ++k)
        split.source.labels[k] = relabel[split.source.labels[k]];
    for (std::size_t k = 0; k < split.target_pool.n; ++k)
        split.target_pool.labels[k] = relabel[split.target_pool.labels[k]];
    split.source_original_ids = spec.source_classes;
    split.target_original_ids = spec.target_classes;
    return split;
}

// One few-shot trial: k training samples per target class, every remaining
// pool sample as the test set.
struct Episode {
    SequenceBatch train;
    SequenceBatch test;
    std::size_t shots = 0;
};

inline Episode sample_episode(const SequenceBatch& target_pool, std::size_t k,
                              std::uint64_t seed) {
    if (k == 0) throw InvalidConfigError("sample_episode: k must be positive");
    const auto by_class = detail::indices_by_class(target_pool);
    std::vector<std::size_t> train_idx, test_idx;
    for (const auto& [label, indices] : by_class) {
        if (indices.size() <= k)
            throw InsufficientSamplesError("sample_episode: class " + std::to_string(label) +
                                           " has " + std::to_string(indices.size()) +
                                           " samples, needs more than " + std::to_string(k));
        std::vector<std::size_t> pool = indices;
        std::mt19937_64 rng(mix_seed(seed, static_cast<std::uint64_t>(label)));
        std::shuffle(pool.begin(), pool.end(), rng);
        train_idx.insert(train_idx.end(), pool.begin(), pool.begin() + k);
        test_idx.insert(test_idx.end(), pool.begin() + k, pool.end());
    }
    std::sort(train_idx.begin(), train_idx.end());
    std::sort(test_idx.begin(), test_idx.end());

    Episode ep;
    ep.train = target_pool.select(train_idx);
    ep.test = target_pool.select(test_idx);
    ep.shots = k;
    return ep;
}

// Deterministic class patterns: per-channel sinusoid with class-specific
// frequency, phase, and DC offset, plus Gaussian noise. Classes are exactly
// separable at noise_sd = 0.
inline SequenceBatch synth_generate(std::size_t c_classes, std::size_t n_per_class, std::size_t T,
                                    std::size_t C, double noise_sd, std::uint64_t seed) {
    if (c_classes == 0 || n_per_class == 0 || T == 0 || C == 0)
        throw InvalidConfigError("synth_generate: all counts must be positive");
    SequenceBatch batch(c_classes * n_per_class, T, C);
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(0.0, noise_sd);

    constexpr double kTwoPi = 6.283185307179586;
    std::size_t i = 0;
    for (std::size_t k = 0; k < c_classes; ++k) {
        const double freq = 0.5 + 0.25 * static_cast<double>(k);
        for (std::size_t s = 0; s < n_per_class; ++s, ++i) {
            batch.labels[i] = static_cast<int>(k);
            for (std::size_t t = 0; t < T; ++t) {
                for (std::size_t c = 0; c < C; ++c) {
                    const double phase = 0.9 * static_cast<double>(k) + 0.6 * static_cast<double>(c);
                    const double offset =
                        0.4 * std::sin(1.7 * static_cast<double>(k) + 2.3 * static_cast<double>(c));
                    const double base =
                        offset + std::sin(kTwoPi * freq * static_cast<double>(t) /
                                              static_cast<double>(T) +
                                          phase);
                    batch.value(i, t, c) = base + (noise_sd > 0.0 ? noise(rng) : 0.0);
                }
            }
        }
    }
    return batch;
}

// Per-channel mean and standard deviation over all samples and timesteps.
struct ChannelStats {
    std::vector<double> mean;
    std::vector<double> sd;
};

inline ChannelStats channel_stats(const SequenceBatch& batch) {
    ChannelStats stats;
    stats.mean.assign(batch.C, 0.0);
    stats.sd.assign(batch.C, 1.0);
    const std::size_t count = batch.n * batch.T;
    if (count == 0) return stats;
    for (std::size_t i = 0; i < batch.n; ++i)
        for (std::size_t t = 0; t < batch.T; ++t)
            for (std::size_t c = 0; c < batch.C; ++c) stats.mean[c] += batch.value(i, t, c);
    for (double& m : stats.mean) m /= static_cast<double>(count);
    std::vector<double> var(batch.C, 0.0);
    for (std::size_t i = 0; i < batch.n; ++i)
        for (std::size_t t = 0; t < batch.T; ++t)
            for (std::size_t c = 0; c < batch.C; ++c) {
                const double d = batch.value(i, t, c) - stats.mean[c];
                var[c] += d * d;
            }
    for (std::size_t c = 0; c < batch.C; ++c) {
        const double v = var[c] / static_cast<double>(count);
        stats.sd[c] = v > 0.0 ? std::sqrt(v) : 1.0;  // constant channel stays untouched
    }
    return stats;
}

inline void standardize(SequenceBatch& batch, const ChannelStats& stats) {
    if (stats.mean.size() != batch.C)
        throw InvalidConfigError("standardize: channel count mismatch");
    for (std::size_t i = 0; i < batch.n; ++i)
        for (std::size_t t = 0; t < batch.T; ++t)
            for (std::size_t c = 0; c < batch.C; ++c)
                batch.value(i, t, c) = (batch.value(i, t, c) - stats.mean[c]) / stats.sd[c];
}

// Windowed-batch cache: raw 64-bit little-endian floats at `path` plus a
// JSON sidecar `path`.json with the dimensions and labels.
inline void save_batch(const SequenceBatch& batch, const std::string& path) {
    std::ofstream bin(path, std::ios::binary);
    if (!bin) throw IoError("save_batch: cannot open " + path);
    bin.write(reinterpret_cast<const char*>(batch.values.data()),
              static_cast<std::streamsize>(batch.values.size() * sizeof(double)));
    if (!bin) throw IoError("save_batch: write failed for " + path);

    nlohmann::json header{{"n", batch.n},
                          {"T", batch.T},
                          {"C", batch.C},
                          {"labels", batch.labels},
                          {"dtype", "float64-le"}};
    std::ofstream side(path + ".json");
    if (!side) throw IoError("save_batch: cannot open " + path + ".json");
    side << header.dump(2) << "\n";
}

inline SequenceBatch load_batch(const std::string& path) {
    std::ifstream side(path + ".json");
    if (!side) throw IoError("load_batch: cannot open " + path + ".json");
    nlohmann::json header;
    try {
        side >> header;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError("load_batch " + path + ".json: " + e.what());
    }
    SequenceBatch batch(header.at("n").get<std::size_t>(), header.at("T").get<std::size_t>(),
                        header.at("C").get<std::size_t>());
    batch.labels = header.at("labels").get<std::vector<int>>();

    std::ifstream bin(path, std::ios::binary);
    if (!bin) throw IoError("load_batch: cannot open " + path);
    bin.read(reinterpret_cast<char*>(batch.values.data()),
             static_cast<std::streamsize>(batch.values.size() * sizeof(double)));
    if (static_cast<std::size_t>(bin.gcount()) != batch.values.size() * sizeof(double))
        throw ParseError("load_batch: " + path + " shorter than header promises");
    batch.validate();
    return batch;
}

}  // namespace fshar
