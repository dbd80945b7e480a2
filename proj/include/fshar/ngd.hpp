#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "fshar/errors.hpp"
#include "fshar/matrix.hpp"

namespace fshar {

// Lowercase, trim, collapse internal whitespace.
inline std::string canonicalize_term(const std::string& term) {
    std::string out;
    out.reserve(term.size());
    bool pending_space = false;
    for (char ch : term) {
        if (std::isspace(static_cast<unsigned char>(ch))) {
            if (!out.empty()) pending_space = true;
            continue;
        }
        if (pending_space) {
            out.push_back(' ');
            pending_space = false;
        }
        out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
    }
    return out;
}

// Order-normalized key for joint counts.
inline std::string pair_key(const std::string& a, const std::string& b) {
    std::string ca = canonicalize_term(a);
    std::string cb = canonicalize_term(b);
    if (cb < ca) std::swap(ca, cb);
    return ca + "||" + cb;
}

// Search-engine style hit counts: single-term counts, joint counts, and the
// total page-count scale N.
class HitCountProvider {
public:
    virtual ~HitCountProvider() = default;
    virtual double count(const std::string& term) const = 0;
    virtual double pair_count(const std::string& a, const std::string& b) const = 0;
    virtual double total() const = 0;
};

// Offline table loaded from JSON: {"total_N": ..., "counts": {"term": n,
// "term1||term2": n, ...}}. Keys are canonicalized; pair keys are
// lexicographically ordered. Read-only after construction.
class HitCountTable final : public HitCountProvider {
public:
    HitCountTable(double total_n, std::map<std::string, double> counts)
        : total_n_(total_n), counts_(std::move(counts)) {
        if (total_n_ <= 0.0) throw InvalidConfigError("HitCountTable: total_N must be positive");
        for (const auto& [key, value] : counts_) {
            if (value < 0.0)
                throw InvalidConfigError("HitCountTable: negative count for '" + key + "'");
        }
    }

    static HitCountTable from_json(const nlohmann::json& j) {
        if (!j.contains("total_N") || !j.contains("counts"))
            throw ParseError("hit table: missing total_N or counts");
        std::map<std::string, double> counts;
        for (const auto& [key, value] : j.at("counts").items()) {
            const auto sep = key.find("||");
            const std::string canon =
                sep == std::string::npos
                    ? canonicalize_term(key)
                    : pair_key(key.substr(0, sep), key.substr(sep + 2));
            counts[canon] = value.get<double>();
        }
        return HitCountTable(j.at("total_N").get<double>(), std::move(counts));
    }

    static HitCountTable from_file(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw IoError("hit table: cannot open " + path);
        nlohmann::json j;
        try {
            in >> j;
        } catch (const nlohmann::json::exception& e) {
            throw ParseError("hit table " + path + ": " + e.what());
        }
        return from_json(j);
    }

    double count(const std::string& term) const override {
        const std::string canon = canonicalize_term(term);
        const auto it = counts_.find(canon);
        if (it == counts_.end()) throw UnknownTermError("hit table: unknown term '" + canon + "'");
        return it->second;
    }

    double pair_count(const std::string& a, const std::string& b) const override {
        const std::string key = pair_key(a, b);
        if (canonicalize_term(a) == canonicalize_term(b)) return count(a);
        const auto it = counts_.find(key);
        if (it == counts_.end())
            throw UnknownTermError("hit table: unknown pair '" + key + "'");
        return it->second;
    }

    double total() const override { return total_n_; }

private:
    double total_n_ = 0.0;
    std::map<std::string, double> counts_;
};

// Normalized Google distance between two terms. Disjoint terms
// (joint count zero) give +infinity, which maps to relevance zero.
inline double ngd(const std::string& p, const std::string& q, const HitCountProvider& provider) {
    const double gp = provider.count(p);
    const double gq = provider.count(q);
    const double n = provider.total();
    if (gp <= 0.0 || gq <= 0.0)
        throw InvalidInputError("ngd: term counts must be positive for '" + p + "', '" + q + "'");
    if (n <= std::max(gp, gq))
        throw InvalidInputError("ngd: total N must exceed every single-term count");
    const double gpq = provider.pair_count(p, q);
    if (gpq == 0.0) return std::numeric_limits<double>::infinity();
    if (gpq > std::min(gp, gq))
        throw InvalidInputError("ngd: joint count exceeds a single-term count for '" + p +
                                "', '" + q + "'");

    const double lp = std::log(gp);
    const double lq = std::log(gq);
    return (std::max(lp, lq) - std::log(gpq)) / (std::log(n) - std::min(lp, lq));
}

// O_pq = exp(-NGD(P_p, Q_q)) with one textual description per class.
inline Matrix ngd_class_relevance(const std::vector<std::string>& src_terms,
                                  const std::vector<std::string>& trg_terms,
                                  const HitCountProvider& provider) {
    Matrix o(src_terms.size(), trg_terms.size());
    for (std::size_t p = 0; p < src_terms.size(); ++p)
        for (std::size_t q = 0; q < trg_terms.size(); ++q)
            o(p, q) = std::exp(-ngd(src_terms[p], trg_terms[q], provider));
    return o;
}

}  // namespace fshar
