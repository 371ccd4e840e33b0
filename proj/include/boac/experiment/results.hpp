#ifndef BOAC_EXPERIMENT_RESULTS_HPP
#define BOAC_EXPERIMENT_RESULTS_HPP

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "boac/io/json.hpp"

namespace boac
{

/// One statistic of one cell. Columns of the CSV, in order:
/// experiment, L, K, snr_db, param, statistic, value, trials, stderr.
struct ResultRow
{
    std::string experiment;
    Index length = 0;
    int users = 0;
    double snr_db = 0.0;
    /// Extra cell coordinate (lambda scale, run label); empty when unused.
    std::string param;
    std::string statistic;
    double value = 0.0;
    int trials = 0;
    double stderr_value = 0.0;
};

inline constexpr const char* kResultColumns = "experiment,L,K,snr_db,param,statistic,value,trials,stderr";

/// Shortest text that reads back to the same double.
inline std::string format_real(double x)
{
    if (std::isinf(x)) {
        return x > 0 ? "inf" : "-inf";
    }
    if (std::isnan(x)) {
        return "nan";
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

/// Quotes a CSV field when it contains a separator, quote or newline.
inline std::string csv_field(const std::string& s)
{
    if (s.find_first_of(",\"\n") == std::string::npos) {
        return s;
    }
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') {
            out += '"';
        }
        out += c;
    }
    return out + "\"";
}

class ResultTable
{
public:
    void add(ResultRow row) { rows_.push_back(std::move(row)); }
    const std::vector<ResultRow>& rows() const noexcept { return rows_; }
    std::size_t size() const noexcept { return rows_.size(); }

    /// Rows matching every non-empty filter.
    std::vector<ResultRow> select(const std::string& statistic, const std::string& param = {}) const
    {
        std::vector<ResultRow> out;
        for (const auto& r : rows_) {
            if (r.statistic == statistic && (param.empty() || r.param == param)) {
                out.push_back(r);
            }
        }
        return out;
    }

    /// The unique row at a cell, or throws.
    const ResultRow& at(Index length, int users, double snr_db, const std::string& statistic,
                        const std::string& param = {}) const
    {
        for (const auto& r : rows_) {
            if (r.length == length && r.users == users && r.snr_db == snr_db &&
                r.statistic == statistic && r.param == param) {
                return r;
            }
        }
        throw DomainError("ResultTable: no row for " + statistic + " at L=" + std::to_string(length) +
                          " K=" + std::to_string(users) + " snr=" + format_real(snr_db));
    }

    std::string to_csv() const
    {
        std::ostringstream out;
        out << kResultColumns << '\n';
        for (const auto& r : rows_) {
            out << csv_field(r.experiment) << ',' << r.length << ',' << r.users << ','
                << format_real(r.snr_db) << ',' << csv_field(r.param) << ',' << csv_field(r.statistic)
                << ',' << format_real(r.value) << ',' << r.trials << ',' << format_real(r.stderr_value)
                << '\n';
        }
        return out.str();
    }

private:
    std::vector<ResultRow> rows_;
};

inline void write_text_file(const std::filesystem::path& path, const std::string& text)
{
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path());
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw std::runtime_error("cannot write " + path.string());
    }
    out << text;
    if (!out.flush()) {
        throw std::runtime_error("write failed for " + path.string());
    }
}

/// Mean and standard error of a sample (stderr 0 for fewer than 2 values).
struct SampleSummary
{
    double mean = std::numeric_limits<double>::quiet_NaN();
    double stderr_value = 0.0;
    int count = 0;
};

inline SampleSummary summarize(const std::vector<double>& xs)
{
    SampleSummary s;
    s.count = static_cast<int>(xs.size());
    if (xs.empty()) {
        return s;
    }
    double sum = 0.0;
    for (double x : xs) {
        sum += x;
    }
    s.mean = sum / static_cast<double>(xs.size());
    if (xs.size() > 1) {
        double ss = 0.0;
        for (double x : xs) {
            ss += (x - s.mean) * (x - s.mean);
        }
        const double n = static_cast<double>(xs.size());
        s.stderr_value = std::sqrt(ss / (n - 1.0) / n);
    }
    return s;
}

/// 64-bit FNV-1a, stable across platforms; used to tie checkpoints to a config.
inline std::uint64_t fnv1a(const std::string& s)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

/// Append-only JSON-lines record of finished work items, keyed by a string.
/// Records written under a different fingerprint are ignored on load, so a
/// changed config never resumes from stale cells.
class Checkpoint
{
public:
    Checkpoint() = default;
    Checkpoint(std::filesystem::path path, std::uint64_t fingerprint)
        : path_(std::move(path)), fingerprint_(fingerprint)
    {
        load();
    }

    bool enabled() const noexcept { return !path_.empty(); }

    const Json* find(const std::string& key) const
    {
        const auto it = done_.find(key);
        return it == done_.end() ? nullptr : &it->second;
    }

    void record(const std::string& key, Json payload)
    {
        if (!enabled()) {
            return;
        }
        if (path_.has_parent_path()) {
            std::filesystem::create_directories(path_.parent_path());
        }
        Json line{{"fingerprint", fingerprint_}, {"key", key}, {"payload", payload}};
        std::ofstream out(path_, std::ios::app);
        out << line.dump() << '\n';
        out.flush();
        done_[key] = std::move(payload);
    }

    std::size_t size() const noexcept { return done_.size(); }

private:
    void load()
    {
        std::ifstream in(path_);
        std::string text;
        while (std::getline(in, text)) {
            if (text.empty()) {
                continue;
            }
            Json line = Json::parse(text, nullptr, false);
            // A torn final line from an interrupted write parses as discarded.
            if (line.is_discarded() || !line.contains("fingerprint")) {
                continue;
            }
            if (line["fingerprint"].get<std::uint64_t>() != fingerprint_) {
                continue;
            }
            done_[line["key"].get<std::string>()] = line["payload"];
        }
    }

    std::filesystem::path path_;
    std::uint64_t fingerprint_ = 0;
    std::map<std::string, Json> done_;
};

} // namespace boac

#endif
