#pragma once

#include <charconv>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "iil/errors.hpp"

namespace iil {

inline constexpr const char* kMetricsHeader =
    "step,update,mean_intrinsic_reward,mean_true_return,loss_recon,loss_kl,loss_policy,seed";

// One periodic metrics row. For reward-module training the loss columns carry
// the objective terms; for PPO stages they carry value loss / entropy /
// policy loss in that order.
struct MetricsRow {
    std::uint64_t step = 0;
    std::uint64_t update = 0;
    double mean_intrinsic_reward = 0.0;
    double mean_true_return = 0.0;
    double loss_recon = 0.0;
    double loss_kl = 0.0;
    double loss_policy = 0.0;
    std::uint64_t seed = 0;
};

namespace detail {
inline std::string csv_double(double v) {
    char buf[64];
    auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    (void)ec;
    return std::string(buf, p);
}
}  // namespace detail

class MetricsWriter {
public:
    explicit MetricsWriter(const std::string& path) : os_(path, std::ios::trunc) {
        if (!os_) throw IoError("cannot open metrics csv for write: " + path);
        os_ << kMetricsHeader << "\n";
    }

    void write(const MetricsRow& r) {
        os_ << r.step << ',' << r.update << ',' << detail::csv_double(r.mean_intrinsic_reward)
            << ',' << detail::csv_double(r.mean_true_return) << ','
            << detail::csv_double(r.loss_recon) << ',' << detail::csv_double(r.loss_kl) << ','
            << detail::csv_double(r.loss_policy) << ',' << r.seed << "\n";
        os_.flush();
    }

private:
    std::ofstream os_;
};

// Strict reader: header must match, every row needs all eight fields. Errors
// carry the 1-based line number.
inline std::vector<MetricsRow> read_metrics_csv(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw IoError("cannot open metrics csv: " + path);
    std::string line;
    if (!std::getline(is, line)) throw FormatError(path + ": empty file (line 1)", 0);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != kMetricsHeader)
        throw FormatError(path + ": bad header (line 1)", 0);

    std::vector<MetricsRow> rows;
    std::size_t line_no = 1;
    while (std::getline(is, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string field;
        std::vector<std::string> fields;
        while (std::getline(ss, field, ',')) fields.push_back(field);
        if (fields.size() != 8)
            throw FormatError(path + ": expected 8 fields (line " + std::to_string(line_no) + ")",
                              line_no);
        try {
            MetricsRow r;
            r.step = std::stoull(fields[0]);
            r.update = std::stoull(fields[1]);
            r.mean_intrinsic_reward = std::stod(fields[2]);
            r.mean_true_return = std::stod(fields[3]);
            r.loss_recon = std::stod(fields[4]);
            r.loss_kl = std::stod(fields[5]);
            r.loss_policy = std::stod(fields[6]);
            r.seed = std::stoull(fields[7]);
            rows.push_back(r);
        } catch (const std::exception&) {
            throw FormatError(path + ": bad numeric field (line " + std::to_string(line_no) + ")",
                              line_no);
        }
    }
    return rows;
}

}  // namespace iil
