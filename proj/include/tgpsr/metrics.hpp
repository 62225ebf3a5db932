#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tgpsr/simulation.hpp"

namespace tgpsr {

struct RunMetrics {
    int scenario = 1;
    std::uint64_t seed = 0;
    std::uint64_t fragments_sent = 0;
    std::uint64_t fragments_delivered = 0;
    double avg_loss_ratio = 1.0;
    std::uint64_t images_attempted = 0;
    std::uint64_t images_received = 0; // at least one fragment reached the sink
    std::uint64_t complete = 0;
    std::uint64_t usable = 0;
    std::uint64_t unusable = 0;
    std::uint64_t no_reception = 0;
    std::vector<double> latencies; // received images only
    std::optional<double> mean_latency_s;
    std::optional<double> latency_ratio;

    void check() const; // throws Error(internal) if the counters disagree
    friend bool operator==(const RunMetrics&, const RunMetrics&) = default;
};

/// Averages loss over every captured image (an image nothing arrived for
/// counts as fully lost); latency only over images that reached the sink.
RunMetrics aggregate(int scenario, std::uint64_t seed, const std::vector<ImageResult>& images,
                     std::uint64_t fragments_sent, std::uint64_t fragments_delivered, double best_case_latency);
RunMetrics aggregate(const RunRecord& record);

enum class ExportFormat { csv, structured };
ExportFormat parse_format(const std::string& name);

extern const char* const kCsvHeader;

std::string to_csv(const std::vector<RunMetrics>& runs);
std::string to_structured(const std::vector<RunMetrics>& runs);
/// Inverse of to_csv (latencies are not part of the CSV) and to_structured.
std::vector<RunMetrics> from_csv(const std::string& text);
std::vector<RunMetrics> from_structured(const std::string& text);

struct SummaryRow {
    int scenario = 1;
    std::string metric;
    std::size_t runs = 0;
    double mean = 0.0;
    double stddev = 0.0; // sample standard deviation, 0 for a single run
};

/// Mean and spread per scenario of every numeric CSV column; runs with an
/// undefined latency are left out of the latency rows.
std::vector<SummaryRow> summarize(const std::vector<RunMetrics>& runs);
std::string summary_csv(const std::vector<SummaryRow>& rows);

/// Writes `text` to `path`. Throws Error(io) naming the path.
void write_file(const std::string& path, const std::string& text);
void export_runs(const std::vector<RunMetrics>& runs, ExportFormat format, const std::string& path);

} // namespace tgpsr
