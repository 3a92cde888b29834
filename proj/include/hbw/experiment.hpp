#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "hbw/pipeline.hpp"

namespace hbw {

enum class ReportFormat { csv, json };

struct ExperimentConfig {
  std::vector<std::filesystem::path> inputs;
  PipelineConfig pipeline;
  std::vector<Method> methods{Method::hbw_omp};
  std::optional<std::filesystem::path> out;
  ReportFormat format = ReportFormat::csv;
  // Off makes reports byte-reproducible: runtime_s is written as 0.
  bool record_timing = true;
  std::optional<std::filesystem::path> trace_out;
};

struct ReportRow {
  std::string image;
  std::string method;
  std::string domain;
  int block_size = 0;
  int levels = 0;
  std::string stop_rule;
  std::size_t k = 0;
  double sparsity_ratio = 0;
  double psnr_db = 0;
  double runtime_s = 0;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> segments;
  std::vector<std::string> warnings;
};

struct TraceRecord {
  std::string image;
  std::string method;
  TraceEntry entry;
};

// Command-line misuse; maps to exit status 1.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr int kExitSuccess = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;

// Parses the command line. Returns nullopt after printing help to `out`.
std::optional<ExperimentConfig> parse_args(int argc, const char* const* argv, std::ostream& out);

// One row for a single (image, method) pair.
ReportRow run_method(const IntensityImage& img, const std::string& image_id, Method method,
                     const ExperimentConfig& config, std::vector<TraceRecord>* trace = nullptr);

// Loads every input, runs every method and writes the report (and trace)
// when output paths are configured. On a failure the rows completed so far
// are written before the error propagates, naming the image and method.
std::vector<ReportRow> run_experiment(const ExperimentConfig& config);

void write_csv(std::ostream& out, const std::vector<ReportRow>& rows);
void write_json(std::ostream& out, const std::vector<ReportRow>& rows);
void write_trace_csv(std::ostream& out, const std::vector<TraceRecord>& trace);

}  // namespace hbw
