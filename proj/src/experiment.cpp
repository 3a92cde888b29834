#include "hbw/experiment.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "hbw/baselines.hpp"
#include "hbw/error.hpp"

namespace hbw {
namespace {

constexpr Method kAllMethods[] = {Method::mp,     Method::omp,         Method::hbw_mp,
                                  Method::hbw_omp, Method::wt_baseline, Method::dct_baseline};

std::string format_number(double v, int precision) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", precision, v);
  return buf;
}

std::string stop_label(const ExperimentConfig& config, Method method) {
  std::string label = describe(config.pipeline.stop);
  if (config.pipeline.segments && is_hbw(method)) {
    label += ",segments=" + std::to_string(config.pipeline.segments->count);
  }
  return label;
}

template <typename Fn>
double timed(bool record, Fn&& fn) {
  const auto start = std::chrono::steady_clock::now();
  fn();
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return record ? seconds : 0.0;
}

void write_report(const ExperimentConfig& config, const std::vector<ReportRow>& rows) {
  if (!config.out) return;
  std::ofstream out(*config.out, std::ios::binary);
  if (!out) throw Error(ErrorCode::write_failure, "cannot open report " + config.out->string());
  if (config.format == ReportFormat::json) {
    write_json(out, rows);
  } else {
    write_csv(out, rows);
  }
  if (!out) throw Error(ErrorCode::write_failure, "failed writing report " + config.out->string());
}

void write_trace(const ExperimentConfig& config, const std::vector<TraceRecord>& trace) {
  if (!config.trace_out) return;
  std::ofstream out(*config.trace_out, std::ios::binary);
  if (!out) throw Error(ErrorCode::write_failure, "cannot open trace " + config.trace_out->string());
  write_trace_csv(out, trace);
}

}  // namespace

std::optional<ExperimentConfig> parse_args(int argc, const char* const* argv, std::ostream& out) {
  CLI::App app{"Greedy sparse approximation of block-partitioned grayscale images"};
  app.name(argc > 0 ? argv[0] : "hbw_approx");

  std::vector<std::string> inputs;
  std::string domain = "wavelet";
  std::vector<std::string> methods{"hbw-omp"};
  int block_size = 8;
  int levels = kDefaultWaveletLevels;
  double target_psnr = 45.0;
  std::size_t budget = 0;
  std::size_t segments = 0;
  std::uint64_t seed = 0;
  std::string out_path;
  std::string format = "csv";
  std::string trace_path;
  bool no_timing = false;

  app.add_option("--input", inputs, "Input image(s): P5 PGM or 8-bit grayscale PNG")->required()->expected(1, -1);
  app.add_option("--domain", domain, "Pursuit domain")
      ->check(CLI::IsMember({"intensity", "wavelet"}))
      ->capture_default_str();
  app.add_option("--method", methods, "mp, omp, hbw-mp, hbw-omp, wt, dct, or all (comma separated)")
      ->delimiter(',')
      ->capture_default_str();
  app.add_option("--block-size", block_size, "Block side in pixels")->check(CLI::Range(2, 1 << 16))->capture_default_str();
  app.add_option("--levels", levels, "CDF97 decomposition depth")->check(CLI::Range(0, 30))->capture_default_str();
  auto* psnr_opt = app.add_option("--target-psnr", target_psnr, "Stop at this PSNR (dB)")->capture_default_str();
  auto* budget_opt = app.add_option("--budget", budget, "Stop at this total number of atoms");
  psnr_opt->excludes(budget_opt);
  auto* segments_opt = app.add_option("--segments", segments, "Randomized segments for HBW (wavelet domain)")
                           ->check(CLI::PositiveNumber);
  app.add_option("--seed", seed, "Seed for the block permutation")->capture_default_str();
  app.add_option("--out", out_path, "Report file");
  app.add_option("--format", format, "Report format")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
  app.add_option("--trace", trace_path, "Write HBW/independent selection traces as CSV");
  app.add_flag("--no-timing", no_timing, "Write runtime_s as 0 so reports are byte-reproducible");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return std::nullopt;
  } catch (const CLI::ParseError& e) {
    throw UsageError(e.what());
  }

  ExperimentConfig config;
  for (const auto& in : inputs) config.inputs.emplace_back(in);
  config.pipeline.domain = *parse_domain(domain);
  config.pipeline.block_size = block_size;
  config.pipeline.wavelet_levels = levels;
  if (budget_opt->count() > 0) {
    config.pipeline.stop = AtomBudget{budget};
  } else {
    config.pipeline.stop = PsnrTarget{target_psnr};
  }
  if (segments_opt->count() > 0) {
    if (config.pipeline.domain != Domain::wavelet) throw UsageError("--segments requires --domain wavelet");
    config.pipeline.segments = Segmentation{segments, seed};
  }

  config.methods.clear();
  for (const auto& name : methods) {
    if (name == "all") {
      config.methods.assign(std::begin(kAllMethods), std::end(kAllMethods));
      continue;
    }
    const auto m = parse_method(name);
    if (!m) throw UsageError("unknown method: " + name);
    config.methods.push_back(*m);
  }
  std::sort(config.methods.begin(), config.methods.end());
  config.methods.erase(std::unique(config.methods.begin(), config.methods.end()), config.methods.end());
  if (budget_opt->count() > 0) {
    for (Method m : config.methods) {
      if (is_pursuit(m) && !is_hbw(m)) {
        throw UsageError("--budget applies to HBW methods and baselines; " + std::string(to_string(m)) +
                         " stops on --target-psnr");
      }
    }
  }

  if (!out_path.empty()) config.out = out_path;
  if (!trace_path.empty()) config.trace_out = trace_path;
  config.format = format == "json" ? ReportFormat::json : ReportFormat::csv;
  config.record_timing = !no_timing;
  try {
    validate(config.pipeline);
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
  return config;
}

ReportRow run_method(const IntensityImage& img, const std::string& image_id, Method method,
                     const ExperimentConfig& config, std::vector<TraceRecord>* trace) {
  const auto& pc = config.pipeline;
  ReportRow row;
  row.image = image_id;
  row.method = std::string(to_string(method));
  row.block_size = pc.block_size;
  row.stop_rule = stop_label(config, method);

  if (!is_pursuit(method)) {
    const auto* budget = std::get_if<AtomBudget>(&pc.stop);
    const auto* target = std::get_if<PsnrTarget>(&pc.stop);
    if (!budget && !target) throw Error(ErrorCode::invalid_config, "baselines need a PSNR target or a budget");
    MetricsReport report;
    row.runtime_s = timed(config.record_timing, [&] {
      if (method == Method::wt_baseline) {
        report = budget ? wt_budget_baseline(img, pc.wavelet_levels, budget->atoms)
                        : wt_threshold_baseline(img, pc.wavelet_levels, target->db);
      } else {
        report = budget ? dct_budget_baseline(img, pc.block_size, budget->atoms)
                        : dct_threshold_baseline(img, pc.block_size, target->db);
      }
    });
    row.domain = report.domain;
    row.levels = method == Method::wt_baseline ? pc.wavelet_levels : 0;
    row.k = report.nonzero_count;
    row.sparsity_ratio = report.sparsity_ratio;
    row.psnr_db = report.psnr_db;
    return row;
  }

  PipelineConfig run_config = pc;
  run_config.method = method;
  Approximation result;
  const bool segmented = pc.segments && is_hbw(method);
  row.runtime_s = timed(config.record_timing, [&] {
    result = segmented ? approximate_segmented(img, run_config, pc.segments->count, pc.segments->seed)
                       : approximate_image(img, run_config);
  });
  row.domain = std::string(to_string(pc.domain));
  row.levels = pc.domain == Domain::wavelet ? pc.wavelet_levels : 0;
  row.k = result.result.total_atoms;
  row.sparsity_ratio = result.result.sparsity_ratio;
  row.psnr_db = result.result.achieved_psnr;
  row.warnings = result.result.warnings;
  if (segmented) {
    row.seed = pc.segments->seed;
    row.segments = pc.segments->count;
  }
  if (trace) {
    for (const auto& e : result.result.trace) trace->push_back({image_id, row.method, e});
  }
  return row;
}

std::vector<ReportRow> run_experiment(const ExperimentConfig& config) {
  std::vector<ReportRow> rows;
  std::vector<TraceRecord> trace;
  auto* trace_sink = config.trace_out ? &trace : nullptr;
  for (const auto& path : config.inputs) {
    const std::string image_id = path.stem().string();
    IntensityImage img;
    try {
      img = load_image(path);
    } catch (const Error& e) {
      write_report(config, rows);
      throw Error(e.code(), "image " + image_id + ": " + e.what());
    }
    for (Method method : config.methods) {
      try {
        rows.push_back(run_method(img, image_id, method, config, trace_sink));
      } catch (const Error& e) {
        write_report(config, rows);
        write_trace(config, trace);
        throw Error(e.code(), "image " + image_id + ", method " + std::string(to_string(method)) + ": " + e.what());
      }
    }
  }
  write_report(config, rows);
  write_trace(config, trace);
  return rows;
}

void write_csv(std::ostream& out, const std::vector<ReportRow>& rows) {
  out << "image,method,domain,block_size,levels,stop_rule,K,SR,psnr_db,runtime_s,seed\n";
  for (const auto& r : rows) {
    out << r.image << ',' << r.method << ',' << r.domain << ',' << r.block_size << ',' << r.levels << ','
        << r.stop_rule << ',' << r.k << ',' << format_number(r.sparsity_ratio, 4) << ','
        << format_number(r.psnr_db, 4) << ',' << format_number(r.runtime_s, 4) << ',';
    if (r.seed) out << *r.seed;
    out << '\n';
  }
}

void write_json(std::ostream& out, const std::vector<ReportRow>& rows) {
  auto number = [](double v) -> nlohmann::json {
    if (!std::isfinite(v)) return nullptr;
    return v;
  };
  nlohmann::json doc = nlohmann::json::object();
  doc["rows"] = nlohmann::json::array();
  for (const auto& r : rows) {
    nlohmann::json j;
    j["image"] = r.image;
    j["method"] = r.method;
    j["domain"] = r.domain;
    j["block_size"] = r.block_size;
    j["levels"] = r.levels;
    j["stop_rule"] = r.stop_rule;
    j["K"] = r.k;
    j["SR"] = number(r.sparsity_ratio);
    j["psnr_db"] = number(r.psnr_db);
    j["runtime_s"] = r.runtime_s;
    j["seed"] = r.seed ? nlohmann::json(*r.seed) : nlohmann::json(nullptr);
    j["segments"] = r.segments ? nlohmann::json(*r.segments) : nlohmann::json(nullptr);
    j["warnings"] = r.warnings;
    doc["rows"].push_back(std::move(j));
  }
  out << doc.dump(2) << '\n';
}

void write_trace_csv(std::ostream& out, const std::vector<TraceRecord>& trace) {
  out << "image,method,step,block,p,q,magnitude\n";
  char buf[64];
  for (const auto& t : trace) {
    std::snprintf(buf, sizeof buf, "%.17g", t.entry.magnitude);
    out << t.image << ',' << t.method << ',' << t.entry.step << ',' << t.entry.block_id << ',' << t.entry.atom.p
        << ',' << t.entry.atom.q << ',' << buf << '\n';
  }
}

}  // namespace hbw
