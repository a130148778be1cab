#pragma once

// Stage orchestration over a resumable working directory:
//   pages/    preprocessed page images        (ingest)
//   text/     per-page OCR text               (ocr)
//   persons/  per-person text documents       (segment)
//   records/  per-person JSON records         (extract)
//   links/    link decisions + sqlite store   (link)
//   reports/  evaluation output               (evaluate)
// Re-runs skip items whose outputs already exist unless forced. A failed
// person never aborts its volume; failures end up in the stage summary.

#include <optional>
#include <string>
#include <vector>

#include "histrec/config.hpp"
#include "histrec/errors.hpp"

namespace histrec::pipeline {

// Raised when a stage's predecessor artifacts are missing; callers treat it
// as an invocation error rather than a partial failure.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

struct ItemError {
  std::string item;
  std::string message;
};

struct StageSummary {
  std::string stage;
  std::size_t processed = 0;
  std::size_t skipped = 0;
  std::size_t failed = 0;
  std::vector<ItemError> errors;

  records::json to_json() const;
};

struct RunOptions {
  std::optional<std::string> volume;  // restrict to one volume id
  bool force = false;
  std::optional<int> jobs;            // overrides config
  std::optional<std::filesystem::path> ground_truth;
};

extern const char* const kStageNames[7];  // ingest..all

class Pipeline {
 public:
  explicit Pipeline(config::PipelineConfig cfg);

  // Runs one stage, or every stage in order for "all". Throws
  // PreconditionError or ConfigError on invocation problems; per-item
  // failures are reported in the summaries instead.
  std::vector<StageSummary> run(const std::string& stage, const RunOptions& opts);

  const config::PipelineConfig& config() const { return cfg_; }

 private:
  StageSummary run_ingest(const RunOptions& opts);
  StageSummary run_ocr(const RunOptions& opts);
  StageSummary run_segment(const RunOptions& opts);
  StageSummary run_extract(const RunOptions& opts);
  StageSummary run_link(const RunOptions& opts);
  StageSummary run_evaluate(const RunOptions& opts);

  std::filesystem::path dir(const char* name) const;
  int effective_jobs(const RunOptions& opts) const;
  std::vector<config::VolumeConfig> selected_volumes(const RunOptions& opts) const;

  config::PipelineConfig cfg_;
};

}  // namespace histrec::pipeline
