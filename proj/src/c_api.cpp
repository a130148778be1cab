#include "histrec.h"

#include <functional>
#include <new>
#include <optional>
#include <string>

#include "histrec/errors.hpp"
#include "histrec/pipeline.hpp"

using histrec::config::PipelineConfig;
using histrec::pipeline::Pipeline;
using histrec::pipeline::PreconditionError;
using histrec::pipeline::RunOptions;

struct hr_pipeline {
  std::optional<Pipeline> pipeline;
  std::string last_error;
  std::string last_summary;
};

namespace {

hr_status open_with(hr_pipeline** out, const std::function<PipelineConfig()>& load) {
  if (out == nullptr) return HR_EINVAL;
  auto* handle = new (std::nothrow) hr_pipeline();
  *out = handle;
  if (handle == nullptr) return HR_EFAILED;
  try {
    handle->pipeline.emplace(load());
    return HR_OK;
  } catch (const histrec::ConfigError& e) {
    handle->last_error = e.what();
    return HR_ECONFIG;
  } catch (const std::exception& e) {
    handle->last_error = e.what();
    return HR_EFAILED;
  }
}

}  // namespace

extern "C" {

const char* hr_version(void) { return "0.1.0"; }

hr_status hr_pipeline_open(const char* config_path, hr_pipeline** out) {
  if (config_path == nullptr) return HR_EINVAL;
  return open_with(out, [&] { return PipelineConfig::load_file(config_path); });
}

hr_status hr_pipeline_open_json(const char* config_json, const char* base_dir, hr_pipeline** out) {
  if (config_json == nullptr) return HR_EINVAL;
  return open_with(out, [&] {
    histrec::records::json doc;
    try {
      doc = histrec::records::json::parse(config_json);
    } catch (const histrec::records::json::parse_error& e) {
      throw histrec::ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    std::filesystem::path base = base_dir ? base_dir : ".";
    return PipelineConfig::load_json(doc, base);
  });
}

void hr_pipeline_close(hr_pipeline* pipeline) { delete pipeline; }

hr_status hr_run_stage(hr_pipeline* pipeline, const char* stage, const hr_run_options* options) {
  if (pipeline == nullptr) return HR_EINVAL;
  pipeline->last_error.clear();
  pipeline->last_summary.clear();
  if (stage == nullptr) {
    pipeline->last_error = "stage must not be NULL";
    return HR_EINVAL;
  }
  if (!pipeline->pipeline) {
    pipeline->last_error = "pipeline was not opened successfully";
    return HR_EINVAL;
  }

  RunOptions opts;
  if (options != nullptr) {
    if (options->volume != nullptr) opts.volume = options->volume;
    if (options->ground_truth_dir != nullptr) opts.ground_truth = options->ground_truth_dir;
    opts.force = options->force != 0;
    if (options->jobs > 0) opts.jobs = options->jobs;
  }

  bool known = false;
  for (const char* name : histrec::pipeline::kStageNames)
    if (stage == std::string(name)) known = true;
  if (!known) {
    pipeline->last_error = "unknown stage '" + std::string(stage) + "'";
    return HR_EINVAL;
  }

  try {
    auto summaries = pipeline->pipeline->run(stage, opts);
    histrec::records::json arr = histrec::records::json::array();
    std::size_t failed = 0;
    for (const auto& s : summaries) {
      arr.push_back(s.to_json());
      failed += s.failed;
    }
    pipeline->last_summary = arr.dump(2);
    if (failed > 0) {
      pipeline->last_error = std::to_string(failed) + " item(s) failed; see summary";
      return HR_PARTIAL;
    }
    return HR_OK;
  } catch (const PreconditionError& e) {
    pipeline->last_error = e.what();
    return HR_ECONFIG;
  } catch (const histrec::ConfigError& e) {
    pipeline->last_error = e.what();
    return HR_ECONFIG;
  } catch (const std::exception& e) {
    pipeline->last_error = e.what();
    return HR_EFAILED;
  }
}

const char* hr_last_error(const hr_pipeline* pipeline) {
  return pipeline == nullptr ? "" : pipeline->last_error.c_str();
}

const char* hr_last_summary_json(const hr_pipeline* pipeline) {
  return pipeline == nullptr ? "" : pipeline->last_summary.c_str();
}

}  // extern "C"
