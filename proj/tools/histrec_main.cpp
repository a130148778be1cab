// Command-line front end; drives the pipeline exclusively through the C API
// in histrec.h.

#include <histrec.h>

#include <cstdio>
#include <memory>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitPartialFailure = 1;
constexpr int kExitInvalidInvocation = 2;

struct PipelineCloser {
  void operator()(hr_pipeline* p) const { hr_pipeline_close(p); }
};

void print_summary(const char* summary_json) {
  if (summary_json == nullptr || summary_json[0] == '\0') return;
  auto summaries = nlohmann::json::parse(summary_json, nullptr, false);
  if (summaries.is_discarded() || !summaries.is_array()) return;
  for (const auto& s : summaries) {
    std::printf("%-8s  processed=%llu  skipped=%llu  failed=%llu\n",
                s.value("stage", std::string("?")).c_str(),
                static_cast<unsigned long long>(s.value("processed", 0ULL)),
                static_cast<unsigned long long>(s.value("skipped", 0ULL)),
                static_cast<unsigned long long>(s.value("failed", 0ULL)));
    for (const auto& e : s.value("errors", nlohmann::json::array()))
      std::fprintf(stderr, "  failed %s: %s\n", e.value("item", std::string("?")).c_str(),
                   e.value("message", std::string("?")).c_str());
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Convert scanned biographical registers into linked person records"};
  app.require_subcommand(1);
  app.fallthrough();  // global options may follow the subcommand
  app.failure_message(CLI::FailureMessage::help);

  std::string config_path;
  std::string volume;
  std::string ground_truth;
  bool force = false;
  int jobs = 0;

  app.add_option("--config", config_path, "Pipeline configuration file (JSON)")
      ->required()
      ->check(CLI::ExistingFile);
  app.add_option("--volume", volume, "Restrict the run to one volume id");
  app.add_flag("--force", force, "Redo work whose outputs already exist");
  app.add_option("--jobs", jobs, "Parallel workers (overrides the config)")
      ->check(CLI::PositiveNumber);
  app.add_option("--ground-truth", ground_truth,
                 "Labeled ground-truth directory (evaluate / all)")
      ->check(CLI::ExistingDirectory);

  const char* stage_help[] = {
      "Rasterize PDFs and preprocess page images",
      "Run the OCR engine over page images",
      "Split page text into per-person documents",
      "Extract person records via the configured LLM backend",
      "Link records into the person store",
      "Score pipeline output against labeled ground truth",
      "Run every stage in order",
  };
  const char* stage_names[] = {"ingest", "ocr", "segment", "extract", "link", "evaluate", "all"};
  for (int i = 0; i < 7; ++i) app.add_subcommand(stage_names[i], stage_help[i]);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return e.get_exit_code() == 0 ? kExitOk : kExitInvalidInvocation;
  }

  const std::string stage = app.get_subcommands().front()->get_name();

  hr_pipeline* raw = nullptr;
  hr_status status = hr_pipeline_open(config_path.c_str(), &raw);
  std::unique_ptr<hr_pipeline, PipelineCloser> pipeline(raw);
  if (status != HR_OK) {
    std::fprintf(stderr, "error: %s\n", pipeline ? hr_last_error(pipeline.get()) : "out of memory");
    return kExitInvalidInvocation;
  }

  hr_run_options options{};
  options.volume = volume.empty() ? nullptr : volume.c_str();
  options.ground_truth_dir = ground_truth.empty() ? nullptr : ground_truth.c_str();
  options.force = force ? 1 : 0;
  options.jobs = jobs;

  status = hr_run_stage(pipeline.get(), stage.c_str(), &options);
  print_summary(hr_last_summary_json(pipeline.get()));

  switch (status) {
    case HR_OK:
      return kExitOk;
    case HR_PARTIAL:
      std::fprintf(stderr, "error: %s\n", hr_last_error(pipeline.get()));
      return kExitPartialFailure;
    case HR_EFAILED:
      std::fprintf(stderr, "error: %s\n", hr_last_error(pipeline.get()));
      return kExitPartialFailure;
    case HR_EINVAL:
    case HR_ECONFIG:
    default:
      std::fprintf(stderr, "error: %s\n", hr_last_error(pipeline.get()));
      return kExitInvalidInvocation;
  }
}
