#pragma once

// Single JSON configuration document driving the pipeline. Secrets never
// live in the file; the extractor api_key is read from the environment
// variable named by `api_key_env`.

#include <filesystem>
#include <string>
#include <vector>

#include "histrec/extractor.hpp"
#include "histrec/imaging.hpp"
#include "histrec/ocr.hpp"

namespace histrec::config {

struct VolumeConfig {
  std::string id;
  std::filesystem::path pdf;
};

enum class ExtractorBackend { Replay, Http };

struct PipelineConfig {
  std::filesystem::path workdir;
  std::vector<VolumeConfig> volumes;
  int jobs = 1;
  std::string log_level = "info";

  std::string rasterizer_path;
  int dpi = 300;
  imaging::PreprocessConfig preprocess;

  ocr::OcrConfig ocr;

  ExtractorBackend extractor_backend = ExtractorBackend::Replay;
  extract::ExtractorConfig extractor;
  std::filesystem::path replay_path;

  std::string store_path;  // sqlite file; defaults to <workdir>/links/store.db

  // Relative paths in the file resolve against its directory.
  static PipelineConfig load_file(const std::filesystem::path& path);
  static PipelineConfig load_json(const records::json& doc,
                                  const std::filesystem::path& base_dir);

  void validate() const;  // throws ConfigError
};

}  // namespace histrec::config
