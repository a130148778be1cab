#include "histrec/config.hpp"

#include <cstdlib>
#include <fstream>

#include "histrec/errors.hpp"

namespace fs = std::filesystem;

namespace histrec::config {

namespace {

using records::json;

const json* member(const json& obj, const char* key) {
  auto it = obj.find(key);
  return it == obj.end() || it->is_null() ? nullptr : &*it;
}

std::string require_string(const json& obj, const char* key, const std::string& context) {
  const json* v = member(obj, key);
  if (v == nullptr || !v->is_string() || v->get<std::string>().empty())
    throw ConfigError(context + ": '" + key + "' must be a non-empty string");
  return v->get<std::string>();
}

std::string optional_string(const json& obj, const char* key, const std::string& fallback) {
  const json* v = member(obj, key);
  if (v == nullptr) return fallback;
  if (!v->is_string()) throw ConfigError(std::string("'" ) + key + "' must be a string");
  return v->get<std::string>();
}

double optional_number(const json& obj, const char* key, double fallback) {
  const json* v = member(obj, key);
  if (v == nullptr) return fallback;
  if (!v->is_number()) throw ConfigError(std::string("'") + key + "' must be a number");
  return v->get<double>();
}

int optional_int(const json& obj, const char* key, int fallback) {
  const json* v = member(obj, key);
  if (v == nullptr) return fallback;
  if (!v->is_number_integer()) throw ConfigError(std::string("'") + key + "' must be an integer");
  return v->get<int>();
}

fs::path resolve(const fs::path& base, const fs::path& p) {
  return p.is_absolute() ? p : base / p;
}

}  // namespace

PipelineConfig PipelineConfig::load_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  json doc;
  try {
    in >> doc;
  } catch (const json::parse_error& e) {
    throw ConfigError("config file " + path.string() + " is not valid JSON: " + e.what());
  }
  return load_json(doc, fs::absolute(path).parent_path());
}

PipelineConfig PipelineConfig::load_json(const json& doc, const fs::path& base_dir) {
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");
  PipelineConfig cfg;

  cfg.workdir = resolve(base_dir, require_string(doc, "workdir", "config"));
  cfg.jobs = optional_int(doc, "jobs", 1);
  if (cfg.jobs < 1) throw ConfigError("'jobs' must be >= 1");
  cfg.log_level = optional_string(doc, "log_level", "info");

  const json* volumes = member(doc, "volumes");
  if (volumes == nullptr || !volumes->is_array() || volumes->empty())
    throw ConfigError("config: 'volumes' must be a non-empty array");
  for (const auto& v : *volumes) {
    if (!v.is_object()) throw ConfigError("config: each volume must be an object");
    VolumeConfig vol;
    vol.id = require_string(v, "id", "volume");
    if (vol.id.find('_') != std::string::npos || vol.id.find('/') != std::string::npos)
      throw ConfigError("volume id '" + vol.id + "' must not contain '_' or '/'");
    if (const json* pdf = member(v, "pdf")) {
      if (!pdf->is_string()) throw ConfigError("volume 'pdf' must be a string");
      vol.pdf = resolve(base_dir, pdf->get<std::string>());
    }
    cfg.volumes.push_back(std::move(vol));
  }

  if (const json* imaging_cfg = member(doc, "imaging")) {
    cfg.rasterizer_path = optional_string(*imaging_cfg, "rasterizer_path", "");
    cfg.dpi = optional_int(*imaging_cfg, "dpi", 300);
    auto& p = cfg.preprocess;
    p.denoise_strength = optional_number(*imaging_cfg, "denoise_strength", p.denoise_strength);
    p.denoise_color_strength =
        optional_number(*imaging_cfg, "denoise_color_strength", p.denoise_color_strength);
    p.template_window = optional_int(*imaging_cfg, "denoise_template_window", p.template_window);
    p.search_window = optional_int(*imaging_cfg, "denoise_search_window", p.search_window);
    p.binarize_threshold = optional_int(*imaging_cfg, "binarize_threshold", p.binarize_threshold);
    p.denoise_filter = imaging::denoise_filter_from_string(
        optional_string(*imaging_cfg, "denoise_filter", "nlmeans"));
  }

  if (const json* ocr_cfg = member(doc, "ocr")) {
    cfg.ocr.engine_path = optional_string(*ocr_cfg, "engine_path", cfg.ocr.engine_path);
    cfg.ocr.language = optional_string(*ocr_cfg, "language", cfg.ocr.language);
    cfg.ocr.page_segmentation_mode =
        optional_int(*ocr_cfg, "page_segmentation_mode", cfg.ocr.page_segmentation_mode);
    if (const json* v = member(*ocr_cfg, "trained_data_path")) {
      if (!v->is_string()) throw ConfigError("'trained_data_path' must be a string");
      cfg.ocr.trained_data_path = resolve(base_dir, v->get<std::string>());
    }
    if (const json* v = member(*ocr_cfg, "wordlist_path")) {
      if (!v->is_string()) throw ConfigError("'wordlist_path' must be a string");
      cfg.ocr.wordlist_path = resolve(base_dir, v->get<std::string>());
    }
  }

  if (const json* ex = member(doc, "extractor")) {
    const std::string backend = optional_string(*ex, "backend", "replay");
    if (backend == "replay") {
      cfg.extractor_backend = ExtractorBackend::Replay;
    } else if (backend == "http") {
      cfg.extractor_backend = ExtractorBackend::Http;
    } else {
      throw ConfigError("extractor 'backend' must be \"replay\" or \"http\"");
    }
    cfg.extractor.model_name = optional_string(*ex, "model_name", cfg.extractor.model_name);
    cfg.extractor.temperature = optional_number(*ex, "temperature", cfg.extractor.temperature);
    cfg.extractor.max_retries = optional_int(*ex, "max_retries", cfg.extractor.max_retries);
    cfg.extractor.endpoint_url = optional_string(*ex, "endpoint_url", "");
    if (const json* v = member(*ex, "replay_path")) {
      if (!v->is_string()) throw ConfigError("'replay_path' must be a string");
      cfg.replay_path = resolve(base_dir, v->get<std::string>());
    }
    const std::string key_env = optional_string(*ex, "api_key_env", "HISTREC_API_KEY");
    if (const char* key = std::getenv(key_env.c_str())) cfg.extractor.api_key = key;
  }

  cfg.store_path = optional_string(doc, "store", "");
  if (!cfg.store_path.empty() && cfg.store_path != ":memory:")
    cfg.store_path = resolve(base_dir, cfg.store_path).string();

  cfg.validate();
  return cfg;
}

void PipelineConfig::validate() const {
  if (workdir.empty()) throw ConfigError("workdir must be set");
  if (dpi <= 0) throw ConfigError("dpi must be positive");
  preprocess.validate();
  ocr.validate();
  extractor.validate();
  if (extractor_backend == ExtractorBackend::Replay && replay_path.empty())
    throw ConfigError("replay backend requires 'replay_path'");
  if (extractor_backend == ExtractorBackend::Http && extractor.endpoint_url.empty())
    throw ConfigError("http backend requires 'endpoint_url'");
}

}  // namespace histrec::config
