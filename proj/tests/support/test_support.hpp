#pragma once

// Shared helpers for the unit and acceptance suites: fixture access, temp
// directories, a minimal PDF writer, the synthetic demo corpus and a random
// record generator.

#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "histrec/extractor.hpp"
#include "histrec/records.hpp"

namespace histrec::testing {

std::filesystem::path fixture_dir();
std::filesystem::path stub_ocr_path();
std::filesystem::path stub_rasterizer_path();
std::filesystem::path cli_path();

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& content);
records::json load_json(const std::filesystem::path& path);

// Unique directory under the build tree, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& label);
  ~TempDir();

  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

// Minimal uncompressed PDF with `pages` pages and the given MediaBox size
// in points.
void write_pdf(const std::filesystem::path& path, int pages, double width_pt = 612.0,
               double height_pt = 792.0);

// Scoped environment variable.
class EnvVar {
 public:
  EnvVar(const std::string& name, const std::string& value);
  ~EnvVar();

 private:
  std::string name_;
};

std::string appendix_f_text();
records::json appendix_g_json();

// The six-page, three-person demo corpus driving segmentation and
// end-to-end tests.
struct DemoCorpus {
  std::vector<std::string> page_texts;                 // index 0 = page 1
  std::vector<std::string> person_keys;                // ALDERSHOF, BEECKMAN, COOLHAES
  std::vector<std::string> person_texts;               // expected per-person partition
  std::vector<records::json> person_records;           // replay responses (wire form)
};

DemoCorpus demo_corpus();

// Replay map entry for one person text.
void add_replay_entry(records::json& replay, const std::string& person_text,
                      const records::json& response);

// Valid-by-construction random records for round-trip and property tests.
records::PersonRecord random_record(std::mt19937& rng);

// A ready-to-run workspace for the demo corpus: fixture PDF, stub OCR
// sidecar texts, replay file, pipeline config and labeled ground truth.
// Runs need STUB_OCR_TEXT_DIR pointed at `ocr_text_dir` (see EnvVar).
struct DemoWorkspace {
  std::filesystem::path root;
  std::filesystem::path config_path;
  std::filesystem::path workdir;
  std::filesystem::path ocr_text_dir;
  std::filesystem::path ground_truth_dir;
  DemoCorpus corpus;
};

DemoWorkspace setup_demo_workspace(const std::filesystem::path& root);

}  // namespace histrec::testing
