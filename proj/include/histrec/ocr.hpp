#pragma once

// Adapter around an external OCR engine invoked per page image. The argument
// contract follows the common `<engine> <image> stdout -l <lang> --psm <n>`
// convention, so a stock Tesseract install works unmodified and the test
// suite can substitute a stub executable.

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace histrec::ocr {

struct OcrConfig {
  std::string engine_path = "tesseract";
  std::string language = "nld";
  int page_segmentation_mode = 4;  // single column of variable-size text
  std::optional<std::filesystem::path> trained_data_path;
  std::optional<std::filesystem::path> wordlist_path;

  void validate() const;  // throws ConfigError (PSM must be in [0,13])
};

struct PageText {
  std::string volume_id;
  int page_number = 0;
  std::vector<std::string> lines;  // top-to-bottom reading order

  // Lines joined with '\n', one trailing newline when non-empty. The
  // segmenter relies on this form for its lossless-partition invariant.
  std::string joined() const;
};

// Builds the engine argument vector for one image; exposed for tests.
std::vector<std::string> engine_arguments(const std::filesystem::path& image_path,
                                          const OcrConfig& cfg);

// Runs the engine on one page image and splits its UTF-8 stdout into lines.
// The adapter does not alter the engine text beyond line splitting.
PageText recognize(const std::filesystem::path& image_path, const std::string& volume_id,
                   int page_number, const OcrConfig& cfg);

}  // namespace histrec::ocr
