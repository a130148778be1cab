#include "histrec/ocr.hpp"

#include "histrec/errors.hpp"
#include "histrec/subprocess.hpp"
#include "histrec/text.hpp"

namespace fs = std::filesystem;

namespace histrec::ocr {

void OcrConfig::validate() const {
  if (engine_path.empty()) throw ConfigError("ocr engine_path must not be empty");
  if (page_segmentation_mode < 0 || page_segmentation_mode > 13)
    throw ConfigError("page_segmentation_mode must be in [0,13], got " +
                      std::to_string(page_segmentation_mode));
}

std::string PageText::joined() const {
  std::string out;
  for (const auto& line : lines) {
    out += line;
    out += '\n';
  }
  return out;
}

std::vector<std::string> engine_arguments(const fs::path& image_path, const OcrConfig& cfg) {
  std::vector<std::string> args{cfg.engine_path, image_path.string(), "stdout"};
  if (cfg.trained_data_path) {
    // A custom .traineddata file is addressed the way Tesseract expects:
    // its directory via --tessdata-dir and its stem as the language name.
    args.push_back("-l");
    args.push_back(cfg.trained_data_path->stem().string());
    args.push_back("--tessdata-dir");
    args.push_back(cfg.trained_data_path->parent_path().string());
  } else {
    args.push_back("-l");
    args.push_back(cfg.language);
  }
  args.push_back("--psm");
  args.push_back(std::to_string(cfg.page_segmentation_mode));
  if (cfg.wordlist_path) {
    args.push_back("--user-words");
    args.push_back(cfg.wordlist_path->string());
  }
  return args;
}

PageText recognize(const fs::path& image_path, const std::string& volume_id, int page_number,
                   const OcrConfig& cfg) {
  cfg.validate();
  if (!fs::exists(image_path))
    throw IoError("page image not found: " + image_path.string() + " (volume " + volume_id +
                  ", page " + std::to_string(page_number) + ")");

  auto result = run_subprocess(engine_arguments(image_path, cfg));
  if (result.exit_code == 127)
    throw IoError("OCR engine not found or not runnable: '" + cfg.engine_path + "': " +
                  result.err);
  if (result.exit_code != 0)
    throw IoError("OCR engine exited with status " + std::to_string(result.exit_code) +
                  " on page " + std::to_string(page_number) + " of " + volume_id + ": " +
                  result.err);

  // Validates UTF-8; throws DecodeError on undecodable engine output.
  text::decode_utf8(result.out, true);

  PageText page{volume_id, page_number, {}};
  if (!result.out.empty()) page.lines = text::split_lines(result.out);
  return page;
}

}  // namespace histrec::ocr
