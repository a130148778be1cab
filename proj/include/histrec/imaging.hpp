#pragma once

// Page rasterization and the three-step preprocessing chain that feeds OCR:
// denoise -> grayscale -> binarize. Rasterization shells out to a configured
// external executable; everything else is an in-process OpenCV transform.

#include <filesystem>
#include <string>
#include <vector>

#include <opencv2/core.hpp>

namespace histrec::imaging {

struct PageImage {
  std::string volume_id;
  int page_number = 0;  // 1-based, document order
  int dpi = 0;
  cv::Mat mat;          // BGR 8UC3 before grayscale, 8UC1 after

  int width() const { return mat.cols; }
  int height() const { return mat.rows; }
  bool is_grayscale() const { return mat.channels() == 1; }
};

enum class DenoiseFilter { NonLocalMeans, Median, Box, None };

struct PreprocessConfig {
  double denoise_strength = 5.0;
  double denoise_color_strength = 5.0;
  int template_window = 7;
  int search_window = 21;
  int binarize_threshold = 200;
  DenoiseFilter denoise_filter = DenoiseFilter::NonLocalMeans;

  void validate() const;  // throws ConfigError on out-of-domain values
};

DenoiseFilter denoise_filter_from_string(const std::string& name);
std::string to_string(DenoiseFilter f);

// Invokes the configured rasterizer executable as
//   <rasterizer> <pdf> <out_dir> <prefix> <dpi>
// and loads the page files it wrote (<prefix>_0001.<ext>, ...), numbered
// from 1 in document order.
std::vector<PageImage> rasterize_pdf(const std::filesystem::path& pdf_path,
                                     const std::string& rasterizer_path, int dpi,
                                     const std::filesystem::path& out_dir,
                                     const std::string& volume_id);

PageImage denoise(const PageImage& image, const PreprocessConfig& cfg);
PageImage to_grayscale(const PageImage& image);
PageImage binarize(const PageImage& image, int threshold);

// denoise + grayscale + binarize with the config's parameters.
PageImage preprocess(const PageImage& image, const PreprocessConfig& cfg);

PageImage load_page_image(const std::filesystem::path& path, const std::string& volume_id,
                          int page_number, int dpi);
void save_page_image(const PageImage& image, const std::filesystem::path& path);

// `<volume>_<page:04d>` stem used for page files on disk; keeps
// numeric sorting deterministic for the segmenter.
std::string page_stem(const std::string& volume_id, int page_number);

}  // namespace histrec::imaging
