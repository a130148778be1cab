#include "histrec/imaging.hpp"

#include <algorithm>
#include <cstdio>

#include <opencv2/imgcodecs.hpp>
#include <opencv2/imgproc.hpp>
#include <opencv2/photo.hpp>

#include "histrec/errors.hpp"
#include "histrec/subprocess.hpp"

namespace fs = std::filesystem;

namespace histrec::imaging {

void PreprocessConfig::validate() const {
  if (binarize_threshold <= 0 || binarize_threshold >= 255)
    throw ConfigError("binarize_threshold must be in (0,255), got " +
                      std::to_string(binarize_threshold));
  if (template_window <= 0 || template_window % 2 == 0)
    throw ConfigError("template_window must be odd and positive");
  if (search_window <= 0 || search_window % 2 == 0)
    throw ConfigError("search_window must be odd and positive");
}

DenoiseFilter denoise_filter_from_string(const std::string& name) {
  if (name == "nlmeans") return DenoiseFilter::NonLocalMeans;
  if (name == "median") return DenoiseFilter::Median;
  if (name == "box") return DenoiseFilter::Box;
  if (name == "none") return DenoiseFilter::None;
  throw ConfigError("unknown denoise_filter '" + name + "' (nlmeans|median|box|none)");
}

std::string to_string(DenoiseFilter f) {
  switch (f) {
    case DenoiseFilter::NonLocalMeans: return "nlmeans";
    case DenoiseFilter::Median: return "median";
    case DenoiseFilter::Box: return "box";
    case DenoiseFilter::None: return "none";
  }
  return "nlmeans";
}

std::string page_stem(const std::string& volume_id, int page_number) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04d", page_number);
  return volume_id + "_" + buf;
}

std::vector<PageImage> rasterize_pdf(const fs::path& pdf_path, const std::string& rasterizer_path,
                                     int dpi, const fs::path& out_dir,
                                     const std::string& volume_id) {
  if (dpi <= 0) throw ConfigError("dpi must be positive");
  if (!fs::exists(pdf_path))
    throw IoError("PDF not found: " + pdf_path.string() + " (volume " + volume_id + ")");
  fs::create_directories(out_dir);

  auto result = run_subprocess(
      {rasterizer_path, pdf_path.string(), out_dir.string(), volume_id, std::to_string(dpi)});
  if (result.exit_code == 127)
    throw IoError("rasterizer executable not found or not runnable: '" + rasterizer_path +
                  "' (volume " + volume_id + "): " + result.err);
  if (result.exit_code != 0)
    throw IoError("rasterizer exited with status " + std::to_string(result.exit_code) +
                  " for volume " + volume_id + ": " + result.err);

  // The rasterizer writes <volume>_<NNNN>.<ext>; collect and order numerically.
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(out_dir)) {
    if (!entry.is_regular_file()) continue;
    const std::string stem = entry.path().stem().string();
    if (stem.rfind(volume_id + "_", 0) != 0) continue;
    const std::string suffix = stem.substr(volume_id.size() + 1);
    if (suffix.empty() || !std::all_of(suffix.begin(), suffix.end(),
                                       [](char c) { return c >= '0' && c <= '9'; }))
      continue;
    files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  if (files.empty())
    throw IoError("rasterizer produced no page images for volume " + volume_id + " in " +
                  out_dir.string());

  std::vector<PageImage> pages;
  pages.reserve(files.size());
  int page_number = 1;
  for (const auto& f : files) {
    pages.push_back(load_page_image(f, volume_id, page_number, dpi));
    ++page_number;
  }
  return pages;
}

PageImage load_page_image(const fs::path& path, const std::string& volume_id, int page_number,
                          int dpi) {
  // Pages load as 3-channel BGR; the preprocessing chain starts from color.
  cv::Mat mat = cv::imread(path.string(), cv::IMREAD_COLOR);
  if (mat.empty())
    throw IoError("cannot read page image " + path.string() + " (volume " + volume_id + ", page " +
                  std::to_string(page_number) + ")");
  return PageImage{volume_id, page_number, dpi, mat};
}

void save_page_image(const PageImage& image, const fs::path& path) {
  fs::create_directories(path.parent_path());
  if (!cv::imwrite(path.string(), image.mat))
    throw IoError("cannot write page image " + path.string());
}

PageImage denoise(const PageImage& image, const PreprocessConfig& cfg) {
  cfg.validate();
  if (image.mat.channels() != 3)
    throw Error("denoise expects an RGB page (volume " + image.volume_id + ", page " +
                std::to_string(image.page_number) + ")");
  if (cfg.search_window > image.width() || cfg.search_window > image.height())
    throw Error("denoise search window exceeds image dimensions");

  // out.mat starts empty so OpenCV allocates a fresh buffer; a plain copy
  // would share pixels with the input and the transform would mutate it.
  PageImage out = image;
  out.mat = cv::Mat();
  switch (cfg.denoise_filter) {
    case DenoiseFilter::NonLocalMeans:
      cv::fastNlMeansDenoisingColored(image.mat, out.mat,
                                      static_cast<float>(cfg.denoise_strength),
                                      static_cast<float>(cfg.denoise_color_strength),
                                      cfg.template_window, cfg.search_window);
      break;
    case DenoiseFilter::Median:
      cv::medianBlur(image.mat, out.mat, cfg.template_window);
      break;
    case DenoiseFilter::Box:
      cv::blur(image.mat, out.mat, cv::Size(cfg.template_window, cfg.template_window));
      break;
    case DenoiseFilter::None:
      out.mat = image.mat.clone();
      break;
  }
  return out;
}

PageImage to_grayscale(const PageImage& image) {
  if (image.mat.channels() != 3)
    throw Error("to_grayscale expects an RGB page (volume " + image.volume_id + ", page " +
                std::to_string(image.page_number) + ")");
  PageImage out = image;
  out.mat = cv::Mat();
  cv::cvtColor(image.mat, out.mat, cv::COLOR_BGR2GRAY);
  return out;
}

PageImage binarize(const PageImage& image, int threshold) {
  if (image.mat.channels() != 1)
    throw Error("binarize expects a grayscale page (volume " + image.volume_id + ", page " +
                std::to_string(image.page_number) + ")");
  PageImage out = image;
  out.mat = cv::Mat();
  // value > threshold -> 255, else 0 (strict-greater).
  cv::threshold(image.mat, out.mat, threshold, 255, cv::THRESH_BINARY);
  return out;
}

PageImage preprocess(const PageImage& image, const PreprocessConfig& cfg) {
  return binarize(to_grayscale(denoise(image, cfg)), cfg.binarize_threshold);
}

}  // namespace histrec::imaging
