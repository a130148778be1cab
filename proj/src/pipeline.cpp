#include "histrec/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <thread>

#include "histrec/errors.hpp"
#include "histrec/imaging.hpp"
#include "histrec/linker.hpp"
#include "histrec/log.hpp"
#include "histrec/metrics.hpp"
#include "histrec/segmenter.hpp"
#include "histrec/store.hpp"
#include "histrec/text.hpp"

namespace fs = std::filesystem;

namespace histrec::pipeline {

using records::json;

const char* const kStageNames[7] = {"ingest", "ocr",  "segment", "extract",
                                    "link",   "evaluate", "all"};

namespace {

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return content;
}

void write_file(const fs::path& path, const std::string& content) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << content;
  if (!out) throw IoError("write failed for " + path.string());
}

void write_json_file(const fs::path& path, const json& doc) {
  write_file(path, doc.dump(2) + "\n");
}

json load_json_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  try {
    json doc;
    in >> doc;
    return doc;
  } catch (const json::parse_error& e) {
    throw IoError(path.string() + " is not valid JSON: " + e.what());
  }
}

std::string stem_volume(const std::string& stem) {
  auto pos = stem.find('_');
  return pos == std::string::npos ? stem : stem.substr(0, pos);
}

std::string stem_rest(const std::string& stem) {
  auto pos = stem.find('_');
  return pos == std::string::npos ? "" : stem.substr(pos + 1);
}

bool is_preamble_stem(const std::string& stem) { return stem_rest(stem).rfind('_', 0) == 0; }

// Files named <volume>_<suffix>.<ext> directly inside `dir`, sorted by name.
std::vector<fs::path> volume_files(const fs::path& dir, const std::string& volume_id,
                                   const std::string& ext) {
  std::vector<fs::path> out;
  if (!fs::exists(dir)) return out;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file() || entry.path().extension() != ext) continue;
    const std::string stem = entry.path().stem().string();
    if (volume_id.empty() || stem_volume(stem) == volume_id) out.push_back(entry.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

// Runs fn(i) for i in [0,n) on up to `jobs` threads; collects error text.
std::vector<std::pair<std::size_t, std::string>> for_each_parallel(
    std::size_t n, int jobs, const std::function<void(std::size_t)>& fn) {
  std::vector<std::pair<std::size_t, std::string>> errors;
  if (n == 0) return errors;
  jobs = std::max(1, std::min<int>(jobs, static_cast<int>(n)));

  if (jobs == 1) {
    for (std::size_t i = 0; i < n; ++i) {
      try {
        fn(i);
      } catch (const std::exception& e) {
        errors.emplace_back(i, e.what());
      }
    }
    return errors;
  }

  std::atomic<std::size_t> next{0};
  std::mutex mutex;
  std::vector<std::thread> workers;
  workers.reserve(static_cast<std::size_t>(jobs));
  for (int t = 0; t < jobs; ++t) {
    workers.emplace_back([&] {
      while (true) {
        std::size_t i = next.fetch_add(1);
        if (i >= n) return;
        try {
          fn(i);
        } catch (const std::exception& e) {
          std::lock_guard<std::mutex> lock(mutex);
          errors.emplace_back(i, e.what());
        }
      }
    });
  }
  for (auto& w : workers) w.join();
  std::sort(errors.begin(), errors.end());
  return errors;
}

int parse_page_number(const std::string& stem) {
  const std::string rest = stem_rest(stem);
  if (rest.empty() || !std::all_of(rest.begin(), rest.end(),
                                   [](char c) { return c >= '0' && c <= '9'; }))
    return -1;
  return std::stoi(rest);
}

}  // namespace

json StageSummary::to_json() const {
  json errs = json::array();
  for (const auto& e : errors) errs.push_back(json{{"item", e.item}, {"message", e.message}});
  return json{{"stage", stage},
              {"processed", processed},
              {"skipped", skipped},
              {"failed", failed},
              {"errors", errs}};
}

Pipeline::Pipeline(config::PipelineConfig cfg) : cfg_(std::move(cfg)) {
  log::set_level(log::level_from_string(cfg_.log_level));
}

fs::path Pipeline::dir(const char* name) const { return cfg_.workdir / name; }

int Pipeline::effective_jobs(const RunOptions& opts) const {
  return opts.jobs.value_or(cfg_.jobs);
}

std::vector<config::VolumeConfig> Pipeline::selected_volumes(const RunOptions& opts) const {
  if (!opts.volume) return cfg_.volumes;
  for (const auto& v : cfg_.volumes)
    if (v.id == *opts.volume) return {v};
  throw ConfigError("unknown volume '" + *opts.volume + "'");
}

std::vector<StageSummary> Pipeline::run(const std::string& stage, const RunOptions& opts) {
  fs::create_directories(cfg_.workdir);
  for (const char* d : {"pages", "text", "persons", "records", "links", "reports"})
    fs::create_directories(dir(d));

  std::vector<StageSummary> summaries;
  if (stage == "all") {
    summaries.push_back(run_ingest(opts));
    summaries.push_back(run_ocr(opts));
    summaries.push_back(run_segment(opts));
    summaries.push_back(run_extract(opts));
    summaries.push_back(run_link(opts));
    if (opts.ground_truth) summaries.push_back(run_evaluate(opts));
    return summaries;
  }
  if (stage == "ingest") {
    summaries.push_back(run_ingest(opts));
  } else if (stage == "ocr") {
    summaries.push_back(run_ocr(opts));
  } else if (stage == "segment") {
    summaries.push_back(run_segment(opts));
  } else if (stage == "extract") {
    summaries.push_back(run_extract(opts));
  } else if (stage == "link") {
    summaries.push_back(run_link(opts));
  } else if (stage == "evaluate") {
    summaries.push_back(run_evaluate(opts));
  } else {
    throw ConfigError("unknown stage '" + stage + "'");
  }
  return summaries;
}

StageSummary Pipeline::run_ingest(const RunOptions& opts) {
  StageSummary summary{"ingest"};
  for (const auto& volume : selected_volumes(opts)) {
    if (!opts.force && !volume_files(dir("pages"), volume.id, ".png").empty()) {
      summary.skipped += 1;
      log::info("ingest: pages for " + volume.id + " exist, skipping");
      continue;
    }
    try {
      if (volume.pdf.empty())
        throw ConfigError("volume '" + volume.id + "' has no pdf configured");
      if (cfg_.rasterizer_path.empty())
        throw ConfigError("imaging 'rasterizer_path' is not configured");

      const fs::path raw_dir = dir("pages") / "raw" / volume.id;
      fs::remove_all(raw_dir);
      auto pages =
          imaging::rasterize_pdf(volume.pdf, cfg_.rasterizer_path, cfg_.dpi, raw_dir, volume.id);

      auto errors = for_each_parallel(
          pages.size(), effective_jobs(opts), [&](std::size_t i) {
            imaging::PageImage processed = imaging::preprocess(pages[i], cfg_.preprocess);
            save_page_image(processed,
                            dir("pages") / (imaging::page_stem(volume.id, pages[i].page_number) +
                                            ".png"));
          });
      summary.processed += pages.size() - errors.size();
      for (const auto& [i, msg] : errors) {
        summary.failed += 1;
        summary.errors.push_back({imaging::page_stem(volume.id, pages[i].page_number), msg});
      }
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception& e) {
      summary.failed += 1;
      summary.errors.push_back({volume.id, e.what()});
    }
  }
  return summary;
}

StageSummary Pipeline::run_ocr(const RunOptions& opts) {
  StageSummary summary{"ocr"};
  std::vector<fs::path> images;
  for (const auto& volume : selected_volumes(opts)) {
    auto files = volume_files(dir("pages"), volume.id, ".png");
    images.insert(images.end(), files.begin(), files.end());
  }
  if (images.empty())
    throw PreconditionError("ocr: no page images under " + dir("pages").string() +
                            "; run ingest first");

  std::vector<fs::path> todo;
  for (const auto& image : images) {
    const fs::path out = dir("text") / (image.stem().string() + ".txt");
    if (!opts.force && fs::exists(out)) {
      summary.skipped += 1;
      continue;
    }
    todo.push_back(image);
  }

  std::mutex mutex;
  auto errors = for_each_parallel(todo.size(), effective_jobs(opts), [&](std::size_t i) {
    const std::string stem = todo[i].stem().string();
    auto page = ocr::recognize(todo[i], stem_volume(stem), parse_page_number(stem), cfg_.ocr);
    write_file(dir("text") / (stem + ".txt"), page.joined());
    std::lock_guard<std::mutex> lock(mutex);
    summary.processed += 1;
  });
  for (const auto& [i, msg] : errors) {
    summary.failed += 1;
    summary.errors.push_back({todo[i].stem().string(), msg});
  }
  return summary;
}

StageSummary Pipeline::run_segment(const RunOptions& opts) {
  StageSummary summary{"segment"};
  bool any_input = false;
  for (const auto& volume : selected_volumes(opts)) {
    auto files = volume_files(dir("text"), volume.id, ".txt");
    if (files.empty()) continue;
    any_input = true;

    if (!opts.force && !volume_files(dir("persons"), volume.id, ".txt").empty()) {
      summary.skipped += 1;
      log::info("segment: person files for " + volume.id + " exist, skipping");
      continue;
    }

    try {
      std::vector<ocr::PageText> pages;
      for (const auto& f : files) {
        ocr::PageText page;
        page.volume_id = volume.id;
        page.page_number = parse_page_number(f.stem().string());
        page.lines = text::split_lines(read_file(f));
        pages.push_back(std::move(page));
      }
      std::sort(pages.begin(), pages.end(),
                [](const auto& a, const auto& b) { return a.page_number < b.page_number; });

      auto result = segment::segment(pages);
      for (const auto& person : result.persons) {
        write_file(dir("persons") / (volume.id + "_" + person.person_key + ".txt"), person.text);
        summary.processed += 1;
      }
      if (result.preamble)
        write_file(dir("persons") / (volume.id + "__preamble.txt"), result.preamble->text);
    } catch (const std::exception& e) {
      summary.failed += 1;
      summary.errors.push_back({volume.id, e.what()});
    }
  }
  if (!any_input)
    throw PreconditionError("segment: no page text under " + dir("text").string() +
                            "; run ocr first");
  return summary;
}

StageSummary Pipeline::run_extract(const RunOptions& opts) {
  StageSummary summary{"extract"};
  std::vector<fs::path> persons;
  for (const auto& volume : selected_volumes(opts)) {
    for (const auto& f : volume_files(dir("persons"), volume.id, ".txt"))
      if (!is_preamble_stem(f.stem().string())) persons.push_back(f);
  }
  if (persons.empty())
    throw PreconditionError("extract: no person files under " + dir("persons").string() +
                            "; run segment first");

  std::unique_ptr<extract::LlmClient> client;
  if (cfg_.extractor_backend == config::ExtractorBackend::Replay) {
    client = extract::ReplayLlmClient::from_file(cfg_.replay_path);
  } else {
    client = std::make_unique<extract::HttpLlmClient>(cfg_.extractor);
  }

  std::vector<fs::path> todo;
  for (const auto& f : persons) {
    const fs::path out = dir("records") / (f.stem().string() + ".json");
    if (!opts.force && fs::exists(out)) {
      summary.skipped += 1;
      continue;
    }
    todo.push_back(f);
  }

  std::mutex mutex;
  auto errors = for_each_parallel(todo.size(), effective_jobs(opts), [&](std::size_t i) {
    const std::string stem = todo[i].stem().string();
    const std::string person_info = read_file(todo[i]);
    auto outcome = extract::extract(person_info, *client, cfg_.extractor);
    write_json_file(dir("records") / (stem + ".json"), records::to_wire_json(outcome.record));
    std::lock_guard<std::mutex> lock(mutex);
    summary.processed += 1;
    if (outcome.attempts > 1)
      log::info("extract: " + stem + " needed " + std::to_string(outcome.attempts) + " attempts");
  });
  for (const auto& [i, msg] : errors) {
    summary.failed += 1;
    summary.errors.push_back({todo[i].stem().string(), msg});
  }
  return summary;
}

StageSummary Pipeline::run_link(const RunOptions& opts) {
  StageSummary summary{"link"};
  const fs::path decisions_path = dir("links") / "decisions.json";

  std::vector<fs::path> recs;
  for (const auto& volume : selected_volumes(opts)) {
    for (const auto& f : volume_files(dir("records"), volume.id, ".json"))
      recs.push_back(f);
  }
  if (recs.empty())
    throw PreconditionError("link: no records under " + dir("records").string() +
                            "; run extract first");
  std::sort(recs.begin(), recs.end());

  if (!opts.force && fs::exists(decisions_path)) {
    summary.skipped = recs.size();
    log::info("link: " + decisions_path.string() + " exists, skipping");
    return summary;
  }

  const std::string store_path =
      cfg_.store_path.empty() ? (dir("links") / "store.db").string() : cfg_.store_path;
  store::SqliteStore store(store_path);
  linkage::Linker linker(store);

  metrics::LinkOutcomeMap decisions;
  for (const auto& f : recs) {
    const std::string stem = f.stem().string();
    try {
      auto result = records::validate(load_json_file(f));
      auto* record = std::get_if<records::PersonRecord>(&result);
      if (record == nullptr) {
        const auto& issues = std::get<std::vector<records::ValidationIssue>>(result);
        std::string msg = "record does not validate: ";
        for (std::size_t i = 0; i < issues.size(); ++i)
          msg += (i > 0 ? "; " : "") + issues[i].to_string();
        throw Error(msg);
      }
      auto decision = linker.process(*record);
      decisions[stem] = metrics::LinkOutcome{decision.person_id, decision.new_person,
                                             decision.maybe_same_person};
      summary.processed += 1;
    } catch (const std::exception& e) {
      summary.failed += 1;
      summary.errors.push_back({stem, e.what()});
    }
  }
  write_json_file(decisions_path, metrics::link_outcomes_to_json(decisions));
  return summary;
}

namespace {

json text_metrics_json(const metrics::TextMetrics& m) {
  return json{{"cer", m.cer()},           {"wer", m.wer()},           {"char_edits", m.char_edits},
              {"word_edits", m.word_edits}, {"ref_chars", m.ref_chars}, {"ref_words", m.ref_words}};
}

json linkage_report_json(const metrics::LinkageReport& r) {
  return json{{"persons", r.persons},
              {"person_id_accuracy", r.person_id_accuracy},
              {"new_person_accuracy", r.new_person_accuracy},
              {"maybe_same_person_accuracy", r.maybe_same_person_accuracy},
              {"average", r.average},
              {"expected_new_persons", r.expected_new_persons},
              {"generated_new_persons", r.generated_new_persons}};
}

std::string csv_percent(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string csv_ratio(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

std::string pad(const std::string& s, std::size_t width) {
  return s.size() >= width ? s + " " : s + std::string(width - s.size(), ' ');
}

}  // namespace

StageSummary Pipeline::run_evaluate(const RunOptions& opts) {
  StageSummary summary{"evaluate"};
  if (!opts.ground_truth)
    throw ConfigError("evaluate requires a ground-truth directory (--ground-truth)");
  const fs::path gt = *opts.ground_truth;
  if (!fs::exists(gt)) throw ConfigError("ground-truth directory not found: " + gt.string());

  bool any_section = false;
  std::string human;  // reports/summary.txt

  // Text metrics: labeled person texts vs segmented OCR output.
  if (fs::exists(gt / "text")) {
    any_section = true;
    std::map<std::string, std::vector<metrics::TextMetrics>> per_volume;
    json documents = json::object();
    std::vector<metrics::TextMetrics> all;
    for (const auto& volume : selected_volumes(opts)) {
      for (const auto& ref_file : volume_files(gt / "text", volume.id, ".txt")) {
        const std::string stem = ref_file.stem().string();
        const fs::path hyp_file = dir("persons") / (stem + ".txt");
        try {
          if (!fs::exists(hyp_file))
            throw IoError("no pipeline output " + hyp_file.string() + " for labeled text");
          auto m = metrics::text_metrics(read_file(ref_file), read_file(hyp_file));
          per_volume[volume.id].push_back(m);
          all.push_back(m);
          documents[stem] = text_metrics_json(m);
          summary.processed += 1;
        } catch (const std::exception& e) {
          summary.failed += 1;
          summary.errors.push_back({stem, e.what()});
        }
      }
    }
    json volumes = json::object();
    std::string csv = "volume,documents,mean_cer,mean_wer\n";
    human += "Text metrics (per volume)\n";
    human += "  " + pad("volume", 10) + pad("documents", 11) + pad("mean CER", 10) + "mean WER\n";
    for (const auto& [volume_id, ms] : per_volume) {
      auto avg = metrics::volume_average(ms);
      volumes[volume_id] = json{
          {"documents", avg.documents}, {"mean_cer", avg.mean_cer}, {"mean_wer", avg.mean_wer}};
      csv += volume_id + "," + std::to_string(avg.documents) + "," + csv_ratio(avg.mean_cer) +
             "," + csv_ratio(avg.mean_wer) + "\n";
      human += "  " + pad(volume_id, 10) + pad(std::to_string(avg.documents), 11) +
               pad(csv_ratio(avg.mean_cer), 10) + csv_ratio(avg.mean_wer) + "\n";
    }
    human += "\n";
    json report{{"volumes", volumes}, {"documents", documents}};
    if (!all.empty()) {
      auto overall = metrics::volume_average(all);
      report["overall"] = json{{"documents", overall.documents},
                               {"mean_cer", overall.mean_cer},
                               {"mean_wer", overall.mean_wer}};
    }
    write_json_file(dir("reports") / "text_metrics.json", report);
    write_file(dir("reports") / "text_metrics.csv", csv);
  }

  // JSON accuracy: labeled records vs extracted records.
  if (fs::exists(gt / "records")) {
    any_section = true;
    json persons = json::object();
    std::vector<metrics::KeyAccuracy> aggregate;
    auto merge = [&aggregate](const std::vector<metrics::KeyAccuracy>& rows) {
      for (const auto& r : rows) {
        auto it = std::find_if(aggregate.begin(), aggregate.end(), [&](const auto& a) {
          return a.category == r.category && a.key == r.key;
        });
        if (it == aggregate.end()) {
          aggregate.push_back(r);
        } else {
          it->correct += r.correct;
          it->total += r.total;
        }
      }
    };
    for (const auto& volume : selected_volumes(opts)) {
      for (const auto& ref_file : volume_files(gt / "records", volume.id, ".json")) {
        const std::string stem = ref_file.stem().string();
        const fs::path gen_file = dir("records") / (stem + ".json");
        try {
          if (!fs::exists(gen_file))
            throw IoError("no pipeline output " + gen_file.string() + " for labeled record");
          auto rows = metrics::json_accuracy(load_json_file(ref_file), load_json_file(gen_file));
          json row_arr = json::array();
          for (const auto& r : rows)
            row_arr.push_back(json{{"category", r.category},
                                   {"key", r.key},
                                   {"correct", r.correct},
                                   {"total", r.total},
                                   {"accuracy", r.accuracy()}});
          persons[stem] = row_arr;
          merge(rows);
          summary.processed += 1;
        } catch (const std::exception& e) {
          summary.failed += 1;
          summary.errors.push_back({stem, e.what()});
        }
      }
    }
    json keys = json::array();
    std::string csv = "category,key,correct,total,accuracy\n";
    for (const auto& r : aggregate) {
      keys.push_back(json{{"category", r.category},
                          {"key", r.key},
                          {"correct", r.correct},
                          {"total", r.total},
                          {"accuracy", r.accuracy()}});
      csv += r.category + "," + r.key + "," + std::to_string(r.correct) + "," +
             std::to_string(r.total) + "," + csv_percent(r.accuracy()) + "\n";
    }
    json categories = json::array();
    human += "JSON accuracy by category\n";
    human += "  " + pad("category", 17) + pad("correct/total", 15) + "accuracy\n";
    for (const auto& c : metrics::accuracy_by_category(aggregate)) {
      categories.push_back(json{{"category", c.category},
                                {"correct", c.correct},
                                {"total", c.total},
                                {"accuracy", c.accuracy()}});
      human += "  " + pad(c.category, 17) +
               pad(std::to_string(c.correct) + "/" + std::to_string(c.total), 15) +
               csv_percent(c.accuracy()) + "%\n";
    }
    human += "\n";
    write_json_file(dir("reports") / "json_accuracy.json",
                    json{{"persons", persons}, {"keys", keys}, {"categories", categories}});
    write_file(dir("reports") / "json_accuracy.csv", csv);
  }

  // Linkage accuracy: expected decisions vs the link stage's decisions.
  const fs::path expected_path = gt / "links" / "expected.json";
  if (fs::exists(expected_path)) {
    any_section = true;
    try {
      auto expected = metrics::parse_link_outcomes(load_json_file(expected_path));
      const fs::path decisions_path = dir("links") / "decisions.json";
      if (!fs::exists(decisions_path))
        throw PreconditionError("evaluate: " + decisions_path.string() +
                                "; run link before evaluating linkage");
      auto actual = metrics::parse_link_outcomes(load_json_file(decisions_path));

      std::map<std::string, metrics::LinkOutcomeMap> expected_by_volume;
      std::map<std::string, metrics::LinkOutcomeMap> actual_by_volume;
      for (const auto& [stem, o] : expected) expected_by_volume[stem_volume(stem)][stem] = o;
      for (const auto& [stem, o] : actual) actual_by_volume[stem_volume(stem)][stem] = o;

      json volumes = json::object();
      std::string csv =
          "volume,persons,person_id_accuracy,new_person_accuracy,"
          "maybe_same_person_accuracy,average,expected_new_persons,generated_new_persons\n";
      human += "Linkage accuracy\n";
      human += "  " + pad("volume", 10) + pad("persons", 9) + pad("person_id", 11) +
               pad("new_person", 12) + pad("maybe_same", 12) + pad("average", 9) +
               "new (expected/generated)\n";
      auto add_row = [&](const std::string& name, const metrics::LinkageReport& r) {
        csv += name + "," + std::to_string(r.persons) + "," + csv_percent(r.person_id_accuracy) +
               "," + csv_percent(r.new_person_accuracy) + "," +
               csv_percent(r.maybe_same_person_accuracy) + "," + csv_percent(r.average) + "," +
               std::to_string(r.expected_new_persons) + "," +
               std::to_string(r.generated_new_persons) + "\n";
        human += "  " + pad(name, 10) + pad(std::to_string(r.persons), 9) +
                 pad(csv_percent(r.person_id_accuracy) + "%", 11) +
                 pad(csv_percent(r.new_person_accuracy) + "%", 12) +
                 pad(csv_percent(r.maybe_same_person_accuracy) + "%", 12) +
                 pad(csv_percent(r.average) + "%", 9) + std::to_string(r.expected_new_persons) +
                 "/" + std::to_string(r.generated_new_persons) + "\n";
      };
      for (const auto& [volume_id, exp] : expected_by_volume) {
        auto report = metrics::linkage_eval(exp, actual_by_volume[volume_id]);
        volumes[volume_id] = linkage_report_json(report);
        add_row(volume_id, report);
        summary.processed += 1;
      }
      auto total = metrics::linkage_eval(expected, actual);
      add_row("total", total);
      write_json_file(dir("reports") / "linkage.json",
                      json{{"volumes", volumes}, {"total", linkage_report_json(total)}});
      write_file(dir("reports") / "linkage.csv", csv);
    } catch (const PreconditionError&) {
      throw;
    } catch (const std::exception& e) {
      summary.failed += 1;
      summary.errors.push_back({"linkage", e.what()});
    }
  }

  if (!any_section)
    throw ConfigError("ground-truth directory " + gt.string() +
                      " has none of text/, records/, links/expected.json");
  if (!human.empty()) write_file(dir("reports") / "summary.txt", human);
  return summary;
}

}  // namespace histrec::pipeline
