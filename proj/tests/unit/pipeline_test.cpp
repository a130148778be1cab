#include "histrec/pipeline.hpp"

#include <doctest.h>

#include <map>

#include <opencv2/core.hpp>

#include "histrec/errors.hpp"
#include "histrec/imaging.hpp"
#include "histrec/metrics.hpp"
#include "test_support.hpp"

using namespace histrec;
namespace fs = std::filesystem;

namespace {

pipeline::Pipeline make_pipeline(const testing::DemoWorkspace& ws) {
  return pipeline::Pipeline(config::PipelineConfig::load_file(ws.config_path));
}

// Relative path -> content for every artifact, minus the sqlite store
// (byte layout there is an implementation detail of sqlite).
std::map<std::string, std::string> artifact_map(const fs::path& workdir) {
  std::map<std::string, std::string> out;
  for (const auto& entry : fs::recursive_directory_iterator(workdir)) {
    if (!entry.is_regular_file()) continue;
    const std::string rel = fs::relative(entry.path(), workdir).string();
    if (rel.find("store.db") != std::string::npos) continue;
    out[rel] = testing::read_file(entry.path());
  }
  return out;
}

std::size_t total_failed(const std::vector<pipeline::StageSummary>& summaries) {
  std::size_t failed = 0;
  for (const auto& s : summaries) failed += s.failed;
  return failed;
}

}  // namespace

TEST_CASE("the demo corpus flows through every stage") {
  testing::TempDir tmp("pipeline");
  auto ws = testing::setup_demo_workspace(tmp.path());
  testing::EnvVar ocr_dir("STUB_OCR_TEXT_DIR", ws.ocr_text_dir.string());

  auto pipe = make_pipeline(ws);
  pipeline::RunOptions opts;
  opts.ground_truth = ws.ground_truth_dir;
  auto summaries = pipe.run("all", opts);
  REQUIRE(summaries.size() == 6);
  CHECK(total_failed(summaries) == 0);

  SUBCASE("pages are binarized and named by volume and number") {
    for (int p = 1; p <= 6; ++p) {
      auto path = ws.workdir / "pages" / (imaging::page_stem("demo", p) + ".png");
      REQUIRE_MESSAGE(fs::exists(path), path.string());
      auto image = imaging::load_page_image(path, "demo", p, 72);
      auto gray = imaging::to_grayscale(image);
      for (auto it = gray.mat.begin<uint8_t>(); it != gray.mat.end<uint8_t>(); ++it)
        REQUIRE((*it == 0 || *it == 255));
    }
  }

  SUBCASE("page text matches the engine output") {
    for (std::size_t p = 0; p < ws.corpus.page_texts.size(); ++p) {
      char name[32];
      std::snprintf(name, sizeof(name), "demo_%04zu.txt", p + 1);
      CHECK(testing::read_file(ws.workdir / "text" / name) == ws.corpus.page_texts[p]);
    }
  }

  SUBCASE("person files partition the volume text") {
    for (std::size_t i = 0; i < ws.corpus.person_keys.size(); ++i) {
      auto path = ws.workdir / "persons" / ("demo_" + ws.corpus.person_keys[i] + ".txt");
      REQUIRE_MESSAGE(fs::exists(path), path.string());
      CHECK(testing::read_file(path) == ws.corpus.person_texts[i]);
    }
  }

  SUBCASE("records match the replay responses") {
    for (std::size_t i = 0; i < ws.corpus.person_keys.size(); ++i) {
      auto path = ws.workdir / "records" / ("demo_" + ws.corpus.person_keys[i] + ".json");
      REQUIRE(fs::exists(path));
      CHECK(testing::load_json(path) == ws.corpus.person_records[i]);
    }
  }

  SUBCASE("link decisions take the expected shape and values") {
    auto decisions =
        metrics::parse_link_outcomes(testing::load_json(ws.workdir / "links" / "decisions.json"));
    REQUIRE(decisions.size() == 3);
    CHECK(decisions.at("demo_ALDERSHOF").new_person);
    CHECK_FALSE(decisions.at("demo_ALDERSHOF").maybe_same_person);
  }

  SUBCASE("evaluation reports a perfect score against the mirror ground truth") {
    auto text_report = testing::load_json(ws.workdir / "reports" / "text_metrics.json");
    CHECK(text_report["volumes"]["demo"]["mean_cer"] == 0.0);
    CHECK(text_report["volumes"]["demo"]["mean_wer"] == 0.0);

    auto accuracy = testing::load_json(ws.workdir / "reports" / "json_accuracy.json");
    for (const auto& cat : accuracy["categories"])
      CHECK(cat["accuracy"] == 100.0);

    auto linkage_report = testing::load_json(ws.workdir / "reports" / "linkage.json");
    CHECK(linkage_report["volumes"]["demo"]["average"] == 100.0);
    CHECK(linkage_report["total"]["generated_new_persons"] == 3);
    CHECK(fs::exists(ws.workdir / "reports" / "text_metrics.csv"));
    CHECK(fs::exists(ws.workdir / "reports" / "json_accuracy.csv"));
    CHECK(fs::exists(ws.workdir / "reports" / "linkage.csv"));
  }

  SUBCASE("re-running skips everything and changes nothing") {
    auto before = artifact_map(ws.workdir);
    auto again = pipe.run("all", opts);
    CHECK(total_failed(again) == 0);
    for (const auto& s : again) {
      if (s.stage == "evaluate") continue;  // evaluation always recomputes
      CHECK(s.processed == 0);
    }
    CHECK(artifact_map(ws.workdir) == before);
  }

  SUBCASE("forced re-runs redo the work") {
    pipeline::RunOptions forced = opts;
    forced.force = true;
    auto again = pipe.run("all", forced);
    CHECK(total_failed(again) == 0);
    CHECK(again[0].processed == 6);
  }
}

TEST_CASE("stage-by-stage runs produce byte-identical artifacts to 'all'") {
  testing::TempDir tmp_staged("pipeline-staged");
  testing::TempDir tmp_all("pipeline-all");
  auto staged_ws = testing::setup_demo_workspace(tmp_staged.path());
  auto all_ws = testing::setup_demo_workspace(tmp_all.path());

  {
    testing::EnvVar ocr_dir("STUB_OCR_TEXT_DIR", staged_ws.ocr_text_dir.string());
    auto pipe = make_pipeline(staged_ws);
    pipeline::RunOptions opts;
    opts.ground_truth = staged_ws.ground_truth_dir;
    for (const char* stage : {"ingest", "ocr", "segment", "extract", "link", "evaluate"})
      CHECK(total_failed(pipe.run(stage, opts)) == 0);
  }
  {
    testing::EnvVar ocr_dir("STUB_OCR_TEXT_DIR", all_ws.ocr_text_dir.string());
    auto pipe = make_pipeline(all_ws);
    pipeline::RunOptions opts;
    opts.ground_truth = all_ws.ground_truth_dir;
    CHECK(total_failed(pipe.run("all", opts)) == 0);
  }

  CHECK(artifact_map(staged_ws.workdir) == artifact_map(all_ws.workdir));
}

TEST_CASE("stages demand their predecessors") {
  testing::TempDir tmp("pipeline-pre");
  auto ws = testing::setup_demo_workspace(tmp.path());
  auto pipe = make_pipeline(ws);
  CHECK_THROWS_AS(pipe.run("ocr", {}), pipeline::PreconditionError);
  CHECK_THROWS_AS(pipe.run("segment", {}), pipeline::PreconditionError);
  CHECK_THROWS_AS(pipe.run("extract", {}), pipeline::PreconditionError);
  CHECK_THROWS_AS(pipe.run("link", {}), pipeline::PreconditionError);
  CHECK_THROWS_AS(pipe.run("evaluate", {}), ConfigError);  // needs --ground-truth
  CHECK_THROWS_AS(pipe.run("mystery", {}), ConfigError);
}

TEST_CASE("unknown volume selections fail up front") {
  testing::TempDir tmp("pipeline-vol");
  auto ws = testing::setup_demo_workspace(tmp.path());
  auto pipe = make_pipeline(ws);
  pipeline::RunOptions opts;
  opts.volume = "nope";
  CHECK_THROWS_AS(pipe.run("ingest", opts), ConfigError);
}

TEST_CASE("a failing person does not abort the volume") {
  testing::TempDir tmp("pipeline-partial");
  auto ws = testing::setup_demo_workspace(tmp.path());
  testing::EnvVar ocr_dir("STUB_OCR_TEXT_DIR", ws.ocr_text_dir.string());

  // Drop one replay entry so BEECKMAN cannot extract.
  auto replay = testing::load_json(ws.root / "replay.json");
  auto messages = extract::build_messages(ws.corpus.person_texts[1]);
  replay.erase(extract::replay_digest(messages.back().content));
  testing::write_file(ws.root / "replay.json", replay.dump(2) + "\n");

  auto pipe = make_pipeline(ws);
  for (const char* stage : {"ingest", "ocr", "segment"}) pipe.run(stage, {});
  auto summaries = pipe.run("extract", {});
  REQUIRE(summaries.size() == 1);
  CHECK(summaries[0].processed == 2);
  CHECK(summaries[0].failed == 1);
  REQUIRE(summaries[0].errors.size() == 1);
  CHECK(summaries[0].errors[0].item == "demo_BEECKMAN");
  CHECK(fs::exists(ws.workdir / "records" / "demo_ALDERSHOF.json"));
  CHECK(fs::exists(ws.workdir / "records" / "demo_COOLHAES.json"));
  CHECK_FALSE(fs::exists(ws.workdir / "records" / "demo_BEECKMAN.json"));

  // Linking proceeds with the two extracted records.
  auto link_summary = pipe.run("link", {});
  CHECK(link_summary[0].processed == 2);
}

TEST_CASE("config validation catches broken documents") {
  testing::TempDir tmp("config");
  using records::json;

  auto load = [&](const json& doc) {
    return config::PipelineConfig::load_json(doc, tmp.path());
  };

  json base{{"workdir", "w"},
            {"volumes", json::array({json{{"id", "demo"}}})},
            {"extractor", json{{"backend", "replay"}, {"replay_path", "r.json"}}}};
  CHECK_NOTHROW(load(base));

  json no_volumes = base;
  no_volumes["volumes"] = json::array();
  CHECK_THROWS_AS(load(no_volumes), ConfigError);

  json bad_id = base;
  bad_id["volumes"][0]["id"] = "demo_1";
  CHECK_THROWS_AS(load(bad_id), ConfigError);

  json bad_backend = base;
  bad_backend["extractor"]["backend"] = "carrier-pigeon";
  CHECK_THROWS_AS(load(bad_backend), ConfigError);

  json http_without_url = base;
  http_without_url["extractor"] = json{{"backend", "http"}};
  CHECK_THROWS_AS(load(http_without_url), ConfigError);

  json bad_psm = base;
  bad_psm["ocr"] = json{{"page_segmentation_mode", 99}};
  CHECK_THROWS_AS(load(bad_psm), ConfigError);

  json bad_threshold = base;
  bad_threshold["imaging"] = json{{"binarize_threshold", 0}};
  CHECK_THROWS_AS(load(bad_threshold), ConfigError);

  SUBCASE("the api key comes from the environment") {
    testing::EnvVar key("HISTREC_TEST_KEY", "sekrit");
    json http = base;
    http["extractor"] = json{{"backend", "http"},
                             {"endpoint_url", "http://127.0.0.1:1/v1/chat/completions"},
                             {"api_key_env", "HISTREC_TEST_KEY"}};
    auto cfg = load(http);
    CHECK(cfg.extractor.api_key == "sekrit");
  }
}
