// Exercises the shared-library surface the way an embedding application
// would: only histrec.h, no C++ internals.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <histrec.h>

#include <unistd.h>

#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>

namespace fs = std::filesystem;

namespace {

struct Workspace {
  fs::path root;
  Workspace() {
    root = fs::temp_directory_path() / ("histrec-capi-" + std::to_string(::getpid()));
    fs::remove_all(root);
    fs::create_directories(root);
  }
  ~Workspace() { fs::remove_all(root); }

  fs::path write(const std::string& name, const std::string& content) {
    auto path = root / name;
    std::ofstream out(path);
    out << content;
    return path;
  }
};

constexpr const char* kMinimalConfig = R"({
  "workdir": "work",
  "volumes": [{"id": "v1"}],
  "extractor": {"backend": "replay", "replay_path": "replay.json"}
})";

}  // namespace

TEST_CASE("version string") {
  REQUIRE(hr_version() != nullptr);
  CHECK(std::strlen(hr_version()) > 0);
}

TEST_CASE("null arguments are rejected, not dereferenced") {
  CHECK(hr_pipeline_open(nullptr, nullptr) == HR_EINVAL);
  hr_pipeline* p = nullptr;
  CHECK(hr_pipeline_open(nullptr, &p) == HR_EINVAL);
  CHECK(hr_pipeline_open_json(nullptr, nullptr, &p) == HR_EINVAL);
  CHECK(hr_run_stage(nullptr, "all", nullptr) == HR_EINVAL);
  CHECK(std::string(hr_last_error(nullptr)).empty());
  CHECK(std::string(hr_last_summary_json(nullptr)).empty());
  hr_pipeline_close(nullptr);
}

TEST_CASE("opening a missing config reports a config error with a message") {
  hr_pipeline* p = nullptr;
  CHECK(hr_pipeline_open("/nonexistent/config.json", &p) == HR_ECONFIG);
  REQUIRE(p != nullptr);
  CHECK(std::string(hr_last_error(p)).find("config") != std::string::npos);
  CHECK(hr_run_stage(p, "all", nullptr) == HR_EINVAL);
  hr_pipeline_close(p);
}

TEST_CASE("invalid json is a config error") {
  hr_pipeline* p = nullptr;
  CHECK(hr_pipeline_open_json("{not json", nullptr, &p) == HR_ECONFIG);
  REQUIRE(p != nullptr);
  CHECK(std::strlen(hr_last_error(p)) > 0);
  hr_pipeline_close(p);
}

TEST_CASE("a valid handle reports stage problems without crashing") {
  Workspace ws;
  ws.write("replay.json", "{}");

  hr_pipeline* p = nullptr;
  REQUIRE(hr_pipeline_open_json(kMinimalConfig, ws.root.c_str(), &p) == HR_OK);
  REQUIRE(p != nullptr);

  SUBCASE("unknown stages are invalid") {
    CHECK(hr_run_stage(p, "transmogrify", nullptr) == HR_EINVAL);
    CHECK(std::string(hr_last_error(p)).find("transmogrify") != std::string::npos);
  }

  SUBCASE("missing predecessors map to a config error") {
    CHECK(hr_run_stage(p, "ocr", nullptr) == HR_ECONFIG);
    CHECK(std::string(hr_last_error(p)).find("ingest") != std::string::npos);
  }

  SUBCASE("unknown volumes map to a config error") {
    hr_run_options opts{};
    opts.volume = "v9";
    CHECK(hr_run_stage(p, "ingest", &opts) == HR_ECONFIG);
  }

  SUBCASE("ingest without a pdf is a per-volume failure, reported as partial") {
    CHECK(hr_run_stage(p, "ingest", nullptr) == HR_ECONFIG);
    // The volume has no pdf configured; that is a configuration problem.
    CHECK(std::string(hr_last_error(p)).find("pdf") != std::string::npos);
  }

  hr_pipeline_close(p);
}

TEST_CASE("error and summary strings stay valid until the next call") {
  Workspace ws;
  ws.write("replay.json", "{}");
  hr_pipeline* p = nullptr;
  REQUIRE(hr_pipeline_open_json(kMinimalConfig, ws.root.c_str(), &p) == HR_OK);

  CHECK(hr_run_stage(p, "ocr", nullptr) == HR_ECONFIG);
  const char* first = hr_last_error(p);
  std::string copy = first;
  CHECK(copy == hr_last_error(p));

  hr_pipeline_close(p);
}
