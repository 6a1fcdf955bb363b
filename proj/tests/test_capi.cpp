#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <string>

#include "kgeft/kgeft.h"

namespace fs = std::filesystem;

TEST_CASE("status names and version") {
  CHECK(std::string(kgeft_status_name(KGEFT_OK)) == "Ok");
  CHECK(std::string(kgeft_status_name(KGEFT_VALIDATION_ERROR)) == "ValidationError");
  CHECK(std::string(kgeft_version()).rfind("kgeft ", 0) == 0);
}

TEST_CASE("config through the c interface") {
  kgeft_config* cfg = nullptr;
  REQUIRE(kgeft_config_new(&cfg) == KGEFT_OK);
  CHECK(kgeft_config_set(cfg, "physics", "M", "32") == KGEFT_OK);
  CHECK(kgeft_config_set(cfg, "physics", "M", "abc") == KGEFT_PARSE_ERROR);
  CHECK(std::string(kgeft_last_error()).find("ParseError") != std::string::npos);

  size_t need = 0;
  CHECK(kgeft_config_serialize(cfg, nullptr, 0, &need) == KGEFT_OK);
  REQUIRE(need > 1);
  std::string text(need, '\0');
  REQUIRE(kgeft_config_serialize(cfg, text.data(), text.size(), &need) == KGEFT_OK);
  CHECK(text.find("M = 32") != std::string::npos);

  kgeft_config* again = nullptr;
  REQUIRE(kgeft_config_parse_text(text.c_str(), &again) == KGEFT_OK);
  char h1[17], h2[17];
  REQUIRE(kgeft_config_hash(cfg, h1, sizeof h1) == KGEFT_OK);
  REQUIRE(kgeft_config_hash(again, h2, sizeof h2) == KGEFT_OK);
  CHECK(std::string(h1) == std::string(h2));
  CHECK(kgeft_config_hash(cfg, h1, 8) != KGEFT_OK);

  CHECK(kgeft_config_set(cfg, "run", "T", "1000") == KGEFT_OK);
  CHECK(kgeft_config_validate(cfg, nullptr, 0, &need) == KGEFT_VALIDATION_ERROR);
  kgeft_config_free(cfg);
  kgeft_config_free(again);
  kgeft_config_free(nullptr);
}

TEST_CASE("null arguments are rejected") {
  CHECK(kgeft_config_new(nullptr) == KGEFT_INVALID_ARGUMENT);
  CHECK(kgeft_config_parse_file("/nonexistent.cfg", nullptr) == KGEFT_INVALID_ARGUMENT);
  kgeft_config* cfg = nullptr;
  CHECK(kgeft_config_parse_file("/nonexistent.cfg", &cfg) == KGEFT_PARSE_ERROR);
  CHECK(cfg == nullptr);
}

TEST_CASE("dispatch a zero-data run and reload its manifest") {
  const fs::path root = fs::temp_directory_path() / "kgeft-test-capi";
  fs::remove_all(root);
  kgeft_config* cfg = nullptr;
  REQUIRE(kgeft_config_new(&cfg) == KGEFT_OK);
  for (auto [s, k, v] : {std::tuple{"data", "generator", "zero"}, {"grid", "n", "64"}, {"grid", "L", "40"},
                         {"run", "T", "5"}})
    REQUIRE(kgeft_config_set(cfg, s, k, v) == KGEFT_OK);
  kgeft_manifest* m = nullptr;
  REQUIRE(kgeft_dispatch(cfg, root.c_str(), &m) == KGEFT_OK);
  int passed = 0;
  CHECK(kgeft_manifest_passed(m, &passed) == KGEFT_OK);
  CHECK(passed == 1);
  size_t need = 0;
  kgeft_manifest_run_dir(m, nullptr, 0, &need);
  std::string dir(need, '\0');
  REQUIRE(kgeft_manifest_run_dir(m, dir.data(), dir.size(), &need) == KGEFT_OK);
  dir.resize(need - 1);
  CHECK(fs::exists(fs::path(dir) / "manifest.json"));
  CHECK(kgeft_emit_plot_data(m, "decay_curves") == KGEFT_OK);
  CHECK(kgeft_emit_plot_data(m, "resonance_sheets") == KGEFT_MISSING_ARTIFACT);
  CHECK(kgeft_emit_plot_data(m, "bogus") == KGEFT_INVALID_ARGUMENT);
  kgeft_manifest* loaded = nullptr;
  REQUIRE(kgeft_manifest_load(dir.c_str(), &loaded) == KGEFT_OK);
  kgeft_manifest_free(loaded);
  kgeft_manifest_free(m);
  kgeft_config_free(cfg);
}
