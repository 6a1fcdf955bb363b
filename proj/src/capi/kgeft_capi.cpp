#include "kgeft/kgeft.h"

#include <cstring>
#include <string>

#include "common/error.hpp"
#include "harness/config.hpp"
#include "harness/pipelines.hpp"

struct kgeft_config {
  kgeft::RunConfig cfg;
};

struct kgeft_manifest {
  kgeft::RunManifest m;
};

namespace {

thread_local std::string g_last_error;

template <class F>
int guarded(F&& f) {
  try {
    g_last_error.clear();
    f();
    return KGEFT_OK;
  } catch (const kgeft::Error& e) {
    g_last_error = e.what();
    return static_cast<int>(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return KGEFT_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return KGEFT_INTERNAL;
  }
}

int copy_out(const std::string& s, char* buf, size_t cap, size_t* needed) {
  if (needed) *needed = s.size() + 1;
  if (buf && cap > 0) {
    const size_t n = std::min(cap - 1, s.size());
    std::memcpy(buf, s.data(), n);
    buf[n] = '\0';
    if (n < s.size()) {
      g_last_error = "buffer too small";
      return KGEFT_INVALID_ARGUMENT;
    }
  }
  return KGEFT_OK;
}

#define KGEFT_REQUIRE_ARG(x)                      \
  do {                                            \
    if (!(x)) {                                   \
      g_last_error = "null argument: " #x;        \
      return KGEFT_INVALID_ARGUMENT;              \
    }                                             \
  } while (0)

}  // namespace

extern "C" {

const char* kgeft_last_error(void) { return g_last_error.c_str(); }

const char* kgeft_status_name(int status) {
  if (status == KGEFT_OK) return "Ok";
  return kgeft::error_code_name(static_cast<kgeft::ErrorCode>(status));
}

const char* kgeft_version(void) { return kgeft::kCodeVersion; }

int kgeft_config_new(kgeft_config** out) {
  KGEFT_REQUIRE_ARG(out);
  return guarded([&] { *out = new kgeft_config{}; });
}

int kgeft_config_parse_file(const char* path, kgeft_config** out) {
  KGEFT_REQUIRE_ARG(path && out);
  return guarded([&] { *out = new kgeft_config{kgeft::parse_config(path)}; });
}

int kgeft_config_parse_text(const char* text, kgeft_config** out) {
  KGEFT_REQUIRE_ARG(text && out);
  return guarded([&] { *out = new kgeft_config{kgeft::parse_config_text(text)}; });
}

int kgeft_config_set(kgeft_config* cfg, const char* section, const char* key, const char* value) {
  KGEFT_REQUIRE_ARG(cfg && section && key && value);
  return guarded([&] { kgeft::set_config_value(cfg->cfg, section, key, value); });
}

int kgeft_config_serialize(const kgeft_config* cfg, char* buf, size_t cap, size_t* needed) {
  KGEFT_REQUIRE_ARG(cfg);
  int rc = KGEFT_OK;
  const int g = guarded([&] { rc = copy_out(kgeft::serialize(cfg->cfg), buf, cap, needed); });
  return g != KGEFT_OK ? g : rc;
}

int kgeft_config_hash(const kgeft_config* cfg, char* buf, size_t cap) {
  KGEFT_REQUIRE_ARG(cfg && buf && cap >= 17);
  int rc = KGEFT_OK;
  const int g = guarded([&] { rc = copy_out(kgeft::config_hash(cfg->cfg), buf, cap, nullptr); });
  return g != KGEFT_OK ? g : rc;
}

int kgeft_config_validate(const kgeft_config* cfg, char* audit_buf, size_t cap, size_t* needed) {
  KGEFT_REQUIRE_ARG(cfg);
  int rc = KGEFT_OK;
  const int g = guarded([&] {
    std::string text;
    for (const auto& a : kgeft::validate(cfg->cfg)) text += a + "\n";
    rc = copy_out(text, audit_buf, cap, needed);
  });
  return g != KGEFT_OK ? g : rc;
}

void kgeft_config_free(kgeft_config* cfg) { delete cfg; }

int kgeft_dispatch(const kgeft_config* cfg, const char* output_root, kgeft_manifest** out) {
  KGEFT_REQUIRE_ARG(cfg && out);
  return guarded([&] {
    *out = new kgeft_manifest{kgeft::dispatch(cfg->cfg, output_root ? output_root : "")};
  });
}

int kgeft_manifest_load(const char* path, kgeft_manifest** out) {
  KGEFT_REQUIRE_ARG(path && out);
  return guarded([&] { *out = new kgeft_manifest{kgeft::load_manifest(path)}; });
}

int kgeft_manifest_passed(const kgeft_manifest* m, int* passed) {
  KGEFT_REQUIRE_ARG(m && passed);
  *passed = m->m.passed() ? 1 : 0;
  return KGEFT_OK;
}

int kgeft_manifest_run_dir(const kgeft_manifest* m, char* buf, size_t cap, size_t* needed) {
  KGEFT_REQUIRE_ARG(m);
  return copy_out(m->m.run_dir.string(), buf, cap, needed);
}

int kgeft_manifest_json(const kgeft_manifest* m, char* buf, size_t cap, size_t* needed) {
  KGEFT_REQUIRE_ARG(m);
  int rc = KGEFT_OK;
  const int g = guarded([&] { rc = copy_out(m->m.to_json().dump(2), buf, cap, needed); });
  return g != KGEFT_OK ? g : rc;
}

int kgeft_emit_plot_data(kgeft_manifest* m, const char* figure) {
  KGEFT_REQUIRE_ARG(m && figure);
  return guarded([&] { kgeft::emit_plot_data(m->m, kgeft::plot_figure_from_string(figure)); });
}

void kgeft_manifest_free(kgeft_manifest* m) { delete m; }

}  // extern "C"
