#include "histrec/log.hpp"

#include <atomic>
#include <cstdio>

#include "histrec/errors.hpp"

namespace histrec::log {

namespace {

std::atomic<Level> g_level{Level::Info};

void emit(Level level, const char* tag, const std::string& msg) {
  if (level < g_level.load(std::memory_order_relaxed)) return;
  std::fprintf(stderr, "[%s] %s\n", tag, msg.c_str());
}

}  // namespace

void set_level(Level level) { g_level.store(level, std::memory_order_relaxed); }

Level level_from_string(const std::string& name) {
  if (name == "debug") return Level::Debug;
  if (name == "info") return Level::Info;
  if (name == "warn" || name == "warning") return Level::Warn;
  if (name == "error") return Level::Error;
  if (name == "off") return Level::Off;
  throw ConfigError("unknown log level '" + name + "' (debug|info|warn|error|off)");
}

void debug(const std::string& msg) { emit(Level::Debug, "debug", msg); }
void info(const std::string& msg) { emit(Level::Info, "info", msg); }
void warn(const std::string& msg) { emit(Level::Warn, "warn", msg); }
void error(const std::string& msg) { emit(Level::Error, "error", msg); }

}  // namespace histrec::log
