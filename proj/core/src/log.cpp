#include "planverify/log.hpp"

#include <atomic>
#include <cstdio>
#include <mutex>

namespace pv::log {

namespace {

std::atomic<Level> g_level{Level::Warn};
std::mutex g_mutex;

const char* tag(Level level) {
  switch (level) {
    case Level::Debug: return "debug";
    case Level::Info: return "info";
    case Level::Warn: return "warn";
    case Level::Error: return "error";
    default: return "?";
  }
}

}  // namespace

void set_level(Level level) { g_level.store(level); }
Level level() { return g_level.load(); }

void write(Level lvl, const std::string& message) {
  if (lvl < g_level.load()) return;
  std::lock_guard<std::mutex> lock(g_mutex);
  std::fprintf(stderr, "[pv %s] %s\n", tag(lvl), message.c_str());
}

}  // namespace pv::log
