#include "rfdfar/log.hpp"

#include <atomic>
#include <iostream>
#include <mutex>

namespace rfdfar::log {
namespace {

std::atomic<Level> g_level{Level::Warn};
std::mutex g_mutex;
std::function<void(Level, std::string_view)> g_sink;

void emit(Level lvl, std::string_view message) {
  if (static_cast<int>(lvl) > static_cast<int>(g_level.load())) return;
  std::lock_guard lock(g_mutex);
  if (g_sink) {
    g_sink(lvl, message);
    return;
  }
  std::cerr << "rfdfar: " << (lvl == Level::Warn ? "warning: " : "") << message << '\n';
}

}  // namespace

void set_level(Level lvl) noexcept { g_level = lvl; }
Level level() noexcept { return g_level; }

void set_sink(std::function<void(Level, std::string_view)> sink) {
  std::lock_guard lock(g_mutex);
  g_sink = std::move(sink);
}

void warn(std::string_view message) { emit(Level::Warn, message); }
void info(std::string_view message) { emit(Level::Info, message); }

}  // namespace rfdfar::log
