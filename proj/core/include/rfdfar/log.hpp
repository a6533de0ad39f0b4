#pragma once

#include <functional>
#include <string_view>

namespace rfdfar::log {

enum class Level { Quiet, Warn, Info };

void set_level(Level level) noexcept;
Level level() noexcept;

/// Replace the output sink (stderr by default). Passing an empty function
/// restores the default.
void set_sink(std::function<void(Level, std::string_view)> sink);

void warn(std::string_view message);
void info(std::string_view message);

}  // namespace rfdfar::log
