#pragma once

#include <string_view>

namespace curvforge::log {

enum class Level { off = 0, info = 1, debug = 2 };

/// Read once from CURVFORGE_LOG (off|info|debug); defaults to off.
[[nodiscard]] Level level() noexcept;
void set_level(Level level) noexcept;

void info(std::string_view message);
void debug(std::string_view message);

} // namespace curvforge::log
