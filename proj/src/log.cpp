#include "curvforge/log.hpp"

#include <atomic>
#include <cstdlib>
#include <iostream>
#include <mutex>
#include <string>

namespace curvforge::log {

namespace {

Level from_env() noexcept
{
    const char* env = std::getenv("CURVFORGE_LOG");
    if (!env) return Level::off;
    const std::string v(env);
    if (v == "debug") return Level::debug;
    if (v == "info") return Level::info;
    return Level::off;
}

std::atomic<Level>& current()
{
    static std::atomic<Level> value{from_env()};
    return value;
}

void emit(const char* tag, std::string_view message)
{
    static std::mutex mutex;
    std::lock_guard lock(mutex);
    std::cerr << "[curvforge " << tag << "] " << message << '\n';
}

} // namespace

Level level() noexcept { return current().load(); }
void set_level(Level l) noexcept { current().store(l); }

void info(std::string_view message)
{
    if (level() >= Level::info) emit("info", message);
}

void debug(std::string_view message)
{
    if (level() >= Level::debug) emit("debug", message);
}

} // namespace curvforge::log
