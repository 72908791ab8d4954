#include "nwfe/log.hpp"

#include <cstdlib>
#include <string_view>

#include <spdlog/sinks/stdout_sinks.h>

namespace nwfe {

spdlog::logger& logger() {
  static const std::shared_ptr<spdlog::logger> instance = [] {
    auto log = std::make_shared<spdlog::logger>("nwfe", std::make_shared<spdlog::sinks::stderr_sink_mt>());
    log->set_pattern("[%l] %v");
    log->set_level(spdlog::level::warn);
    if (const char* env = std::getenv("NWFE_LOG")) {
      const std::string_view v(env);
      if (v == "off") log->set_level(spdlog::level::off);
      else if (v == "info") log->set_level(spdlog::level::info);
      else if (v == "debug") log->set_level(spdlog::level::debug);
    }
    return log;
  }();
  return *instance;
}

}  // namespace nwfe
