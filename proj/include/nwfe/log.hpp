#pragma once

#include <memory>

#include <spdlog/spdlog.h>

namespace nwfe {

/// Shared stderr logger. Its level comes from NWFE_LOG (off|info|debug) on
/// first use; unset means warnings only.
spdlog::logger& logger();

}  // namespace nwfe
