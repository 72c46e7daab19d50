#pragma once

#include <string>

#include "vvca/domain.hpp"

namespace vvca::cli {

/// Parses argv and dispatches to the harness. Exit status: 0 success,
/// 1 check/runtime failure, 2 usage or configuration error.
int run(int argc, const char* const* argv);

/// The per-setting defaults as a ready-to-use config file; feeding it
/// back through --config reproduces the same effective configuration.
std::string render_config_defaults(SettingId setting, AuctionSize size);

}  // namespace vvca::cli
