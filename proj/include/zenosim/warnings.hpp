#pragma once

#include <functional>
#include <string>

namespace zenosim {

using WarningHandler = std::function<void(const std::string&)>;

/// Replaces the handler for validity-regime warnings (default: "warning: ..."
/// on std::clog). Returns the previous handler.
WarningHandler set_warning_handler(WarningHandler handler);

void warn(const std::string& message);

}  // namespace zenosim
