#pragma once

#include <functional>
#include <string>

namespace survml {

using WarningSink = std::function<void(const std::string&)>;

/// Replaces the process-wide warning sink; the default writes to stderr.
/// Passing an empty function restores the default.
void set_warning_sink(WarningSink sink);

void warn(const std::string& message);

}  // namespace survml
