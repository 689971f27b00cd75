#pragma once

#include <chrono>
#include <functional>
#include <optional>
#include <string>
#include <string_view>

namespace logstamp {

using UtcSeconds = std::chrono::sys_seconds;

// Time source handed to anything that records a time. Core code never reads
// the system clock directly.
using Clock = std::function<UtcSeconds()>;

Clock system_clock();
Clock fixed_clock(UtcSeconds at);

// "YYYY-MM-DDTHH:MM:SSZ"
std::string format_utc(UtcSeconds t);
std::optional<UtcSeconds> parse_utc(std::string_view text);

}  // namespace logstamp
