// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 ModelSelect Contributors

#pragma once

#include <chrono>
#include <string>
#include <string_view>

namespace modelselect {

using Timestamp = std::chrono::sys_seconds;

/// Accepts "YYYY-MM-DD", "YYYY-MM-DDTHH:MM:SSZ" and the same with fractional
/// seconds or a "+00:00" suffix. Throws modelselect::Error otherwise.
Timestamp parse_timestamp(std::string_view iso);

/// Always "YYYY-MM-DDTHH:MM:SSZ".
std::string format_timestamp(Timestamp t);

/// Calendar subtraction; the day is clamped to the end of the target month.
Timestamp subtract_months(Timestamp t, int months);

}  // namespace modelselect
