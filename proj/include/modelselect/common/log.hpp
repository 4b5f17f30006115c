// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 ModelSelect Contributors

#pragma once

#include <spdlog/spdlog.h>

namespace modelselect {

/// Process-wide stderr logger, "warn" by default.
spdlog::logger& logger();

void set_log_level(spdlog::level::level_enum level);

}  // namespace modelselect
