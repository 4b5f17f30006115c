// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 ModelSelect Contributors

#include "modelselect/common/log.hpp"

#include <spdlog/sinks/stdout_sinks.h>

namespace modelselect {

namespace {

std::shared_ptr<spdlog::logger> make_logger()
{
    auto sink = std::make_shared<spdlog::sinks::stderr_sink_mt>();
    auto log = std::make_shared<spdlog::logger>("modelselect", sink);
    log->set_pattern("%^%l%$: %v");
    log->set_level(spdlog::level::warn);
    return log;
}

}  // namespace

spdlog::logger& logger()
{
    static auto instance = make_logger();
    return *instance;
}

void set_log_level(spdlog::level::level_enum level) { logger().set_level(level); }

}  // namespace modelselect
