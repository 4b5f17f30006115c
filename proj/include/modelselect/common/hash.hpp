// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 ModelSelect Contributors

#pragma once

#include <string>
#include <string_view>

namespace modelselect {

/// Lowercase hex SHA-256 digest.
std::string sha256_hex(std::string_view data);

}  // namespace modelselect
