// Copyright 2026 The lingeval Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <string>

#include "lingeval/config.hpp"

namespace lingeval::testing {

inline std::filesystem::path source_path(const std::string& rel) {
  return std::filesystem::path(LINGEVAL_SOURCE_DIR) / rel;
}

/// configs/mock_matrix.toml with its cache and outputs redirected under `root`.
inline RunConfig mock_matrix_config(const std::filesystem::path& root) {
  RunConfig c = load_run_config(source_path("configs/mock_matrix.toml"));
  c.cache_dir = root / "cache";
  c.output_dir = root / "out";
  return c;
}

}  // namespace lingeval::testing
