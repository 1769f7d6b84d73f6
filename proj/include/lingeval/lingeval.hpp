// Copyright 2026 The lingeval Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "lingeval/analysis.hpp"
#include "lingeval/backend.hpp"
#include "lingeval/cache.hpp"
#include "lingeval/commands.hpp"
#include "lingeval/config.hpp"
#include "lingeval/corpus.hpp"
#include "lingeval/error.hpp"
#include "lingeval/family_oracle.hpp"
#include "lingeval/hash.hpp"
#include "lingeval/http_backend.hpp"
#include "lingeval/metrics.hpp"
#include "lingeval/pipeline.hpp"
#include "lingeval/prompt.hpp"
#include "lingeval/run_record.hpp"
#include "lingeval/templates.hpp"
#include "lingeval/unicode.hpp"
