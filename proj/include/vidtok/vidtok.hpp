// Copyright 2026 The vidtok Authors
// SPDX-License-Identifier: Apache-2.0

// Umbrella header. io.hpp (libpng) and records.hpp (nlohmann/json) are
// included as well; include the individual headers to avoid them.

#pragma once

#include "vidtok/config.hpp"
#include "vidtok/curation.hpp"
#include "vidtok/diff_fp.hpp"
#include "vidtok/error.hpp"
#include "vidtok/geometry.hpp"
#include "vidtok/io.hpp"
#include "vidtok/ocr.hpp"
#include "vidtok/records.hpp"
#include "vidtok/rope.hpp"
#include "vidtok/sequence_format.hpp"
#include "vidtok/version.hpp"
#include "vidtok/video.hpp"
