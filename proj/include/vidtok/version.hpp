// Copyright 2026 The vidtok Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

namespace vidtok {

inline constexpr const char* kVersion = "1.0.0";

}  // namespace vidtok
