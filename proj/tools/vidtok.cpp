// Copyright 2026 The vidtok Authors
// SPDX-License-Identifier: Apache-2.0

#include "vidtok/cli.hpp"

int main(int argc, char** argv) { return vidtok::cli::run(argc, argv); }
