// SPDX-FileCopyrightText: 2026 The ranprof Authors
// SPDX-License-Identifier: Apache-2.0

#include "ranprof/cli.hpp"

int main(int argc, char** argv) { return ranprof::cli::run_cli(argc, argv); }
