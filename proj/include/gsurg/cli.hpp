//
// Copyright (c) 2026 The gsurg Authors.
// SPDX-License-Identifier: Apache-2.0
//
#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace gsurg::cli {

// Runs one toolkit command. Exit codes: 0 success, 1 operation error
// (bad input file, failed verification, invalid graph), 2 usage error.
// Identical argv + input files produce byte-identical output.
int dispatch(const std::vector<std::string>& args, std::ostream& out,
             std::ostream& err);

}  // namespace gsurg::cli
