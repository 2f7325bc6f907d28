//
// Copyright (c) 2026 The gsurg Authors.
// SPDX-License-Identifier: Apache-2.0
//
#include <iostream>
#include <string>
#include <vector>

#include "gsurg/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return gsurg::cli::dispatch(args, std::cout, std::cerr);
}
