// Copyright 2026 The codectok Authors.
// SPDX-License-Identifier: Apache-2.0

#include <iostream>

#include "cli.hpp"

int main(int argc, char** argv) {
  return codectok::cli::cli_main({argv, argv + argc}, std::cout, std::cerr);
}
