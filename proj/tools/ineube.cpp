// Copyright 2026 The iNeuBe Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include <iostream>

#include "ineube/cli.hpp"

int main(int argc, char** argv) { return ineube::CliMain(argc, argv, std::cout, std::cerr); }
