// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 ModelSelect Contributors

#include <iostream>

#include "modelselect/gateway/cli.hpp"

int main(int argc, char** argv)
{
    return modelselect::gateway::run_cli(argc, argv, std::cout, std::cerr);
}
