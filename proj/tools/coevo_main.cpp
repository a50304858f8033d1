// SPDX-License-Identifier: Apache-2.0

#include "coevo/cli.hpp"

int main(int argc, char** argv) { return coevo::cli::run(argc, argv); }
