// opmeans — operator means of probability measures on positive definite matrices
// SPDX-License-Identifier: MIT
#include "opmeans/cli_app.hpp"

int main(int argc, char** argv) { return opmeans::run_cli(argc, argv); }
