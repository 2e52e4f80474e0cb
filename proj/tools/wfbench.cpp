#include "wfbench/cli.hpp"

int main(int argc, char** argv) { return wfbench::cli::run(argc, argv); }
