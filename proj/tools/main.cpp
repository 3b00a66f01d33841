#include "strainsis/cli.hpp"

int main(int argc, char** argv) { return strainsis::cli::run_cli(argc, argv); }
