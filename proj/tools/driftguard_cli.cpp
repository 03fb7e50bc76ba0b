#include "driftguard/cli.hpp"

int main(int argc, char** argv) { return driftguard::cli::cli_main(argc, argv); }
