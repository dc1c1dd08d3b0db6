#include "cli.hpp"

int main(int argc, char** argv) { return r2r::cli::run_command(argc, argv); }
