#include "cli_main.hpp"

int main(int argc, char** argv) { return stabsens_cli::cli_main(argc, argv); }
