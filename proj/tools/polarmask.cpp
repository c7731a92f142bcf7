#include "polarmask/cli.hpp"

int main(int argc, char** argv) { return polarmask::cli_main(argc, argv); }
