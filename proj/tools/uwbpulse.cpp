#include "uwbpulse/cli.hpp"

int main(int argc, char** argv) { return uwbpulse::cli::main(argc, argv); }
