#include "cli/commands.hpp"

int main(int argc, char** argv) { return thermoswitch::cli::main(argc, argv); }
