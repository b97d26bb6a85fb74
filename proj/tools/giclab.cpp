#include <giclab/cli_io.hpp>

int main(int argc, char** argv) { return giclab::run_command(argc, argv); }
