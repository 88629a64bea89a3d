#include "qkick/cli_io.hpp"

int main(int argc, char** argv) { return qkick::cli::main_entry(argc, argv); }
