#include "commands.hpp"

int main(int argc, char** argv) { return nlac::cli::run_command(argc, argv); }
