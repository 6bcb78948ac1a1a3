#include "epshock/cli.hpp"

int main(int argc, char** argv) { return epshock::cli::run(argc, argv); }
