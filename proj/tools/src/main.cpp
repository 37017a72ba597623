#include "cli.hpp"

int main(int argc, char** argv) { return shellhier::cli::run(argc, argv); }
