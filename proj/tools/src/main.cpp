#include "cli.hpp"

int main(int argc, char** argv) { return qsweld::cli::run(argc, argv); }
