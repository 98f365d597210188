#include "qsagnac/cli.hpp"

int main(int argc, char** argv) { return qsagnac::cli::run(argc, argv); }
