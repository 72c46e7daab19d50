#include "vvca/cli.hpp"

int main(int argc, char** argv) { return vvca::cli::run(argc, argv); }
