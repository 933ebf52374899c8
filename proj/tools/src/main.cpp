#include "infochain_cli/cli.hpp"

int main(int argc, char** argv) { return infochain::cli::run(argc, argv); }
