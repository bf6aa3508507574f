#include "chdbc/cli.hpp"

int main(int argc, char** argv) { return chdbc::cli_main(argc, argv); }
