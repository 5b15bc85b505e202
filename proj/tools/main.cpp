#include "sphfrieze/cli.hpp"

int main(int argc, char** argv) { return sphf::cli_main(argc, argv); }
