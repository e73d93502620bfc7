#include "geomlaw/cli.hpp"

int main(int argc, char** argv) { return geomlaw::run_cli(argc, argv); }
