#include "spudd/cli.hpp"

int main(int argc, char** argv) { return spudd::run_cli(argc, argv); }
