#include "lunggan/cli.hpp"

int main(int argc, char** argv) { return lunggan::run_cli(argc, argv); }
