#include "pcs/cli.hpp"

int main(int argc, char** argv) { return pcs::run_cli(argc, argv); }
