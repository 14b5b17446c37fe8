#include "dqdmp/cli.hpp"

int main(int argc, char** argv) { return dqdmp::run_cli(argc, argv); }
