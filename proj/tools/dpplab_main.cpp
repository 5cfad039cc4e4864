#include "dpplab/cli.hpp"

int main(int argc, char** argv) { return dpp::run_cli(argc, argv); }
