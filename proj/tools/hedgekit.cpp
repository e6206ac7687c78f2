#include "hedge/cli.hpp"

int main(int argc, char** argv) { return hedge::run_cli(argc, argv); }
