#include "degwave/cli.hpp"

int main(int argc, char** argv) { return degwave::run_cli(argc, argv); }
