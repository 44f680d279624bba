#include "strato/cli.hpp"

int main(int argc, char** argv) { return strato::run_cli(argc, argv); }
