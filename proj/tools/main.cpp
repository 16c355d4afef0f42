#include "qattract/cli.hpp"

int main(int argc, char** argv) { return qattract::run_cli(argc, argv); }
