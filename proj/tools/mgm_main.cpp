#include "mgm/cli.hpp"

int main(int argc, char** argv) { return mgm::run_cli(argc, argv); }
