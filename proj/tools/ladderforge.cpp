#include "ladderforge/cli.hpp"

int main(int argc, char** argv) { return ladderforge::cli::run(argc, argv); }
