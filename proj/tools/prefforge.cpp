#include "prefforge/cli.hpp"

int main(int argc, char** argv) { return prefforge::cli::run(argc, argv); }
