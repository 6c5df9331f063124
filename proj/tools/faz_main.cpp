#include "faz/cli.hpp"

int main(int argc, char** argv) { return faz::cli::run(argc, argv); }
