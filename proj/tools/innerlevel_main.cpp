#include "innerlevel/cli.hpp"

int main(int argc, char** argv) { return innerlevel::cli::run(argc, argv); }
