#include "gravomit/io/cli.hpp"

int main(int argc, char** argv) { return gravomit::cli::run(argc, argv); }
