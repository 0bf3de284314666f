#include "ermakov/runner.hpp"

int main(int argc, char** argv) { return ermakov::cli::main_cli(argc, argv); }
