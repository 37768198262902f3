#include "cli.hpp"

int main(int argc, char** argv) { return blochsim::cli::run(argc, argv); }
