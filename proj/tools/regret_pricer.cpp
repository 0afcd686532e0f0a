#include "regret_pricer/cli.hpp"

int main(int argc, char** argv) { return regret_pricer::cli::run(argc, argv); }
