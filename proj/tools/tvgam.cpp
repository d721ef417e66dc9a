#include "tvgam/cli.hpp"

int main(int argc, char** argv) { return tvgam::cli::run(argc, argv); }
