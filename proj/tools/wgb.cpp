#include "wgb/cli.hpp"

int main(int argc, char** argv) { return wgb::cli::run(argc, argv); }
