#include "dm/cli.hpp"

int main(int argc, char** argv) { return dm::cli::dispatch(argc, argv); }
