#include "dipc/cli.hpp"

int main(int argc, char** argv) { return dipc::cli::run(argc, argv); }
