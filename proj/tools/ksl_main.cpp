#include "ksl/commands.hpp"

int main(int argc, char** argv) { return ksl::cli_main(argc, argv); }
