#include "semibandit/harness.hpp"

int main(int argc, char** argv) { return semibandit::cli_main(argc, argv); }
