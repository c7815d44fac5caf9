#include "gmom/harness.hpp"

int main(int argc, char** argv) { return gmom::cli_main(argc, argv); }
