#include "avqe/harness.hpp"

int main(int argc, char** argv) { return avqe::run_cli(argc, argv); }
