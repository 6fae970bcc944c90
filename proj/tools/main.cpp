#include "harness.hpp"

int main(int argc, char** argv) { return maeig::harness::run_cli(argc, argv); }
