#include "laudit/harness/cli.hpp"

int main(int argc, char** argv) { return laudit::harness::run_cli(argc, argv); }
