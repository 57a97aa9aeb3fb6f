#include "tcage/cli.hpp"

int main(int argc, char** argv) { return tcage::run_cli(argc, argv); }
