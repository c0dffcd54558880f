#include "medbounds/cli.hpp"

int main(int argc, char** argv) { return medbounds::run_cli(argc, argv); }
