#include "panscope_tools/cli.hpp"

int main(int argc, char** argv) { return panscope::cli::run(argc, argv); }
