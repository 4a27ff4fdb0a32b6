#include "agentpnl/cli.hpp"

int main(int argc, char** argv) { return agentpnl::cli::run(argc, argv); }
