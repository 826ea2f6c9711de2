#include "commands.hpp"

int main(int argc, char** argv) { return neglectnet::cli::run(argc, argv); }
