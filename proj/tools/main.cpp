#include "commands.hpp"

int main(int argc, char** argv) { return hodgeflow::cli::run(argc, argv); }
