#include "commands.hpp"

int main(int argc, char** argv) { return taylorlaw::cli::run(argc, argv); }
