#pragma once

namespace taylorlaw::cli {

// Entry point of the taylorlaw command. Exit codes: 0 success, 2 invalid
// parameters or usage, 1 any other failure.
int run(int argc, char** argv);

}  // namespace taylorlaw::cli
