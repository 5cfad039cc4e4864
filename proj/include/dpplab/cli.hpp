#ifndef DPPLAB_CLI_HPP
#define DPPLAB_CLI_HPP

namespace dpp {

// Command-line front end. Subcommands: simulate, estimate, fit, bound,
// oracle, experiment. Prints one JSON document on stdout; logs and error
// text go to stderr. Exit codes: 0 success, 2 input/validation, 3
// estimation, 4 fitting, 5 bounds, 6 verdict failure.
int run_cli(int argc, const char* const* argv);

}  // namespace dpp

#endif
