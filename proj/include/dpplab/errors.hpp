#ifndef DPPLAB_ERRORS_HPP
#define DPPLAB_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace dpp {

enum class errc {
  invalid_input,
  io_error,
  not_symmetric,
  spectrum_out_of_range,
  numerical_singularity,
  zero_in_pivot_row,
  refuse_large_d,
  empty_sample,
  negative_cov_argument,
  zero_sign_argument,
  assumption_violated,
  ambiguous_sign,
  no_admissible_start,
  derivative_guard,
  non_positive_eta,
  invalid_eta,
  non_decaying_bound,
  t_too_small,
};

const char* errc_name(errc c);

class Error : public std::runtime_error {
 public:
  Error(errc code, const std::string& msg)
      : std::runtime_error(std::string(errc_name(code)) + ": " + msg), code_(code) {}
  errc code() const noexcept { return code_; }

 private:
  errc code_;
};

[[noreturn]] inline void raise(errc code, const std::string& msg) { throw Error(code, msg); }

}  // namespace dpp

#endif
