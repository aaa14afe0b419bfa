#ifndef MCSIM_ERROR_HPP
#define MCSIM_ERROR_HPP

#include <stdexcept>
#include <string>

namespace mcsim {

enum class ErrorCode {
  InvalidArgument,
  DegenerateVariance,
  RetryCapExceeded,
  NotConverged,
};

// Single exception type for the core; the C layer maps `code()` onto status values.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void throw_invalid(const std::string& what) {
  throw Error(ErrorCode::InvalidArgument, what);
}

}  // namespace mcsim

#endif
