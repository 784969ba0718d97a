#pragma once

#include <stdexcept>
#include <string>

namespace mpp {

// Error taxonomy shared by the library and the CLI. The CLI maps these onto
// process exit codes: validation -> 2, numeric -> 3, io -> 4.
class error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad parameters, malformed configuration, out-of-range requests.
class validation_error : public error {
 public:
  using error::error;
};

// A computation that cannot proceed numerically (degenerate projection,
// singular update, rank-deficient deflation).
class numeric_error : public error {
 public:
  using error::error;
};

// The projected variance m2 collapsed: the well-definedness condition fails
// empirically in the probed direction.
class degenerate_projection_error : public numeric_error {
 public:
  using numeric_error::numeric_error;
};

class io_error : public error {
 public:
  using error::error;
};

}  // namespace mpp
