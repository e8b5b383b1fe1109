#ifndef QUANTBAND_ERRORS_HPP
#define QUANTBAND_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace quantband {

// Invalid user-supplied configuration: bad option values, malformed config
// files, inconsistent grids or levels.  CLI exit code 2.
class ConfigError : public std::invalid_argument {
 public:
  explicit ConfigError(const std::string& msg) : std::invalid_argument(msg) {}
};

// Invalid or unusable input data: empty samples, zero total weight,
// missing columns, non-integer counts where integers are required.
// CLI exit code 3.
class DataError : public std::invalid_argument {
 public:
  explicit DataError(const std::string& msg) : std::invalid_argument(msg) {}
};

// Numerical failure: non-convergence, singular designs, all grid points
// excluded from the critical-value computation.  CLI exit code 4.
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace quantband

#endif  // QUANTBAND_ERRORS_HPP
