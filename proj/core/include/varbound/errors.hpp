#ifndef VARBOUND_ERRORS_HPP
#define VARBOUND_ERRORS_HPP

#include <sstream>
#include <stdexcept>
#include <string>

namespace varbound {

// Error categories map onto the CLI exit codes: config -> 2, data -> 3,
// numeric -> 4, verification -> 5.
class Error : public std::runtime_error {
  public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

class ConfigError : public Error {
  public:
    using Error::Error;
};

// Bad or insufficient market data, parse failures, ordering violations.
class DataError : public Error {
  public:
    using Error::Error;
};

class ParseError : public DataError {
  public:
    using DataError::DataError;
};

class InsufficientDataError : public DataError {
  public:
    using DataError::DataError;
};

// Quadrature non-convergence, NaNs mid-solve, CFL refusals, domain errors.
class NumericError : public Error {
  public:
    using Error::Error;
};

class VerificationError : public Error {
  public:
    using Error::Error;
};

}  // namespace varbound

#define VB_THROW(etype, msg)                 \
    do {                                     \
        std::ostringstream vb_oss_;          \
        vb_oss_ << msg;                      \
        throw etype(vb_oss_.str());          \
    } while (0)

#define VB_REQUIRE(cond, etype, msg)         \
    do {                                     \
        if (!(cond)) VB_THROW(etype, msg);   \
    } while (0)

#endif
