#pragma once

#include <stdexcept>
#include <string>

namespace cgfit {

// Every failure thrown by the library derives from Error, so callers (and the
// command-line driver) can map failures onto exit codes without enumerating
// individual causes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad argument values or incompatible shapes passed to an operation.
class ArgumentError : public Error {
 public:
  using Error::Error;
};

// Evaluation outside the domain of a compactly supported basis.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Invalid run configuration: unstable step size, cutoff larger than half the
// box, inconsistent recording interval, and similar setup mistakes.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Near-singular normal equations or information matrix; the message carries
// the offending eigenvalue or the empty columns.
class ConditioningError : public Error {
 public:
  using Error::Error;
};

// Candidate potential whose Gibbs weight does not decay at the ends of the
// quadrature domain (non-confining coefficients).
class IntegrabilityError : public Error {
 public:
  using Error::Error;
};

// Monte Carlo proposal tuning left the acceptance rate outside usable bounds.
class TuningError : public Error {
 public:
  using Error::Error;
};

// An iterative solve or a resampling experiment failed to produce a usable
// result (too many failed replicates, exhausted line search, ...).
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

// A file could not be opened or created.
class IoError : public Error {
 public:
  using Error::Error;
};

// A file was read but its contents do not match the expected format.
class ParseError : public Error {
 public:
  using Error::Error;
};

// Requested an operation the library deliberately does not provide.
class UnsupportedError : public Error {
 public:
  using Error::Error;
};

}  // namespace cgfit
