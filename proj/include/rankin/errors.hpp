#ifndef RANKIN_ERRORS_HPP
#define RANKIN_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace rankin {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InvalidInput : Error { using Error::Error; };
struct Unsupported : Error { using Error::Error; };
struct IntegrityError : Error { using Error::Error; };
struct PoleError : Error { using Error::Error; };
struct PreconditionError : Error { using Error::Error; };
struct NormalizationError : Error { using Error::Error; };
struct ConvergenceViolation : Error { using Error::Error; };
struct ReconstructionFailed : Error { using Error::Error; };
struct NetworkError : Error { using Error::Error; };
struct NotFound : Error { using Error::Error; };

struct FormatError : Error {
  long offset;
  FormatError(const std::string& what, long off = -1) : Error(what), offset(off) {}
};

// x is not integral at the prime; carries v_P(x) < 0.
struct NotIntegral : Error {
  long valuation;
  explicit NotIntegral(long v, const std::string& ctx = "")
      : Error("not integral (valuation " + std::to_string(v) + ")" + (ctx.empty() ? "" : ": " + ctx)),
        valuation(v) {}
};

// coefficient data too short; `required` is the n_max that would suffice.
struct InsufficientData : Error {
  long required;
  InsufficientData(const std::string& what, long req) : Error(what), required(req) {}
};

}  // namespace rankin

#endif
