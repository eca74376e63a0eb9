#pragma once

#include <stdexcept>
#include <string>

namespace resbench {

/// Base of every error raised by the library. Carries a stable machine-readable
/// code (used by the CLI for its JSON error object) next to the message.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& what)
        : std::runtime_error(what), code_(std::move(code)) {}

    const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

#define RESBENCH_DEFINE_ERROR(Name, Code)                                   \
    class Name : public Error {                                             \
    public:                                                                 \
        explicit Name(const std::string& what) : Error(Code, what) {}       \
    }

RESBENCH_DEFINE_ERROR(InvalidArgument, "invalid_argument");
RESBENCH_DEFINE_ERROR(DomainError, "domain_error");
RESBENCH_DEFINE_ERROR(BetaZero, "beta_zero");
RESBENCH_DEFINE_ERROR(NoConvergence, "no_convergence");
RESBENCH_DEFINE_ERROR(NearSpectrum, "near_spectrum");
RESBENCH_DEFINE_ERROR(DegenerateDenominator, "degenerate_denominator");
RESBENCH_DEFINE_ERROR(DegenerateCubic, "degenerate_cubic");
RESBENCH_DEFINE_ERROR(ResonantDivisor, "resonant_divisor");
RESBENCH_DEFINE_ERROR(Overflow, "overflow");
RESBENCH_DEFINE_ERROR(SchemaError, "schema_error");

#undef RESBENCH_DEFINE_ERROR

}  // namespace resbench
