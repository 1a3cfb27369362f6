#pragma once

#include <stdexcept>
#include <string>

namespace slackal {

// Base of every error the library throws. kind() is the stable name used in
// the CLI's machine-readable error output.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
    [[nodiscard]] virtual const char* kind() const noexcept { return "Error"; }
};

#define SLACKAL_DEFINE_ERROR(Name)                                              \
    class Name : public Error {                                                 \
    public:                                                                     \
        using Error::Error;                                                     \
        [[nodiscard]] const char* kind() const noexcept override { return #Name; } \
    }

SLACKAL_DEFINE_ERROR(FitError);
SLACKAL_DEFINE_ERROR(DuplicateInputError);
SLACKAL_DEFINE_ERROR(DomainError);
SLACKAL_DEFINE_ERROR(ShapeError);
SLACKAL_DEFINE_ERROR(StateError);
SLACKAL_DEFINE_ERROR(InfeasibleGridError);
SLACKAL_DEFINE_ERROR(IOError);
SLACKAL_DEFINE_ERROR(ConfigError);

#undef SLACKAL_DEFINE_ERROR

// Characteristic-function inversion did not reach the requested tolerance.
class AccuracyError : public Error {
public:
    AccuracyError(const std::string& what, double achieved_bound)
        : Error(what), achieved_bound_(achieved_bound) {}
    [[nodiscard]] const char* kind() const noexcept override { return "AccuracyError"; }
    [[nodiscard]] double achieved_bound() const noexcept { return achieved_bound_; }

private:
    double achieved_bound_;
};

} // namespace slackal
