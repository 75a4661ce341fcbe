// core.hpp: shared scalar types, particle statistics and the library error hierarchy.
#pragma once

#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>
#include <string_view>

namespace nmqd {

using Complex = std::complex<double>;

inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;

enum class Statistics { Boson, Fermion };

std::string_view to_string(Statistics s);
Statistics statistics_from_string(std::string_view name);

// Base of everything the library throws on purpose.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
public:
    using Error::Error;
};

// Adaptive quadrature failed to reach its tolerance; carries the achieved estimate.
class QuadratureError : public Error {
public:
    QuadratureError(const std::string& what, double residual)
        : Error(what), residual_(residual) {}
    double residual() const noexcept { return residual_; }

private:
    double residual_;
};

class RootFindingError : public Error {
public:
    RootFindingError(const std::string& what, double lo, double hi)
        : Error(what), lo_(lo), hi_(hi) {}
    double bracket_lo() const noexcept { return lo_; }
    double bracket_hi() const noexcept { return hi_; }

private:
    double lo_, hi_;
};

// Time stepping went unstable (|u| grew past 1); a smaller dt usually fixes it.
class InstabilityError : public Error {
public:
    using Error::Error;
};

// A truncated Fock space lost too much weight to its top level.
class TruncationError : public Error {
public:
    using Error::Error;
};

// Dissipative run did not settle before the configured horizon.
class InconclusiveError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

} // namespace nmqd
