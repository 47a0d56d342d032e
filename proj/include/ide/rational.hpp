#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <stdexcept>
#include <string>

namespace ide {

// Base class for all errors thrown by this library.
struct IdeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Exact rational number, always reduced, denominator > 0.
using Rational = boost::multiprecision::cpp_rational;
using Integer = boost::multiprecision::cpp_int;

// Accepts integers ("42", "-7"), fractions ("3/2", "-1/3") and plain
// decimals ("0.25", "-1.5"). No exponent notation.
Rational parse_rational(const std::string& text);

// Prints "p" or "p/q" with q > 0.
std::string rational_to_string(const Rational& r);

inline double to_double(const Rational& r) { return r.template convert_to<double>(); }

}  // namespace ide
