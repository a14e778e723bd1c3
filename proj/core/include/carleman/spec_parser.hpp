#pragma once

#include <iosfwd>
#include <string>

#include "carleman/field.hpp"

namespace carleman {

/// A parsed system description: the vector field plus its initial time.
struct ParsedSystem {
  MaclaurinField field;
  double t0 = 0.0;
};

/// Parse the textual system format:
///
///   # comment
///   dimension = 2
///   t0 = 0
///   term = [1 0] [0 -1]      # first bracket: exponents, second: coefficients
///
/// `dimension` is required and must come before any `term`. `t0` is optional
/// (default 0). Each `term` gives an exponent vector and a coefficient vector,
/// both of length `dimension`; exponents must be non-negative, the all-zero
/// exponent (a drift term) is allowed. Duplicate exponent vectors are summed;
/// terms that sum to zero are dropped. Unknown keys are rejected.
///
/// Throws std::invalid_argument with a line-numbered message on any
/// malformed input.
ParsedSystem parse_field(const std::string& text);
ParsedSystem parse_field(std::istream& in);
ParsedSystem parse_field_file(const std::string& path);

}  // namespace carleman
