#pragma once

#include <string>

#include "kobayashi/domain.hpp"

namespace kobayashi {

/// Parses "a", "a+bi", "a-bi", "bi", "-i". Throws ParseError.
cplx parse_complex(const std::string& text);

/// Comma-separated complex literals, e.g. "0.5,0.1-0.2i". Throws ParseError
/// when the number of coordinates differs from dim (dim > 0).
ComplexPoint parse_point(const std::string& text, int dim = 0);

}  // namespace kobayashi
