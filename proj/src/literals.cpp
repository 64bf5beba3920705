#include "kobayashi/literals.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <vector>

#include "kobayashi/errors.hpp"

namespace kobayashi {

namespace {

double parse_real(const std::string& s, const std::string& whole) {
    if (s.empty() || std::isspace(static_cast<unsigned char>(s.front())))
        throw ParseError("malformed complex literal '" + whole + "'");
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end != s.c_str() + s.size() || !std::isfinite(v)) throw ParseError("malformed complex literal '" + whole + "'");
    return v;
}

std::string trim(const std::string& s) {
    size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

}  // namespace

cplx parse_complex(const std::string& text) {
    const std::string s = trim(text);
    if (s.empty()) throw ParseError("empty complex literal");
    if (s.back() != 'i') return {parse_real(s, text), 0.0};
    const std::string body = s.substr(0, s.size() - 1);
    // Split at the last sign that is not leading and not part of an exponent.
    size_t split = std::string::npos;
    for (size_t k = body.size(); k-- > 1;) {
        if ((body[k] == '+' || body[k] == '-') && body[k - 1] != 'e' && body[k - 1] != 'E') {
            split = k;
            break;
        }
    }
    auto imag_part = [&](const std::string& t) {
        if (t.empty() || t == "+") return 1.0;
        if (t == "-") return -1.0;
        return parse_real(t, text);
    };
    if (split == std::string::npos) return {0.0, imag_part(body)};
    return {parse_real(body.substr(0, split), text), imag_part(body.substr(split))};
}

ComplexPoint parse_point(const std::string& text, int dim) {
    std::vector<cplx> parts;
    size_t start = 0;
    for (;;) {
        const size_t comma = text.find(',', start);
        parts.push_back(parse_complex(text.substr(start, comma == std::string::npos ? std::string::npos : comma - start)));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    if (dim > 0 && static_cast<int>(parts.size()) != dim)
        throw ParseError("expected " + std::to_string(dim) + " coordinates in '" + text + "'");
    ComplexPoint p(static_cast<Eigen::Index>(parts.size()));
    for (size_t i = 0; i < parts.size(); ++i) p(static_cast<Eigen::Index>(i)) = parts[i];
    return p;
}

}  // namespace kobayashi
