#pragma once

// JSON form of a rational symbol: {"num": [[re, im], ...], "den": [[re, im], ...]},
// coefficients in ascending powers. A bare number is accepted as a real coefficient.

#include <complex>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "hardy/error.hpp"
#include "hardy/rational.hpp"

namespace hardy {

using json = nlohmann::json;

class SymbolFormatError : public Error {
public:
    using Error::Error;
};

inline json complex_to_json(cplx c) { return json::array({c.real(), c.imag()}); }

inline cplx complex_from_json(const json& j, const std::string& where) {
    if (j.is_number()) return {j.get<double>(), 0.0};
    if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
        return {j[0].get<double>(), j[1].get<double>()};
    throw SymbolFormatError(where + ": expected [re, im] or a number, got " + j.dump());
}

inline json poly_to_json(const Poly& p) {
    json arr = json::array();
    for (const auto& c : p.coeffs()) arr.push_back(complex_to_json(c));
    return arr;
}

inline Poly poly_from_json(const json& j, const std::string& where) {
    if (!j.is_array()) throw SymbolFormatError(where + ": expected an array of coefficients");
    std::vector<cplx> v;
    v.reserve(j.size());
    for (std::size_t k = 0; k < j.size(); ++k) v.push_back(complex_from_json(j[k], where + "[" + std::to_string(k) + "]"));
    return Poly(std::move(v));
}

inline json symbol_to_json(const RationalMap& r) {
    return json{{"num", poly_to_json(r.num())}, {"den", poly_to_json(r.den())}};
}

inline RationalMap symbol_from_json(const json& j) {
    if (!j.is_object() || !j.contains("num") || !j.contains("den"))
        throw SymbolFormatError("symbol must be an object with \"num\" and \"den\" arrays");
    Poly num = poly_from_json(j.at("num"), "num");
    Poly den = poly_from_json(j.at("den"), "den");
    if (den.is_zero()) throw SymbolFormatError("den: denominator is identically zero");
    return RationalMap(std::move(num), std::move(den));
}

/// Parses JSON text; syntax errors carry the byte offset reported by the parser.
inline json parse_json_text(const std::string& text, const std::string& source) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw SymbolFormatError(source + ": malformed JSON at byte " + std::to_string(e.byte) + ": " + e.what());
    }
}

inline json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw SymbolFormatError(path + ": cannot open file");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_json_text(ss.str(), path);
}

inline RationalMap read_symbol_file(const std::string& path) { return symbol_from_json(read_json_file(path)); }

}  // namespace hardy
