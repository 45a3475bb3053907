#include "famext/rational.hpp"

#include <cctype>

namespace famext {

namespace {

// Accepts an optional leading '-' followed by one or more digits.
bool valid_integer_token(const std::string& s) {
    if (s.empty()) return false;
    std::size_t i = (s[0] == '-') ? 1 : 0;
    if (i == s.size()) return false;
    for (; i < s.size(); ++i) {
        if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
    }
    return true;
}

mpz_class parse_integer(const std::string& s) {
    if (!valid_integer_token(s)) throw DomainError("malformed rational component: '" + s + "'");
    return mpz_class(s, 10);
}

}  // namespace

Rat parse_rat(const std::string& text) {
    const auto slash = text.find('/');
    mpz_class num, den;
    if (slash == std::string::npos) {
        num = parse_integer(text);
        den = 1;
    } else {
        num = parse_integer(text.substr(0, slash));
        den = parse_integer(text.substr(slash + 1));
        if (den == 0) throw DomainError("rational with zero denominator: '" + text + "'");
    }
    Rat r(num, den);
    r.canonicalize();
    return r;
}

std::string rat_to_string(const Rat& value) {
    Rat v = value;
    v.canonicalize();
    if (v.get_den() == 1) return v.get_num().get_str();
    return v.get_num().get_str() + "/" + v.get_den().get_str();
}

}  // namespace famext
