#include "ide/rational.hpp"

#include <cctype>

namespace ide {

namespace {

bool all_digits(const std::string& s) {
    if (s.empty()) return false;
    for (char c : s)
        if (!std::isdigit(static_cast<unsigned char>(c))) return false;
    return true;
}

}  // namespace

Rational parse_rational(const std::string& text) {
    std::string s = text;
    bool negative = false;
    if (!s.empty() && (s[0] == '+' || s[0] == '-')) {
        negative = s[0] == '-';
        s.erase(0, 1);
    }
    if (s.empty()) throw IdeError("invalid rational literal: '" + text + "'");

    Rational value;
    auto slash = s.find('/');
    auto dot = s.find('.');
    if (slash != std::string::npos) {
        std::string num = s.substr(0, slash);
        std::string den = s.substr(slash + 1);
        if (!all_digits(num) || !all_digits(den))
            throw IdeError("invalid rational literal: '" + text + "'");
        Integer q(den);
        if (q == 0) throw IdeError("zero denominator in rational literal: '" + text + "'");
        value = Rational(Integer(num), q);
    } else if (dot != std::string::npos) {
        std::string ip = s.substr(0, dot);
        std::string fp = s.substr(dot + 1);
        if (ip.empty()) ip = "0";
        if ((!all_digits(ip)) || (!fp.empty() && !all_digits(fp)))
            throw IdeError("invalid rational literal: '" + text + "'");
        Integer scale = 1;
        for (std::size_t i = 0; i < fp.size(); ++i) scale *= 10;
        value = Rational(Integer(ip) * scale + (fp.empty() ? Integer(0) : Integer(fp)), scale);
    } else {
        if (!all_digits(s)) throw IdeError("invalid rational literal: '" + text + "'");
        value = Rational(Integer(s));
    }
    return negative ? Rational(-value) : value;
}

std::string rational_to_string(const Rational& r) {
    std::string s = numerator(r).str();
    if (denominator(r) != 1) s += "/" + denominator(r).str();
    return s;
}

}  // namespace ide
