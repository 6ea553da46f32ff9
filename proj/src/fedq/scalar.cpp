#include "fedq/scalar.hpp"

#include <cstdio>
#include <cstdlib>
#include <sstream>

namespace fedq {

namespace {

// Splits "a+b i" / "a-b i" / "a" / "b i" at the sign separating the two parts.
// The first character may itself be a sign.
bool split_complex_text(const std::string& s, std::string& re_part, std::string& im_part) {
    std::string t;
    for (char c : s)
        if (!isspace((unsigned char)c)) t.push_back(c);
    if (t.empty()) return false;

    bool has_i = t.find('i') != std::string::npos;
    if (!has_i) {
        re_part = t;
        im_part = "0";
        return true;
    }
    size_t split = std::string::npos;
    for (size_t k = 1; k < t.size(); ++k) {
        if ((t[k] == '+' || t[k] == '-') && t[k - 1] != '/' && t[k - 1] != '+' && t[k - 1] != '-') {
            split = k;  // last such sign separates re from im
        }
    }
    std::string a, b;
    if (split == std::string::npos) {
        a = "0";
        b = t;
    } else {
        a = t.substr(0, split);
        b = t.substr(split);  // keeps the sign
    }
    // b must end with 'i'
    if (b.empty() || b.back() != 'i') {
        // forms like "i+1" are not produced by us; reject
        return false;
    }
    b.pop_back();
    if (b.empty() || b == "+") b = "1";
    if (b == "-") b = "-1";
    re_part = a;
    im_part = b;
    return true;
}

mpq_class parse_rat(const std::string& s) {
    std::string t = (!s.empty() && s[0] == '+') ? s.substr(1) : s;
    mpq_class q;
    if (q.set_str(t, 10) != 0) throw ScalarError("cannot parse rational '" + s + "'");
    q.canonicalize();
    return q;
}

std::string rat_str(const mpq_class& q) { return q.get_str(); }

double parse_double(const std::string& s) {
    // accept "p/q" as well as plain decimals
    auto slash = s.find('/');
    if (slash != std::string::npos) {
        double num = std::strtod(s.substr(0, slash).c_str(), nullptr);
        double den = std::strtod(s.substr(slash + 1).c_str(), nullptr);
        if (den == 0.0) throw ScalarError("zero denominator in '" + s + "'");
        return num / den;
    }
    char* end = nullptr;
    double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str()) throw ScalarError("cannot parse number '" + s + "'");
    return v;
}

}  // namespace

std::string RationalComplex::str() const {
    if (im_ == 0) return rat_str(re_);
    std::string imabs = rat_str(im_ > 0 ? im_ : mpq_class(-im_));
    std::string tail = (im_ > 0 ? "+" : "-") + imabs + " i";
    if (re_ == 0) {
        return (im_ > 0 ? "" : "-") + imabs + " i";
    }
    return rat_str(re_) + tail;
}

RationalComplex RationalComplex::parse(const std::string& text) {
    std::string a, b;
    if (!split_complex_text(text, a, b)) throw ScalarError("cannot parse scalar '" + text + "'");
    return RationalComplex(parse_rat(a), parse_rat(b));
}

std::string ApproxComplex::str() const {
    char buf[80];
    double re = z_.real(), im = z_.imag();
    if (std::abs(im) <= kEps) {
        std::snprintf(buf, sizeof buf, "%.17g", re);
        return buf;
    }
    if (std::abs(re) <= kEps) {
        std::snprintf(buf, sizeof buf, "%.17g i", im);
        return buf;
    }
    std::snprintf(buf, sizeof buf, "%.17g%+.17g i", re, im);
    return buf;
}

ApproxComplex ApproxComplex::parse(const std::string& text) {
    std::string a, b;
    if (!split_complex_text(text, a, b)) throw ScalarError("cannot parse scalar '" + text + "'");
    return ApproxComplex(parse_double(a), parse_double(b));
}

}  // namespace fedq
