#include "mdpstab/rational.hpp"

#include <boost/multiprecision/gmp.hpp>

#include <cctype>

namespace mdpstab {

using Int = boost::multiprecision::mpz_int;

namespace {

bool parse_integer(const std::string& s, Int& out) {
    if (s.empty()) return false;
    std::size_t i = (s[0] == '+' || s[0] == '-') ? 1 : 0;
    if (i == s.size()) return false;
    for (std::size_t j = i; j < s.size(); ++j)
        if (!std::isdigit(static_cast<unsigned char>(s[j]))) return false;
    out = Int(s);
    return true;
}

}  // namespace

std::optional<Rat> parse_rational(const std::string& text) {
    std::string s;
    for (char c : text)
        if (!std::isspace(static_cast<unsigned char>(c))) s.push_back(c);
    if (s.empty()) return std::nullopt;

    if (auto slash = s.find('/'); slash != std::string::npos) {
        Int num, den;
        if (!parse_integer(s.substr(0, slash), num)) return std::nullopt;
        if (!parse_integer(s.substr(slash + 1), den)) return std::nullopt;
        if (den == 0) return std::nullopt;
        return Rat(num, den);
    }
    if (auto dot = s.find('.'); dot != std::string::npos) {
        std::string head = s.substr(0, dot);
        std::string frac = s.substr(dot + 1);
        if (frac.empty()) return std::nullopt;
        bool neg = !head.empty() && head[0] == '-';
        if (head == "-" || head == "+" || head.empty()) head += "0";
        Int ip, fp;
        if (!parse_integer(head, ip)) return std::nullopt;
        if (!parse_integer(frac, fp)) return std::nullopt;
        Int den = 1;
        for (std::size_t i = 0; i < frac.size(); ++i) den *= 10;
        Int ip_abs = ip < 0 ? Int(-ip) : ip;
        Int num = ip_abs * den + fp;
        Rat value(num, den);
        return neg ? Rat(-value) : value;
    }
    Int v;
    if (!parse_integer(s, v)) return std::nullopt;
    return Rat(v);
}

std::string format_rational(const Rat& x) {
    if (denominator(x) == 1) return numerator(x).str();
    return numerator(x).str() + "/" + denominator(x).str();
}

Rat floor_to_multiple(const Rat& x, const Rat& step) {
    Rat q = x / step;
    Int k = numerator(q) / denominator(q);
    if (q < 0 && k * denominator(q) != numerator(q)) k -= 1;
    return Rat(k) * step;
}

}  // namespace mdpstab
