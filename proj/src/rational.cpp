#include "sphfrieze/rational.hpp"

#include <cctype>
#include <ostream>

namespace sphf {

namespace {

bool valid_integer_token(const std::string& s, bool allow_sign) {
    if (s.empty()) return false;
    std::size_t i = 0;
    if (allow_sign && (s[0] == '-' || s[0] == '+')) i = 1;
    if (i == s.size()) return false;
    for (; i < s.size(); ++i)
        if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
    return true;
}

}  // namespace

Rat Rat::parse(const std::string& text) {
    const auto slash = text.find('/');
    std::string num = slash == std::string::npos ? text : text.substr(0, slash);
    std::string den = slash == std::string::npos ? std::string("1") : text.substr(slash + 1);
    if (!valid_integer_token(num, true) || !valid_integer_token(den, false))
        throw ParseError("malformed rational '" + text + "'");
    if (num[0] == '+') num.erase(0, 1);
    mpz_class n(num), d(den);
    if (d == 0) throw ZeroDenominator("zero denominator in '" + text + "'");
    mpq_class q(n, d);
    q.canonicalize();
    return Rat(std::move(q));
}

std::string Rat::str() const {
    if (v_.get_den() == 1) return v_.get_num().get_str();
    return v_.get_num().get_str() + "/" + v_.get_den().get_str();
}

std::ostream& operator<<(std::ostream& os, const Rat& r) { return os << r.str(); }

std::optional<Rat> sqrt_exact(const Rat& q, bool require_nonnegative_root) {
    if (q.sign() < 0) {
        if (require_nonnegative_root)
            throw NegativeSquareRoot("sqrt_exact of negative value " + q.str());
        return std::nullopt;
    }
    mpz_class num = q.num(), den = q.den();
    if (mpz_perfect_square_p(num.get_mpz_t()) == 0) return std::nullopt;
    if (mpz_perfect_square_p(den.get_mpz_t()) == 0) return std::nullopt;
    mpz_class rn, rd;
    mpz_sqrt(rn.get_mpz_t(), num.get_mpz_t());
    mpz_sqrt(rd.get_mpz_t(), den.get_mpz_t());
    mpq_class root(rn, rd);
    root.canonicalize();
    return Rat(std::move(root));
}

}  // namespace sphf
