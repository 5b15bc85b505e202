#pragma once

#include <gmpxx.h>

#include <iosfwd>
#include <optional>
#include <string>

#include "sphfrieze/errors.hpp"

namespace sphf {

// Arbitrary-precision rational, always kept in lowest terms with positive
// denominator. Construction from a zero denominator throws instead of
// tripping GMP's division-by-zero signal.
class Rat {
  public:
    Rat() : v_(0) {}
    Rat(int n) : v_(n) {}
    Rat(long n) : v_(n) {}
    Rat(long n, long d) {
        if (d == 0) throw ZeroDenominator("rational with zero denominator");
        v_ = mpq_class(n, d);
        v_.canonicalize();
    }
    explicit Rat(const mpz_class& n) : v_(n) {}
    explicit Rat(mpq_class q) : v_(std::move(q)) {
        if (v_.get_den() == 0) throw ZeroDenominator("rational with zero denominator");
        v_.canonicalize();
    }

    // Accepts "num" or "num/den" with optional leading '-' (or '+') on the
    // numerator; rejects zero denominators and malformed text.
    static Rat parse(const std::string& text);

    // "num/den"; the "/den" part is omitted when the denominator is 1.
    std::string str() const;

    const mpq_class& raw() const { return v_; }
    mpz_class num() const { return v_.get_num(); }
    mpz_class den() const { return v_.get_den(); }

    bool is_zero() const { return v_ == 0; }
    int sign() const { return sgn(v_); }
    Rat abs() const { return Rat(mpq_class(::abs(v_))); }

    double to_double() const { return v_.get_d(); }

    Rat operator-() const { return Rat(mpq_class(-v_)); }

    Rat& operator+=(const Rat& o) {
        v_ += o.v_;
        return *this;
    }
    Rat& operator-=(const Rat& o) {
        v_ -= o.v_;
        return *this;
    }
    Rat& operator*=(const Rat& o) {
        v_ *= o.v_;
        return *this;
    }
    Rat& operator/=(const Rat& o) {
        if (o.is_zero()) throw ZeroDenominator("division by zero rational");
        v_ /= o.v_;
        return *this;
    }

    friend Rat operator+(Rat a, const Rat& b) { return a += b; }
    friend Rat operator-(Rat a, const Rat& b) { return a -= b; }
    friend Rat operator*(Rat a, const Rat& b) { return a *= b; }
    friend Rat operator/(Rat a, const Rat& b) { return a /= b; }

    friend bool operator==(const Rat& a, const Rat& b) { return a.v_ == b.v_; }
    friend bool operator!=(const Rat& a, const Rat& b) { return a.v_ != b.v_; }
    friend bool operator<(const Rat& a, const Rat& b) { return a.v_ < b.v_; }
    friend bool operator<=(const Rat& a, const Rat& b) { return a.v_ <= b.v_; }
    friend bool operator>(const Rat& a, const Rat& b) { return a.v_ > b.v_; }
    friend bool operator>=(const Rat& a, const Rat& b) { return a.v_ >= b.v_; }

  private:
    mpq_class v_;
};

std::ostream& operator<<(std::ostream& os, const Rat& r);

// Exact nonnegative square root: present iff numerator and denominator are
// both perfect squares. A negative argument throws NegativeSquareRoot when
// require_nonnegative_root is set, and yields nullopt otherwise.
std::optional<Rat> sqrt_exact(const Rat& q, bool require_nonnegative_root = true);

}  // namespace sphf
