#pragma once

#include <cmath>
#include <optional>
#include <string>

#include "sphfrieze/rational.hpp"

namespace sphf {

// Element of Q(sqrt(d)) for a fixed nonnegative rational radicand d:
// value = a + b*sqrt(d). Plain rationals carry d == 0. The radicand is
// normalized so a perfect-square d collapses to a rational; with d kept
// non-square, the (a, b) representation is unique and equality is
// componentwise. Two elements with distinct non-square radicands cannot be
// combined (one extension field per computation).
class QuadExt {
  public:
    QuadExt() = default;
    QuadExt(int n) : a_(n) {}
    QuadExt(long n) : a_(n) {}
    QuadExt(Rat r) : a_(std::move(r)) {}
    QuadExt(Rat a, Rat b, Rat d) : a_(std::move(a)), b_(std::move(b)), d_(std::move(d)) {
        normalize();
    }

    static QuadExt root(const Rat& d) {
        if (d.sign() < 0) throw NegativeSquareRoot("square root of negative radicand " + d.str());
        return QuadExt(Rat(0), Rat(1), d);
    }

    const Rat& rational_part() const { return a_; }
    const Rat& radical_part() const { return b_; }
    const Rat& radicand() const { return d_; }

    bool is_rational() const { return b_.is_zero(); }
    bool is_zero() const { return a_.is_zero() && b_.is_zero(); }

    // The exact rational value; throws when the element genuinely involves
    // the radical.
    Rat rat() const {
        if (!is_rational())
            throw ExactSqrtUnavailable("value " + str() + " is not rational");
        return a_;
    }

    double to_double() const {
        double root = std::sqrt(d_.to_double());
        return a_.to_double() + b_.to_double() * root;
    }

    std::string str() const {
        if (is_rational()) return a_.str();
        return a_.str() + " + (" + b_.str() + ")*sqrt(" + d_.str() + ")";
    }

    QuadExt operator-() const { return QuadExt(-a_, -b_, d_); }

    friend QuadExt operator+(const QuadExt& x, const QuadExt& y) {
        Rat d = merged_radicand(x, y);
        return QuadExt(x.a_ + y.a_, x.b_ + y.b_, d);
    }
    friend QuadExt operator-(const QuadExt& x, const QuadExt& y) {
        Rat d = merged_radicand(x, y);
        return QuadExt(x.a_ - y.a_, x.b_ - y.b_, d);
    }
    friend QuadExt operator*(const QuadExt& x, const QuadExt& y) {
        Rat d = merged_radicand(x, y);
        return QuadExt(x.a_ * y.a_ + x.b_ * y.b_ * d, x.a_ * y.b_ + x.b_ * y.a_, d);
    }
    friend QuadExt operator/(const QuadExt& x, const QuadExt& y) {
        if (y.is_zero()) throw ZeroDenominator("division by zero field element");
        Rat d = merged_radicand(x, y);
        // Multiply by the conjugate; the norm of a nonzero element is
        // nonzero because d is non-square whenever b != 0.
        Rat norm = y.a_ * y.a_ - y.b_ * y.b_ * d;
        if (norm.is_zero()) throw ZeroDenominator("zero field norm in division");
        Rat na = x.a_ * y.a_ - x.b_ * y.b_ * d;
        Rat nb = x.b_ * y.a_ - x.a_ * y.b_;
        return QuadExt(na / norm, nb / norm, d);
    }

    QuadExt& operator+=(const QuadExt& o) { return *this = *this + o; }
    QuadExt& operator-=(const QuadExt& o) { return *this = *this - o; }
    QuadExt& operator*=(const QuadExt& o) { return *this = *this * o; }
    QuadExt& operator/=(const QuadExt& o) { return *this = *this / o; }

    friend bool operator==(const QuadExt& x, const QuadExt& y) {
        if (!x.compatible(y)) return false;
        return x.a_ == y.a_ && x.b_ == y.b_;
    }
    friend bool operator!=(const QuadExt& x, const QuadExt& y) { return !(x == y); }

  private:
    Rat a_{0}, b_{0}, d_{0};

    bool compatible(const QuadExt& o) const {
        return b_.is_zero() || o.b_.is_zero() || d_ == o.d_;
    }

    static Rat merged_radicand(const QuadExt& x, const QuadExt& y) {
        if (x.b_.is_zero()) return y.d_;
        if (y.b_.is_zero()) return x.d_;
        if (x.d_ != y.d_)
            throw ConfigMismatch("mixing radicands sqrt(" + x.d_.str() + ") and sqrt(" +
                                 y.d_.str() + ")");
        return x.d_;
    }

    void normalize() {
        if (b_.is_zero()) {
            d_ = Rat(0);
            return;
        }
        if (d_.is_zero()) {
            b_ = Rat(0);
            return;
        }
        if (d_.sign() < 0)
            throw NegativeSquareRoot("negative radicand " + d_.str());
        if (auto root = sqrt_exact(d_)) {
            a_ += b_ * *root;
            b_ = Rat(0);
            d_ = Rat(0);
        }
    }
};

inline bool scalar_is_zero(const QuadExt& v) { return v.is_zero(); }

}  // namespace sphf
