#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sphfrieze/errors.hpp"
#include "sphfrieze/frieze.hpp"
#include "sphfrieze/rational.hpp"
#include "sphfrieze/scalar.hpp"

namespace sphf {

// Exponent vector over a ring's variables; empty means "constant monomial of
// a ring-less polynomial".
using Mono = std::vector<int>;

// Graded lexicographic order, earlier variables more significant. The ring
// lists x-variables before p-variables, so this is the order the canonical
// forms are built on.
struct GradedLex {
    bool operator()(const Mono& a, const Mono& b) const;
};

class Poly;

// Variable universe shared by all polynomials of one symbolic run.
// p-variables square to fixed polynomials in the x-variables (their Heron
// squares); the reduction is applied after every multiplication, so stored
// p-exponents are always 0 or 1.
struct PolyRing {
    std::vector<std::string> names;  // x-variables first, then p-variables
    int n_x = 0;
    std::vector<Poly> p_squares;  // one per p-variable, in x-variables only
};

std::shared_ptr<PolyRing> make_ring(std::vector<std::string> x_names,
                                    std::vector<std::string> p_names = {});

// Install the square of the p-variable with the given index (0-based among
// the p-variables). Must happen before any product forms that square.
void set_p_square(PolyRing& ring, int p_index, const Poly& square);

// Sparse multivariate polynomial with exact rational coefficients over a
// shared ring. Default-constructed and integer/rational polynomials carry no
// ring and act as constants that adopt the other operand's ring.
class Poly {
  public:
    Poly() = default;
    explicit Poly(long c);
    explicit Poly(const Rat& c);

    static Poly variable(std::shared_ptr<const PolyRing> ring, int var);
    static Poly constant(std::shared_ptr<const PolyRing> ring, const Rat& c);

    const std::shared_ptr<const PolyRing>& ring() const { return ring_; }
    bool is_zero() const { return terms_.empty(); }
    bool is_constant() const;
    const Rat& constant_value() const;  // requires is_constant and nonzero
    int total_degree() const;           // 0 for the zero polynomial
    std::size_t term_count() const { return terms_.size(); }
    std::map<Mono, Rat, GradedLex> terms() const;

    Rat eval(const std::vector<Rat>& values) const;
    std::string str() const;

    Poly operator-() const;
    Poly& operator+=(const Poly& o);
    Poly& operator-=(const Poly& o);
    Poly& operator*=(const Poly& o);
    Poly& operator*=(const Rat& c);

    friend Poly operator+(Poly a, const Poly& b) { return a += b; }
    friend Poly operator-(Poly a, const Poly& b) { return a -= b; }
    friend Poly operator*(Poly a, const Poly& b) { return a *= b; }
    friend Poly operator*(Poly a, const Rat& c) { return a *= c; }
    friend Poly operator*(const Rat& c, Poly a) { return a *= c; }
    friend bool operator==(const Poly& a, const Poly& b);

  private:
    // Monomials pack into two words: a 16-bit total degree followed by up to
    // 14 exponent lanes of 8 bits, most significant variable first, so that
    // plain integer comparison is the graded lexicographic order and
    // monomial products are lane-wise adds (exponents are kept below 128).
    struct Key {
        std::uint64_t hi = 0;
        std::uint64_t lo = 0;

        friend auto operator<=>(const Key&, const Key&) = default;
        friend bool operator==(const Key&, const Key&) = default;
    };
    using Terms = std::vector<std::pair<Key, Rat>>;  // ascending, no zeros

    std::shared_ptr<const PolyRing> ring_;
    Terms terms_;

    void harmonize(Poly& other);
    void reduce_p_squares();

    friend std::optional<Poly> exact_divide(const Poly& num, const Poly& div);
    friend struct PolyDetail;
};

// Monomial-ordered long division certificate: the quotient when div divides
// num term-exactly, nothing otherwise. Throws on a zero divisor.
std::optional<Poly> exact_divide(const Poly& num, const Poly& div);

// The designated denominator atoms of one symbolic run plus the clearing
// policy and the monomial budget.
struct AtomContext {
    std::vector<Poly> atoms;
    std::vector<std::string> atom_names;
    bool greedy_clear = true;
    std::size_t monomial_cap = 500000;
};

// numerator / (product of atoms^exponent * product of residual polynomials).
// Arithmetic keeps the numerator polynomial and the atom exponents exact;
// dividing by an entry N/M multiplies M into the numerator and appends N to
// the residual list, which greedy clearing then tries to eliminate by exact
// division. At rest a Laurent entry has an empty residual list.
class TrackedFraction {
  public:
    TrackedFraction() = default;
    explicit TrackedFraction(long c) : num_(c) {}
    explicit TrackedFraction(int c) : num_(static_cast<long>(c)) {}
    explicit TrackedFraction(const Rat& c) : num_(c) {}
    TrackedFraction(Poly num, std::shared_ptr<const AtomContext> ctx);

    const Poly& numerator() const { return num_; }
    const std::map<int, int>& atom_denominator() const { return atom_den_; }
    const std::vector<Poly>& residual_denominators() const { return residuals_; }
    const std::shared_ptr<const AtomContext>& context() const { return ctx_; }

    bool is_zero() const { return num_.is_zero(); }
    bool clean() const { return residuals_.empty(); }
    Poly denominator_poly() const;
    Rat eval(const std::vector<Rat>& values) const;
    std::string str() const;

    TrackedFraction operator-() const;
    TrackedFraction& operator+=(const TrackedFraction& o);
    TrackedFraction& operator-=(const TrackedFraction& o);
    TrackedFraction& operator*=(const TrackedFraction& o);
    TrackedFraction& operator/=(const TrackedFraction& o);

    friend TrackedFraction operator+(TrackedFraction a, const TrackedFraction& b) { return a += b; }
    friend TrackedFraction operator-(TrackedFraction a, const TrackedFraction& b) { return a -= b; }
    friend TrackedFraction operator*(TrackedFraction a, const TrackedFraction& b) { return a *= b; }
    friend TrackedFraction operator/(TrackedFraction a, const TrackedFraction& b) { return a /= b; }
    friend bool operator==(const TrackedFraction& a, const TrackedFraction& b);

  private:
    Poly num_;
    std::map<int, int> atom_den_;
    std::vector<Poly> residuals_;
    std::shared_ptr<const AtomContext> ctx_;
    // Known factorization of num_ carried through products; empty means
    // unknown. Division then records the divisor's small factors as separate
    // residuals instead of one expanded product, which the greedy clearing
    // can eliminate far more cheaply. The residual product is unchanged.
    std::vector<Poly> factors_;

    void harmonize(TrackedFraction& other);
    void clear_residuals();
    void check_cap() const;
};

inline bool scalar_is_zero(const TrackedFraction& v) { return v.is_zero(); }
inline bool near_equal(const TrackedFraction& a, const TrackedFraction& b,
                       const TolerancePolicy& = {}) {
    return a == b;
}

struct SymbolicOptions {
    bool greedy_clear = true;
    std::size_t monomial_cap = 500000;
    // Window columns; defaults to [-1, n-1]: one leftward column plus a full
    // period to the right, covering every entry orbit and both rules.
    std::optional<long> lo, hi;
};

// A frieze whose entries are tracked rational functions of the path data.
// The path starts at node (0, 1); variables are named x(i,j) for integer
// values and p(i,j,k) for the path midpoints S(i,j,k). Ring order: path node
// variables in path order, then crossed line variables in crossing order,
// then midpoint variables in path order — eval_at takes values in that order.
struct SymbolicFrieze {
    int n = 0;
    Rat K;
    long lo = 0, hi = 0;
    std::shared_ptr<const PolyRing> ring;
    std::shared_ptr<const AtomContext> atoms;
    std::map<FriezeIndex, TrackedFraction> values;
    std::map<long, TrackedFraction> ne_lines, se_lines;

    const TrackedFraction& at(const FriezeIndex& idx) const;

    // Specialize every variable: path node and line variables first (in ring
    // order), then midpoint values. Used to compare with a numeric frieze.
    Rat eval_at(const FriezeIndex& idx, const std::vector<Rat>& values) const;
};

// Propagate a fully symbolic traversing path of the given shape (nw_steps as
// in extract_path, n-2 entries) across the window. K stays a fixed rational;
// the atoms are x_e and 1-(K/4)x_e for the interior integer path nodes.
SymbolicFrieze symbolic_propagate(int n, const Rat& K, const std::vector<bool>& nw_steps,
                                  const SymbolicOptions& options = {});

struct LaurentEntry {
    FriezeIndex idx;
    bool clean = false;
    std::map<std::string, int> atom_exponents;
    std::vector<std::string> residuals;
};

struct LaurentReport {
    int n = 0;
    Rat curvature;
    bool all_clean = false;
    int worst_residual_degree = 0;
    double seconds = 0.0;
    std::vector<LaurentEntry> entries;

    std::string to_json() const;
};

// Run the symbolic propagation and report, entry by entry, whether each
// frieze value is a Laurent monomial-denominator fraction in the atoms.
LaurentReport laurent_verify(int n, const Rat& K, const std::vector<bool>& nw_steps,
                             const SymbolicOptions& options = {});

}  // namespace sphf
