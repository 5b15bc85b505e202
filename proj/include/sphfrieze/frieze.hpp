#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sphfrieze/diamond.hpp"
#include "sphfrieze/geometry.hpp"
#include "sphfrieze/rational.hpp"

namespace sphf {

// Doubled coordinates: the element at (i, j) is stored as (2i, 2j), so the
// midpoint families (i+1/2, j) and (i, j+1/2) get integer keys with exactly
// one odd component. Line labels are kept in separate per-integer maps.
struct FriezeIndex {
    long I = 0;
    long J = 0;

    auto operator<=>(const FriezeIndex&) const = default;

    bool is_node() const { return I % 2 == 0 && J % 2 == 0; }
    bool is_midpoint() const { return !is_node(); }
    // Base column: floor(I/2) also for negative I.
    long column() const { return I >= 0 ? I / 2 : -((-I + 1) / 2); }
    std::string str() const;
};

inline FriezeIndex node_index(long i, long j) { return {2 * i, 2 * j}; }

// z(i + 1/2, j), the midpoint between (i, j) and (i+1, j).
inline FriezeIndex ne_mid_index(long i, long j) { return {2 * i + 1, 2 * j}; }

// z(i, j + 1/2), the midpoint between (i, j) and (i, j+1).
inline FriezeIndex se_mid_index(long i, long j) { return {2 * i, 2 * j + 1}; }

// The glide reflection z(i,j) -> z(j, i+n); applying it twice translates by
// (n, n).
inline FriezeIndex glide_image(const FriezeIndex& idx, int n) {
    return {idx.J, idx.I + 2 * n};
}

enum class FriezeKind { Heronian, CayleyMenger };

struct FriezeValidationReport {
    struct Item {
        std::string name;
        std::vector<std::string> failures;
        bool pass() const { return failures.empty(); }
    };
    std::vector<Item> items;

    bool ok() const {
        for (const auto& item : items)
            if (!item.pass()) return false;
        return true;
    }
    const Item& item(const std::string& name) const;
};

// A finite window of a frieze of order n: all rows of the strip for base
// columns lo..hi (midpoint columns i+1/2 belong to column i), NE lines for
// lo-1..hi and SE lines for lo..hi+n-1.
struct Frieze {
    FriezeKind kind = FriezeKind::Heronian;
    int n = 0;
    Rat K;
    long lo = 0;
    long hi = 0;
    std::map<FriezeIndex, Rat> values;
    std::map<long, Rat> ne_lines;
    std::map<long, Rat> se_lines;

    bool contains(const FriezeIndex& idx) const { return values.count(idx) != 0; }
    // Stored value; OutsideWindow when the index is not materialized.
    const Rat& at(const FriezeIndex& idx) const;
    const Rat& ne_line(long i) const;
    const Rat& se_line(long j) const;

    // Value lookup extended by periodicity and glide symmetry. Only a
    // validated frieze may be read through its symmetries.
    Rat resolve(const FriezeIndex& idx) const;

    void mark_validated() { validated_ = true; }
    bool is_validated() const { return validated_; }

    friend bool operator==(const Frieze& a, const Frieze& b) {
        return a.kind == b.kind && a.n == b.n && a.K == b.K && a.lo == b.lo && a.hi == b.hi &&
               a.values == b.values && a.ne_lines == b.ne_lines && a.se_lines == b.se_lines;
    }

  private:
    bool validated_ = false;
};

struct PathElement {
    FriezeIndex idx;
    Rat value;
};

// Stepping-stone path from a height-1 node (k, k+1) to a height-(n-1) node
// (m, m+n-1), moving NE (j grows) or NW (i shrinks), with the crossed line
// values attached. The Heronian kind carries the in-between midpoints; the
// Cayley-Menger kind carries integer nodes only.
struct TraversingPath {
    std::vector<PathElement> elements;
    std::map<long, Rat> ne_lines;
    std::map<long, Rat> se_lines;
};

struct ThickenedPath {
    TraversingPath base;                 // integer nodes only
    std::vector<PathElement> shifted;    // the (1,1)-shifted interior nodes
};

// Construction from an n-gon on a sphere (n >= 4): node (i,j) receives the
// squared distance of vertices <i>, <j> (residues in 1..n), midpoints the
// triangle values of consecutive-vertex triples, lines the side values.
Frieze frieze_from_polygon(const std::vector<SpherePoint<Rat>>& points, FriezeKind kind, long lo,
                           long hi);

// Unique Heronian frieze agreeing with a traversing path. The optional seed
// shuffles the per-pass scan order of the completion rules; every assignment
// is conflict-checked, so any scan order yields the same frieze.
Frieze frieze_from_path(const TraversingPath& path, int n, const Rat& K, long lo, long hi,
                        std::optional<std::uint64_t> scan_shuffle_seed = std::nullopt);

// Unique coherent Cayley-Menger frieze agreeing with a thickened path.
Frieze cm_frieze_from_thickened_path(const ThickenedPath& tp, int n, const Rat& K, long lo,
                                     long hi,
                                     std::optional<std::uint64_t> scan_shuffle_seed = std::nullopt);

// Forget all midpoints of a Heronian frieze.
Frieze frieze_restrict(const Frieze& z);

// Reconstruct midpoints of a coherent Cayley-Menger frieze. The sign fixes
// the first midpoint (in index order) with a nonzero square; the two choices
// differ by negating every midpoint.
Frieze frieze_lift(const Frieze& z, int sign);

// Itemized validation: boundary zeros, index parity, near-boundary line
// consistency, the diamond equations, periodicity, glide symmetry, and (CM
// kind) coherence of all interlocking blocks.
FriezeValidationReport frieze_validate(const Frieze& z, const TolerancePolicy& policy = {});

// Runs frieze_validate and marks the frieze readable through symmetries;
// throws ValidationFailure listing the failures otherwise.
void frieze_validate_or_throw(Frieze& z, const TolerancePolicy& policy = {});

// The zigzag triangulation whose measurements are exactly the path data:
// one diagonal per interior integer path node of height 2..n-2.
Triangulation path_to_triangulation(const TraversingPath& path, int n);

// Copy a path out of a frieze: start at node (start_column, start_column+1),
// then n-2 steps (true = NW, false = NE). Heronian friezes yield midpoint-
// bearing paths, Cayley-Menger friezes integer-node paths.
TraversingPath extract_path(const Frieze& f, long start_column, const std::vector<bool>& nw_steps);

ThickenedPath extract_thickened_path(const Frieze& f, long start_column,
                                     const std::vector<bool>& nw_steps);

}  // namespace sphf
