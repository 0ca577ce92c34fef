#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <gmpxx.h>

namespace qica {

/// r x n array over {0..k-1}, stored row-major. Each row is a parameter,
/// each column a test.
class CoveringArray {
public:
    CoveringArray() = default;
    CoveringArray(int r, int n, int k);
    /// Throws ParameterError on ragged rows or out-of-range symbols.
    static CoveringArray from_rows(int k, const std::vector<std::vector<int>>& rows);

    int r() const noexcept { return r_; }
    int n() const noexcept { return n_; }
    int k() const noexcept { return k_; }

    int at(int row, int col) const { return data_[static_cast<std::size_t>(row) * n_ + col]; }
    void set(int row, int col, int v) { data_[static_cast<std::size_t>(row) * n_ + col] = static_cast<std::uint8_t>(v); }
    std::span<const std::uint8_t> row(int i) const {
        return {data_.data() + static_cast<std::size_t>(i) * n_, static_cast<std::size_t>(n_)};
    }
    std::vector<std::vector<int>> rows() const;

    friend bool operator==(const CoveringArray&, const CoveringArray&) = default;

private:
    int r_ = 0, n_ = 0, k_ = 0;
    std::vector<std::uint8_t> data_;
};

struct CoverageMiss {
    int row_a, row_b;
    int sym_a, sym_b;
};

struct VerificationReport {
    bool valid = true;
    std::vector<CoverageMiss> misses;
};

/// Exhaustive pairwise coverage check over every row pair.
VerificationReport verify(const CoveringArray& ca);

/// CA(k^2, k+1, k) over GF(k): row 0 is f_{c/k}; row i+1 is f_i * f_{c/k} + f_{c mod k}.
CoveringArray construct_finite_field_ca(int k);

/// Drops row 0 of a finite-field array, leaving CA(k^2, k, k) whose first k columns are disjoint.
CoveringArray strip_to_disjoint(const CoveringArray& ca);

struct DisjointColumns {
    std::vector<int> columns;
    bool exact = false;
};

/// Maximum set of pairwise disjoint columns: exact clique search when n <= 64
/// and the node budget suffices, greedy otherwise.
DisjointColumns disjoint_columns(const CoveringArray& ca, long budget = 1'000'000);

/// Rows t = a_{t / b.r} | b_{t mod b.r}. With reduce, each b-row is relabelled so
/// that k disjoint columns of b become constant and those columns are dropped.
CoveringArray block_recursive(const CoveringArray& a, const CoveringArray& b, bool reduce);

/// i rounds of reduced block recursion starting from the finite-field array:
/// a balanced CA(k^2 + i(k^2 - k), k^i (k+1), k).
CoveringArray iterate_block_recursive(int k, int i);

bool is_balanced(const CoveringArray& ca);

// ---------------------------------------------------------------------------
// Group construction

/// v[0] = 0 and v[1..r-1] in {1..k-1}.
struct StarterVector {
    int k = 0;
    std::vector<int> v;

    int r() const noexcept { return static_cast<int>(v.size()); }
    friend bool operator==(const StarterVector&, const StarterVector&) = default;
};

struct StarterReport {
    bool valid = true;
    /// (shift i, difference d in Z_{k-1}) pairs left uncovered.
    std::vector<std::pair<int, int>> missing;
};

/// Throws ParameterError when the shape invariants fail.
void validate_starter_shape(const StarterVector& s);
StarterReport verify_starter(const StarterVector& s);
/// Number of uncovered (shift, difference) requirements; shape is assumed valid.
int starter_defect(int k, std::span<const int> v);

/// Columns: the zero column, then the circulant under g^0, g^1, ..., g^{k-2}
/// where g = (1 2 ... k-1). Throws ParameterError for an invalid starter.
CoveringArray expand_starter(const StarterVector& s);

enum class StarterSearchMode { Exhaustive, HillClimb };
enum class SearchOutcome { Found, None, Unknown };

struct StarterSearchResult {
    SearchOutcome outcome = SearchOutcome::Unknown;
    std::optional<StarterVector> starter;
    long steps = 0;
};

/// Exhaustive mode returns the lexicographically least valid starter or None;
/// hill climbing never returns None. Budget exhaustion gives Unknown.
StarterSearchResult search_starter(int k, int r, StarterSearchMode mode, std::uint64_t seed = 1,
                                   long budget = 2'000'000'000L);

// ---------------------------------------------------------------------------
// Bounds

/// min { n : C(n-1, floor(n/2) - 1) >= r }.
int binary_can(long r);

enum class BoundFamily {
    TcPointBalanced,   // pbtc/k + k(k-1) <= tc <= pbtc
    TcLog,             // tc >= ceil(k log2 r / 2)
    TcSquarePlusTwo,   // tc >= k^2 + 2 for r >= k+2, k >= 3
    PbtcRows,          // r <= floor(C(b, b/k-(k-2)) / (k C(b/k, k-2)))
    VertexTransitive,  // omega(AUQI(n,k)) <= n!(k-2)!/((k-r)(n-c+k-2)!c!)
    ChromaticSquare,   // chi(QI(k^2,k)) <= C(k+1, 2)
    FractionalSquare,  // chi*(QI(k^2,k)) <= k+1
};

struct BoundQuery {
    BoundFamily family = BoundFamily::VertexTransitive;
    long r = 0;
    long k = 0;
    long n = 0;
    long b = 0;     // blocks, for PbtcRows
    long pbtc = 0;  // for TcPointBalanced
};

struct NamedBound {
    std::string name;
    mpq_class value;
    /// floor for upper bounds, ceiling for lower bounds
    mpz_class integral;
};

/// Exact evaluation; throws ParameterError outside each formula's domain.
std::vector<NamedBound> size_bounds(const BoundQuery& q);

// ---------------------------------------------------------------------------
// Latin squares

struct LatinSquareSet {
    int k = 0;
    std::vector<std::vector<std::vector<int>>> squares;
};

/// r-2 MOLS from an orthogonal array CA(k^2, r, k) of index 1, indexed by the
/// first two rows. Throws StructureError naming a doubly covered pair otherwise.
LatinSquareSet ca_to_mols(const CoveringArray& ca);
/// Empty when every square is Latin and every pair is orthogonal.
std::string check_mols(const LatinSquareSet& s);

// ---------------------------------------------------------------------------
// Text formats

void write_ca(std::ostream& os, const CoveringArray& ca);
CoveringArray read_ca(std::istream& is);
void write_starter(std::ostream& os, const StarterVector& s);
StarterVector read_starter(std::istream& is);

}  // namespace qica
