#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "qica/graph.hpp"
#include "qica/partition.hpp"

namespace qica {

using Matrix = std::vector<std::vector<long long>>;

// ---------------------------------------------------------------------------
// Meet tables

/// cells[i*k + j] = |P_i ∩ Q_j|.
struct MeetTable {
    int k = 0;
    std::vector<int> cells;

    int at(int i, int j) const { return cells[static_cast<std::size_t>(i) * k + j]; }
    MeetTable transpose() const;
    /// Number of nonzero cells (the meet of the two partitions).
    int meet() const;
    bool all_positive() const;
    std::string to_string() const;
    /// Short stable identifier (64-bit FNV-1a of the cells, hex).
    std::string hash() const;

    friend bool operator==(const MeetTable&, const MeetTable&) = default;
    friend auto operator<=>(const MeetTable&, const MeetTable&) = default;
};

MeetTable meet_table(const Partition& p, const Partition& q);
/// Lexicographically least row-major matrix over all row and column permutations.
MeetTable canonical_form(const MeetTable& m);

struct MeetClass {
    MeetTable table;
    Partition representative;
    long size = 0;
};

/// Orbits of the stabiliser of the base partition, identified by meet tables
/// with the base. Classes appear in order of their first (lexicographically
/// least) member, so the base partition's singleton class comes first.
struct MeetClassPartition {
    int n = 0;
    int k = 0;
    PartitionFilter filter;
    Partition base;
    std::vector<MeetClass> classes;

    long vertex_count() const;
    std::vector<long> class_sizes() const;
    /// Class index of q, or -1 when q's table matches no class.
    int class_of(const Partition& q) const;
};

/// Uniform family with base [1..c | c+1..2c | ...].
MeetClassPartition equitable_partition(int n, int k, long vertex_cap = 50'000'000);
/// Any partition family; the base is its first member in enumeration order.
MeetClassPartition equitable_partition(int n, int k, const PartitionFilter& filter, long vertex_cap = 50'000'000);

struct QuotientRelation {
    enum class Kind { QualitativeIndependence, MeetClass } kind = Kind::QualitativeIndependence;
    int meet_class = 0;

    static QuotientRelation qi() { return {}; }
    static QuotientRelation meet(int cls) { return {Kind::MeetClass, cls}; }
};

/// b[c][d] = number of class-d vertices related to the representative of class c.
Matrix quotient_matrix(const MeetClassPartition& mcp, const QuotientRelation& rel, int jobs = 1);
/// One streaming pass for every meet-class relation; result[e] is the quotient for
/// relation e (e = 0 is the identity). Uniform families only.
std::vector<Matrix> meet_quotients(const MeetClassPartition& mcp, int jobs = 1);

// ---------------------------------------------------------------------------
// Polynomials

/// Integer coefficients, ascending degree.
struct Polynomial {
    std::vector<mpz_class> c;

    int degree() const { return static_cast<int>(c.size()) - 1; }
    std::string to_string() const;
    friend bool operator==(const Polynomial&, const Polynomial&) = default;
};

/// det(xI - M), exact, by Hessenberg reduction modulo word-size primes and CRT.
Polynomial char_poly(const Matrix& m);
Polynomial adjacency_char_poly(const Graph& g);
/// Exact divisibility over Q.
bool poly_divides(const Polynomial& d, const Polynomial& p);

// ---------------------------------------------------------------------------
// Spectra

/// a + b*sqrt(radicand) when Surd; a when Integer; approx +- error when Numeric.
struct Eigenvalue {
    enum class Kind { Integer, Surd, Numeric } kind = Kind::Integer;
    mpq_class a;
    mpq_class b;
    mpz_class radicand;
    double approx = 0;
    double error = 0;

    static Eigenvalue integer(const mpz_class& v);
    std::string to_string() const;
    /// Parses the to_string form; numeric values need the exactness flag.
    static Eigenvalue parse(const std::string& text, bool numeric);
    bool exact() const { return kind != Kind::Numeric; }
    friend bool operator==(const Eigenvalue& x, const Eigenvalue& y);
};

struct SpectrumEntry {
    Eigenvalue value;
    long multiplicity = 0;
};

struct Spectrum {
    std::vector<SpectrumEntry> entries;  // descending by value
    long vertices = 0;
    long degree = 0;

    bool exact() const;
    std::optional<long> multiplicity_of(long integer_eigenvalue) const;
};

/// Empty when sum m = |V|, sum m*lambda = 0 and sum m*lambda^2 = |V|*d all hold.
std::string check_spectrum(const Spectrum& s);

/// Spectrum of a walk-regular graph from a quotient whose class 0 is a single
/// vertex; multiplicities from |V| * phi(B \ C0, x) / phi(B, x).
Spectrum spectrum_from_quotient(const Matrix& b, const std::vector<long>& class_sizes);
Spectrum spectrum(int n, int k, const QuotientRelation& rel = QuotientRelation::qi(), int jobs = 1);

/// Quotient of Kneser(n, r) by intersection size with {0..r-1}, singleton class first.
Matrix kneser_quotient(int n, int r, std::vector<long>* class_sizes = nullptr);
Spectrum kneser_spectrum(int n, int r);

struct EigenMatrix {
    /// Canonical tables of the non-identity classes, one per column.
    std::vector<MeetTable> columns;
    /// Column headers; the canonical table hash when columns are known.
    std::vector<std::string> column_names;
    std::vector<long> multiplicities;
    /// values[row][col]
    std::vector<std::vector<Eigenvalue>> values;
    bool commuting = true;
    bool exact = true;
    std::string note;
};

EigenMatrix eigenmatrix_from_quotients(const std::vector<Matrix>& b, const std::vector<long>& class_sizes);
EigenMatrix modified_eigenmatrix(int n, int k, int jobs = 1);

// ---------------------------------------------------------------------------
// Association schemes

enum class SchemeMode { Full, Sampled };

struct SchemeOptions {
    SchemeMode mode = SchemeMode::Full;
    int samples = 20;
    std::uint64_t seed = 1;
    int jobs = 1;
    /// Largest vertex family handled in full mode.
    long full_cap = 20000;
};

struct SchemeVerdict {
    bool symmetric = true;
    bool scheme = false;
    /// Every pair (full) or every sampled pair was checked.
    bool complete = false;
    int classes = 0;
    long pairs_checked = 0;
    /// p[(k*m + i)*m + j] = p^k_{ij}
    std::vector<long> p_numbers;
    std::optional<std::pair<Partition, Partition>> counterexample;
    std::string reason;

    long p(int k, int i, int j) const { return p_numbers[(static_cast<std::size_t>(k) * classes + i) * classes + j]; }
};

/// labels[x*v + y] = relation index of (x, y), 0 exactly on the diagonal.
SchemeVerdict check_scheme_relations(int v, const std::vector<std::uint8_t>& labels, int classes, int jobs = 1);
SchemeVerdict check_association_scheme(int n, int k, const SchemeOptions& opt = {});

struct RatioBounds {
    mpq_class alpha;
    mpq_class omega;
};

/// alpha <= v / (1 - d/tau), omega <= 1 - d/tau. Throws ParameterError unless tau < 0 < d.
RatioBounds ratio_bounds(const mpz_class& v, const mpz_class& d, const mpq_class& tau);

// ---------------------------------------------------------------------------
// Text formats

void write_spectrum_tsv(std::ostream& os, const Spectrum& s);
Spectrum read_spectrum_tsv(std::istream& is);
std::string spectrum_json(const Spectrum& s);
void write_eigenmatrix_tsv(std::ostream& os, const EigenMatrix& e);
EigenMatrix read_eigenmatrix_tsv(std::istream& is);
std::string eigenmatrix_json(const EigenMatrix& e);

}  // namespace qica
