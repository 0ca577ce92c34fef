#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <gmpxx.h>

namespace qica {

/// Largest ground set supported; classes are stored as 64-bit masks.
inline constexpr int kMaxGroundSet = 64;

/// A k-partition of {0..n-1} in canonical form: classes ordered by their
/// minimum element, elements ascending inside each class. Text I/O is
/// 1-indexed ("1 2 3 | 4 5 6").
class Partition {
public:
    Partition() = default;

    /// Any labelling works; labels are renumbered by first occurrence.
    static Partition from_labels(std::span<const int> labels);
    static Partition from_labels(std::span<const std::uint8_t> labels);
    /// Classes over 0-indexed elements; must be disjoint, nonempty and cover 0..n-1.
    static Partition from_classes(int n, const std::vector<std::vector<int>>& classes);
    /// Parses the 1-indexed text form.
    static Partition parse(std::string_view text);

    int n() const noexcept { return static_cast<int>(labels_.size()); }
    int k() const noexcept { return static_cast<int>(masks_.size()); }

    /// Element -> class index (canonical numbering).
    const std::vector<std::uint8_t>& labels() const noexcept { return labels_; }
    std::span<const std::uint64_t> masks() const noexcept { return masks_; }
    std::uint64_t mask(int cls) const { return masks_.at(cls); }
    std::vector<int> members(int cls) const;
    std::vector<std::vector<int>> classes() const;
    int class_size(int cls) const;
    int class_of(int element) const { return labels_.at(element); }

    std::string to_string() const;

    friend bool operator==(const Partition&, const Partition&) = default;
    /// Lexicographic order of the canonical class lists.
    friend std::strong_ordering operator<=>(const Partition& a, const Partition& b);

private:
    std::vector<std::uint8_t> labels_;
    std::vector<std::uint64_t> masks_;
};

struct PartitionFilter {
    enum class Kind { All, Uniform, AlmostUniform, MinClassSize };

    Kind kind = Kind::All;
    int min_size = 1;

    static PartitionFilter all() { return {}; }
    static PartitionFilter uniform() { return {Kind::Uniform, 1}; }
    static PartitionFilter almost_uniform() { return {Kind::AlmostUniform, 1}; }
    static PartitionFilter min_class_size(int s) { return {Kind::MinClassSize, s}; }

    /// Inclusive class-size range for the given (n, k).
    std::pair<int, int> size_range(int n, int k) const;
    bool accepts(const Partition& p) const;
    std::string name() const;
};

/// Throws ParameterError unless 1 <= k <= n <= 64 and the filter is satisfiable.
void validate_partition_params(int n, int k, const PartitionFilter& filter);

/// Receives the canonical labels of each partition; return false to stop.
using LabelVisitor = std::function<bool(std::span<const std::uint8_t>)>;

/// Streams qualifying partitions in lexicographic order of canonical form.
/// With shard_count > 1 only partitions whose first-class choice index is
/// congruent to shard mod shard_count are visited (order preserved within a
/// shard). Returns false if the visitor stopped early.
bool for_each_partition(int n, int k, const PartitionFilter& filter, const LabelVisitor& visit,
                        int shard = 0, int shard_count = 1);

std::vector<Partition> enumerate_partitions(int n, int k, const PartitionFilter& filter);

/// Exact count. Stirling numbers, U(n,k), AU(n,k) by closed form; the
/// min-class-size family by the associated-Stirling recurrence.
mpz_class count_partitions(int n, int k, const PartitionFilter& filter);
mpz_class count_by_enumeration(int n, int k, const PartitionFilter& filter);

mpz_class binomial(long n, long k);
mpz_class factorial(long n);
mpz_class stirling2(int n, int k);
/// Uniform k-partitions of an n-set (0 when k does not divide n).
mpz_class uniform_count(int n, int k);
mpz_class almost_uniform_count(int n, int k);

/// Same ground set and same number of classes; throws ParameterError otherwise.
void require_comparable(const Partition& p, const Partition& q);
bool is_qualitatively_independent(const Partition& p, const Partition& q);
/// Number of class pairs (i, j) with P_i and Q_j intersecting.
int meet_value(const Partition& p, const Partition& q);

/// Subsets of {0..n-1} as bitmasks.
struct ChainDecomposition {
    int n = 0;
    std::vector<std::vector<std::uint64_t>> chains;
};

/// Symmetric chain decomposition by bracket matching; deterministic.
ChainDecomposition symmetric_chain_decomposition(int n);
/// Empty string when every invariant holds, otherwise a description of the first violation.
std::string check_chain_decomposition(const ChainDecomposition& d);

struct OneFactorization {
    int n = 0;
    int c = 0;
    std::vector<Partition> factors;
};

/// A 1-factorization of the complete c-uniform hypergraph on n points:
/// round-robin for c = 2, integral flow rounding otherwise.
OneFactorization baranyai_factorization(int n, int c, long flow_budget = 50'000'000);
std::string check_one_factorization(const OneFactorization& f);

/// No class of one partition contains a class of the other (both directions).
bool has_sperner_property(const Partition& p, const Partition& q);

}  // namespace qica
