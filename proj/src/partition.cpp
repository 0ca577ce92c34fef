#include "qica/partition.hpp"

#include <algorithm>
#include <bit>
#include <map>
#include <sstream>

#include "qica/errors.hpp"
#include "qica/maxflow.hpp"

namespace qica {

namespace {

std::vector<int> bits_of(std::uint64_t m) {
    std::vector<int> out;
    while (m) {
        out.push_back(std::countr_zero(m));
        m &= m - 1;
    }
    return out;
}

// Lexicographic comparison of two ascending element lists given as masks.
std::strong_ordering compare_masks(std::uint64_t a, std::uint64_t b) {
    while (a && b) {
        int x = std::countr_zero(a);
        int y = std::countr_zero(b);
        if (x != y) return x <=> y;
        a &= a - 1;
        b &= b - 1;
    }
    if (a == b) return std::strong_ordering::equal;
    return a ? std::strong_ordering::greater : std::strong_ordering::less;
}

template <typename Int>
Partition partition_from_any_labels(std::span<const Int> raw) {
    const int n = static_cast<int>(raw.size());
    if (n < 1 || n > kMaxGroundSet) throw ParameterError("partition ground set must have 1..64 elements");
    std::map<long, int> renumber;
    std::vector<int> labels(n);
    for (int e = 0; e < n; ++e) {
        auto [it, inserted] = renumber.try_emplace(static_cast<long>(raw[e]), static_cast<int>(renumber.size()));
        labels[e] = it->second;
    }
    std::vector<std::vector<int>> classes(renumber.size());
    for (int e = 0; e < n; ++e) classes[labels[e]].push_back(e);
    return Partition::from_classes(n, classes);
}

}  // namespace

Partition Partition::from_labels(std::span<const int> labels) { return partition_from_any_labels(labels); }

Partition Partition::from_labels(std::span<const std::uint8_t> labels) { return partition_from_any_labels(labels); }

Partition Partition::from_classes(int n, const std::vector<std::vector<int>>& classes) {
    if (n < 1 || n > kMaxGroundSet) throw ParameterError("partition ground set must have 1..64 elements");
    if (classes.empty() || classes.size() > 255) throw ParameterError("partition needs 1..255 classes");
    std::vector<std::uint64_t> masks;
    std::uint64_t seen = 0;
    for (const auto& cls : classes) {
        if (cls.empty()) throw ParameterError("partition classes must be nonempty");
        std::uint64_t m = 0;
        for (int e : cls) {
            if (e < 0 || e >= n) throw ParameterError("partition element out of range");
            const std::uint64_t bit = std::uint64_t{1} << e;
            if ((seen | m) & bit) throw ParameterError("partition classes must be disjoint");
            m |= bit;
        }
        seen |= m;
        masks.push_back(m);
    }
    const std::uint64_t full = n == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << n) - 1;
    if (seen != full) throw ParameterError("partition classes must cover the ground set");
    std::sort(masks.begin(), masks.end(),
              [](std::uint64_t a, std::uint64_t b) { return std::countr_zero(a) < std::countr_zero(b); });
    Partition p;
    p.masks_ = std::move(masks);
    p.labels_.assign(n, 0);
    for (int c = 0; c < p.k(); ++c)
        for (int e : bits_of(p.masks_[c])) p.labels_[e] = static_cast<std::uint8_t>(c);
    return p;
}

Partition Partition::parse(std::string_view text) {
    std::vector<std::vector<int>> classes(1);
    int max_elem = 0;
    std::string token;
    auto flush = [&] {
        if (token.empty()) return;
        std::size_t pos = 0;
        int v = 0;
        try {
            v = std::stoi(token, &pos);
        } catch (const std::exception&) {
            pos = 0;
        }
        if (pos != token.size() || v < 1) throw ParameterError("bad partition element '" + token + "'");
        classes.back().push_back(v - 1);
        max_elem = std::max(max_elem, v);
        token.clear();
    };
    for (char ch : text) {
        if (ch == '|') {
            flush();
            classes.emplace_back();
        } else if (ch == ' ' || ch == '\t') {
            flush();
        } else {
            token.push_back(ch);
        }
    }
    flush();
    return from_classes(max_elem, classes);
}

std::vector<int> Partition::members(int cls) const { return bits_of(masks_.at(cls)); }

std::vector<std::vector<int>> Partition::classes() const {
    std::vector<std::vector<int>> out;
    out.reserve(masks_.size());
    for (auto m : masks_) out.push_back(bits_of(m));
    return out;
}

int Partition::class_size(int cls) const { return std::popcount(masks_.at(cls)); }

std::string Partition::to_string() const {
    std::ostringstream os;
    for (int c = 0; c < k(); ++c) {
        if (c) os << " | ";
        bool first = true;
        for (int e : members(c)) {
            if (!first) os << ' ';
            os << e + 1;
            first = false;
        }
    }
    return os.str();
}

std::strong_ordering operator<=>(const Partition& a, const Partition& b) {
    const std::size_t common = std::min(a.masks_.size(), b.masks_.size());
    for (std::size_t i = 0; i < common; ++i) {
        auto c = compare_masks(a.masks_[i], b.masks_[i]);
        if (c != 0) return c;
    }
    if (a.masks_.size() != b.masks_.size()) return a.masks_.size() <=> b.masks_.size();
    return a.n() <=> b.n();
}

// ---------------------------------------------------------------------------
// Filters and enumeration

std::pair<int, int> PartitionFilter::size_range(int n, int k) const {
    switch (kind) {
        case Kind::All: return {1, n};
        case Kind::Uniform: return {n / k, n / k};
        case Kind::AlmostUniform: return {n / k, (n + k - 1) / k};
        case Kind::MinClassSize: return {min_size, n};
    }
    return {1, n};
}

bool PartitionFilter::accepts(const Partition& p) const {
    auto [lo, hi] = size_range(p.n(), p.k());
    if (kind == Kind::Uniform && p.n() % p.k() != 0) return false;
    for (int c = 0; c < p.k(); ++c) {
        int s = p.class_size(c);
        if (s < lo || s > hi) return false;
    }
    return true;
}

std::string PartitionFilter::name() const {
    switch (kind) {
        case Kind::All: return "all";
        case Kind::Uniform: return "uniform";
        case Kind::AlmostUniform: return "almost-uniform";
        case Kind::MinClassSize: return "min-class-size(" + std::to_string(min_size) + ")";
    }
    return "?";
}

void validate_partition_params(int n, int k, const PartitionFilter& filter) {
    if (n < 1 || n > kMaxGroundSet) throw ParameterError("n must be in 1..64");
    if (k < 1 || k > n) throw ParameterError("k must satisfy 1 <= k <= n");
    if (filter.kind == PartitionFilter::Kind::Uniform && n % k != 0)
        throw ParameterError("uniform partitions need k | n");
    if (filter.kind == PartitionFilter::Kind::MinClassSize && filter.min_size < 1)
        throw ParameterError("minimum class size must be positive");
}

namespace {

class Enumerator {
public:
    Enumerator(int n, int k, int lo, int hi, const LabelVisitor& visit, int shard, int shard_count)
        : n_(n), k_(k), lo_(lo), hi_(hi), visit_(visit), shard_(shard), shard_count_(shard_count), labels_(n, 0) {}

    bool run() {
        const std::uint64_t full = n_ == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << n_) - 1;
        return place(0, full);
    }

private:
    bool place(int cls, std::uint64_t remaining) {
        if (cls == k_) return remaining == 0 ? visit_(labels_) : true;
        if (!remaining) return true;
        const int first = std::countr_zero(remaining);
        return extend(cls, remaining, std::uint64_t{1} << first, 1, first);
    }

    bool extend(int cls, std::uint64_t remaining, std::uint64_t cur, int size, int last) {
        const int rem_count = std::popcount(remaining);
        const int rest_classes = k_ - cls - 1;
        const int rest = rem_count - size;
        if (size >= lo_ && size <= hi_ && rest_classes * lo_ <= rest && rest <= rest_classes * hi_) {
            bool emit = true;
            if (cls == 0) emit = (first_index_++ % shard_count_) == shard_;
            if (emit) {
                for (std::uint64_t m = cur; m; m &= m - 1) labels_[std::countr_zero(m)] = static_cast<std::uint8_t>(cls);
                if (!place(cls + 1, remaining & ~cur)) return false;
            }
        }
        if (size >= hi_) return true;
        // Elements after `last` that may still join this class.
        std::uint64_t later = last >= 63 ? 0 : remaining & ~((std::uint64_t{2} << last) - 1);
        const int needed_min = std::max(lo_, rem_count - rest_classes * hi_);
        for (std::uint64_t m = later; m; m &= m - 1) {
            if (size + std::popcount(m) < needed_min) break;
            const int a = std::countr_zero(m);
            if (!extend(cls, remaining, cur | (std::uint64_t{1} << a), size + 1, a)) return false;
        }
        return true;
    }

    int n_, k_, lo_, hi_;
    const LabelVisitor& visit_;
    int shard_, shard_count_;
    long first_index_ = 0;
    std::vector<std::uint8_t> labels_;
};

}  // namespace

bool for_each_partition(int n, int k, const PartitionFilter& filter, const LabelVisitor& visit, int shard,
                        int shard_count) {
    validate_partition_params(n, k, filter);
    if (shard_count < 1 || shard < 0 || shard >= shard_count) throw ParameterError("bad shard specification");
    auto [lo, hi] = filter.size_range(n, k);
    if (lo > hi || static_cast<long>(lo) * k > n) return true;
    Enumerator e(n, k, lo, hi, visit, shard, shard_count);
    return e.run();
}

std::vector<Partition> enumerate_partitions(int n, int k, const PartitionFilter& filter) {
    std::vector<Partition> out;
    for_each_partition(n, k, filter, [&](std::span<const std::uint8_t> labels) {
        out.push_back(Partition::from_labels(labels));
        return true;
    });
    return out;
}

// ---------------------------------------------------------------------------
// Counting

mpz_class binomial(long n, long k) {
    if (k < 0 || n < 0 || k > n) return 0;
    mpz_class r;
    mpz_bin_uiui(r.get_mpz_t(), static_cast<unsigned long>(n), static_cast<unsigned long>(k));
    return r;
}

mpz_class factorial(long n) {
    if (n < 0) return 0;
    mpz_class r;
    mpz_fac_ui(r.get_mpz_t(), static_cast<unsigned long>(n));
    return r;
}

mpz_class stirling2(int n, int k) {
    if (n < 0 || k < 0) return 0;
    std::vector<mpz_class> row(k + 1, 0);
    row[0] = 1;
    for (int i = 1; i <= n; ++i) {
        for (int j = std::min(i, k); j >= 1; --j) row[j] = j * row[j] + row[j - 1];
        row[0] = 0;
    }
    return row[k];
}

mpz_class uniform_count(int n, int k) {
    if (k < 1 || n % k != 0) return 0;
    return almost_uniform_count(n, k);
}

mpz_class almost_uniform_count(int n, int k) {
    if (k < 1 || n < k) return 0;
    const int c = n / k;
    const int r = n % k;
    mpz_class num = factorial(n);
    mpz_class den = factorial(r) * factorial(k - r);
    mpz_class fc = factorial(c);
    mpz_class fc1 = factorial(c + 1);
    for (int i = 0; i < k - r; ++i) den *= fc;
    for (int i = 0; i < r; ++i) den *= fc1;
    return num / den;
}

namespace {

// Partitions of an n-set into k classes of size >= s:
// S_s(n,k) = k S_s(n-1,k) + C(n-1,s-1) S_s(n-s,k-1).
mpz_class min_size_count(int n, int k, int s) {
    std::vector<std::vector<mpz_class>> t(n + 1, std::vector<mpz_class>(k + 1, 0));
    t[0][0] = 1;
    for (int i = 1; i <= n; ++i)
        for (int j = 1; j <= k; ++j) {
            t[i][j] = j * t[i - 1][j];
            if (i >= s) t[i][j] += binomial(i - 1, s - 1) * t[i - s][j - 1];
        }
    return t[n][k];
}

}  // namespace

mpz_class count_partitions(int n, int k, const PartitionFilter& filter) {
    validate_partition_params(n, k, filter);
    switch (filter.kind) {
        case PartitionFilter::Kind::All: return stirling2(n, k);
        case PartitionFilter::Kind::Uniform: return uniform_count(n, k);
        case PartitionFilter::Kind::AlmostUniform: return almost_uniform_count(n, k);
        case PartitionFilter::Kind::MinClassSize:
            if (static_cast<long>(filter.min_size) * k > n) return 0;
            return min_size_count(n, k, filter.min_size);
    }
    return 0;
}

mpz_class count_by_enumeration(int n, int k, const PartitionFilter& filter) {
    unsigned long count = 0;
    for_each_partition(n, k, filter, [&](std::span<const std::uint8_t>) {
        ++count;
        return true;
    });
    return mpz_class(count);
}

// ---------------------------------------------------------------------------
// Pairwise relations

void require_comparable(const Partition& p, const Partition& q) {
    if (p.n() != q.n() || p.k() != q.k())
        throw ParameterError("partitions must share the ground set size and number of classes");
}

bool is_qualitatively_independent(const Partition& p, const Partition& q) {
    require_comparable(p, q);
    for (auto a : p.masks())
        for (auto b : q.masks())
            if (!(a & b)) return false;
    return true;
}

int meet_value(const Partition& p, const Partition& q) {
    require_comparable(p, q);
    int v = 0;
    for (auto a : p.masks())
        for (auto b : q.masks())
            if (a & b) ++v;
    return v;
}

bool has_sperner_property(const Partition& p, const Partition& q) {
    for (auto a : p.masks())
        for (auto b : q.masks())
            if ((a & ~b) == 0 || (b & ~a) == 0) return false;
    return true;
}

// ---------------------------------------------------------------------------
// Symmetric chains

ChainDecomposition symmetric_chain_decomposition(int n) {
    if (n < 1 || n > 24) throw ParameterError("chain decomposition supports 1 <= n <= 24");
    // Bracket matching: element absent = '(', present = ')'. Unmatched
    // positions read ")))(((" and the chain varies only that boundary.
    std::map<std::uint64_t, std::vector<std::uint64_t>> by_bottom;
    const std::uint64_t total = std::uint64_t{1} << n;
    std::vector<int> stack;
    for (std::uint64_t s = 0; s < total; ++s) {
        stack.clear();
        std::uint64_t matched = 0;
        for (int i = 0; i < n; ++i) {
            if (!((s >> i) & 1)) {
                stack.push_back(i);
            } else if (!stack.empty()) {
                matched |= (std::uint64_t{1} << stack.back()) | (std::uint64_t{1} << i);
                stack.pop_back();
            }
        }
        const std::uint64_t bottom = s & matched;
        by_bottom[bottom].push_back(s);
    }
    ChainDecomposition d;
    d.n = n;
    for (auto& [bottom, members] : by_bottom) {
        std::sort(members.begin(), members.end(),
                  [](std::uint64_t a, std::uint64_t b) { return std::popcount(a) < std::popcount(b); });
        d.chains.push_back(std::move(members));
    }
    return d;
}

std::string check_chain_decomposition(const ChainDecomposition& d) {
    const int n = d.n;
    if (n < 1 || n > 24) return "bad ground set size";
    std::vector<char> seen(std::size_t{1} << n, 0);
    const long expected = binomial(n, n / 2).get_si();
    if (static_cast<long>(d.chains.size()) != expected)
        return "expected " + std::to_string(expected) + " chains, got " + std::to_string(d.chains.size());
    for (std::size_t ci = 0; ci < d.chains.size(); ++ci) {
        const auto& ch = d.chains[ci];
        if (ch.empty()) return "empty chain";
        int middle = 0;
        for (std::size_t i = 0; i < ch.size(); ++i) {
            if (ch[i] >> n) return "subset outside ground set";
            if (seen[ch[i]]++) return "subset appears twice";
            if (std::popcount(ch[i]) == n / 2) ++middle;
            if (i > 0) {
                if ((ch[i - 1] & ~ch[i]) != 0 || std::popcount(ch[i]) != std::popcount(ch[i - 1]) + 1)
                    return "chain " + std::to_string(ci) + " is not saturated";
            }
        }
        if (middle != 1) return "chain " + std::to_string(ci) + " lacks a unique middle set";
        if (std::popcount(ch.front()) + std::popcount(ch.back()) != n)
            return "chain " + std::to_string(ci) + " is not symmetric";
    }
    for (char c : seen)
        if (!c) return "some subset is not covered";
    return {};
}

// ---------------------------------------------------------------------------
// 1-factorizations

namespace {

OneFactorization round_robin(int n) {
    OneFactorization f{n, 2, {}};
    const int m = n - 1;
    for (int round = 0; round < m; ++round) {
        std::vector<std::vector<int>> classes;
        classes.push_back({round, m});
        for (int i = 1; i <= (n - 2) / 2; ++i) classes.push_back({(round + i) % m, (round - i + m) % m});
        f.factors.push_back(Partition::from_classes(n, classes));
    }
    std::sort(f.factors.begin(), f.factors.end());
    return f;
}

}  // namespace

OneFactorization baranyai_factorization(int n, int c, long flow_budget) {
    if (n < 1 || c < 1 || c > n || n % c != 0) throw ParameterError("1-factorization needs c | n");
    if (n > 24) throw ParameterError("1-factorization supports n <= 24");
    if (c == 2 && n > 2) return round_robin(n);
    const int k = n / c;
    const long m = binomial(n - 1, c - 1).get_si();
    // parts[j] is the multiset of partial classes of factor j.
    std::vector<std::vector<std::uint64_t>> parts(m, std::vector<std::uint64_t>(k, 0));
    long work = 0;
    for (int t = 0; t < n; ++t) {
        std::map<std::uint64_t, int> subset_node;
        for (const auto& fp : parts)
            for (auto s : fp) subset_node.try_emplace(s, 0);
        int next = static_cast<int>(m) + 2;
        for (auto& [s, node] : subset_node) node = next++;
        const int source = 0, sink = 1;
        MaxFlow flow(next);
        std::vector<std::vector<std::pair<std::uint64_t, int>>> edges(m);
        for (long j = 0; j < m; ++j) {
            flow.add_edge(source, 2 + static_cast<int>(j), 1);
            std::map<std::uint64_t, int> copies;
            for (auto s : parts[j]) ++copies[s];
            for (auto [s, cnt] : copies) {
                if (std::popcount(s) >= c) continue;
                int e = flow.add_edge(2 + static_cast<int>(j), subset_node[s], cnt);
                edges[j].emplace_back(s, e);
            }
        }
        for (auto [s, node] : subset_node) {
            const long cap = binomial(n - t - 1, c - std::popcount(s) - 1).get_si();
            if (cap > 0) flow.add_edge(node, sink, cap);
        }
        const long value = flow.run(source, sink, flow_budget - work);
        work += flow.work();
        if (work > flow_budget) throw ResourceError("1-factorization flow budget exhausted");
        if (value != m) throw StructureError("flow rounding failed to saturate (internal invariant broken)");
        for (long j = 0; j < m; ++j) {
            for (auto [s, e] : edges[j]) {
                if (flow.flow_on(e) > 0) {
                    auto it = std::find(parts[j].begin(), parts[j].end(), s);
                    *it |= std::uint64_t{1} << t;
                    break;
                }
            }
        }
    }
    OneFactorization f{n, c, {}};
    for (const auto& fp : parts) {
        std::vector<std::vector<int>> classes;
        for (auto s : fp) classes.push_back(bits_of(s));
        f.factors.push_back(Partition::from_classes(n, classes));
    }
    std::sort(f.factors.begin(), f.factors.end());
    return f;
}

std::string check_one_factorization(const OneFactorization& f) {
    const long expected = binomial(f.n - 1, f.c - 1).get_si();
    if (static_cast<long>(f.factors.size()) != expected)
        return "expected " + std::to_string(expected) + " factors, got " + std::to_string(f.factors.size());
    std::map<std::uint64_t, int> uses;
    for (const auto& p : f.factors) {
        if (p.n() != f.n || p.k() != f.n / f.c) return "factor has wrong shape";
        for (auto m : p.masks()) {
            if (std::popcount(m) != f.c) return "factor class has wrong size";
            if (uses[m]++) return "a c-subset appears in two factors";
        }
    }
    if (static_cast<long>(uses.size()) != binomial(f.n, f.c).get_si()) return "not every c-subset is covered";
    return {};
}

}  // namespace qica
