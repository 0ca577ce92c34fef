#include <algorithm>
#include <bit>
#include <cstdio>
#include <map>
#include <numeric>
#include <random>
#include <thread>
#include <unordered_map>

#include "qica/errors.hpp"
#include "qica/spectra.hpp"

namespace qica {

// ---------------------------------------------------------------------------
// Meet tables

MeetTable MeetTable::transpose() const {
    MeetTable t{k, std::vector<int>(cells.size())};
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) t.cells[static_cast<std::size_t>(j) * k + i] = at(i, j);
    return t;
}

int MeetTable::meet() const {
    return static_cast<int>(std::count_if(cells.begin(), cells.end(), [](int c) { return c != 0; }));
}

bool MeetTable::all_positive() const {
    return std::all_of(cells.begin(), cells.end(), [](int c) { return c > 0; });
}

std::string MeetTable::to_string() const {
    std::string s = "[";
    for (int i = 0; i < k; ++i) {
        s += i ? ",[" : "[";
        for (int j = 0; j < k; ++j) s += (j ? "," : "") + std::to_string(at(i, j));
        s += "]";
    }
    return s + "]";
}

std::string MeetTable::hash() const {
    std::uint64_t h = 1469598103934665603ULL;
    auto mix = [&](std::uint64_t x) {
        h ^= x;
        h *= 1099511628211ULL;
    };
    mix(static_cast<std::uint64_t>(k));
    for (int c : cells) mix(static_cast<std::uint64_t>(c));
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

MeetTable meet_table(const Partition& p, const Partition& q) {
    require_comparable(p, q);
    const int k = p.k();
    MeetTable m{k, std::vector<int>(static_cast<std::size_t>(k) * k, 0)};
    for (int e = 0; e < p.n(); ++e) ++m.cells[static_cast<std::size_t>(p.class_of(e)) * k + q.class_of(e)];
    return m;
}

namespace {

/// Least form over row permutations (restricted to those preserving row sums
/// when asked) and all column permutations. For a fixed row order the best
/// column order sorts columns as top-to-bottom tuples.
MeetTable canonical_impl(const MeetTable& m, bool preserve_row_sums) {
    const int k = m.k;
    std::vector<int> rows(k), sums(k, 0);
    std::iota(rows.begin(), rows.end(), 0);
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) sums[i] += m.at(i, j);
    MeetTable best;
    bool have = false;
    std::vector<std::vector<int>> cols(k, std::vector<int>(k));
    MeetTable cand{k, std::vector<int>(m.cells.size())};
    do {
        if (preserve_row_sums) {
            bool ok = true;
            for (int i = 0; i < k && ok; ++i) ok = sums[rows[i]] == sums[i];
            if (!ok) continue;
        }
        for (int j = 0; j < k; ++j)
            for (int i = 0; i < k; ++i) cols[j][i] = m.at(rows[i], j);
        std::sort(cols.begin(), cols.end());
        for (int i = 0; i < k; ++i)
            for (int j = 0; j < k; ++j) cand.cells[static_cast<std::size_t>(i) * k + j] = cols[j][i];
        if (!have || cand.cells < best.cells) {
            best = cand;
            have = true;
        }
    } while (std::next_permutation(rows.begin(), rows.end()));
    return best;
}

/// Packs a k x k table of small cells into one word; cells must fit `bits`.
struct TableKeyer {
    int k = 0, bits = 0;

    TableKeyer(int n, int k_, int max_cell) : k(k_), bits(std::max(1, static_cast<int>(std::bit_width(static_cast<unsigned>(max_cell))))) {
        (void)n;
        if (k * k * bits > 64) throw ResourceError("meet tables too large to key in one word");
    }
    std::uint64_t key(const int* cells) const {
        std::uint64_t x = 0;
        for (int i = 0; i < k * k; ++i) x = (x << bits) | static_cast<std::uint64_t>(cells[i]);
        return x;
    }
};

int max_cell(int n, int k, const PartitionFilter& f) {
    const auto [lo, hi] = f.size_range(n, k);
    (void)lo;
    return std::min(hi, n);
}

bool uniform_family(const MeetClassPartition& mcp) {
    return mcp.filter.kind == PartitionFilter::Kind::Uniform ||
           (mcp.n % mcp.k == 0 && mcp.filter.size_range(mcp.n, mcp.k) == std::pair{mcp.n / mcp.k, mcp.n / mcp.k});
}

/// Classifies tables against a fixed row partition via a memo of raw tables.
class Classifier {
public:
    Classifier(const MeetClassPartition& mcp, bool preserve_rows)
        : mcp_(mcp), keyer_(mcp.n, mcp.k, max_cell(mcp.n, mcp.k, mcp.filter)), preserve_(preserve_rows) {
        for (std::size_t c = 0; c < mcp.classes.size(); ++c) index_.emplace(mcp.classes[c].table, static_cast<int>(c));
    }

    /// Class of the canonical form of the given raw table, or -1.
    int classify(const MeetTable& raw) {
        const std::uint64_t key = keyer_.key(raw.cells.data());
        auto it = memo_.find(key);
        if (it != memo_.end()) return it->second;
        const MeetTable canon = canonical_impl(raw, preserve_);
        auto f = index_.find(canon);
        const int id = f == index_.end() ? -1 : f->second;
        memo_.emplace(key, id);
        return id;
    }

private:
    const MeetClassPartition& mcp_;
    TableKeyer keyer_;
    bool preserve_;
    std::map<MeetTable, int> index_;
    std::unordered_map<std::uint64_t, int> memo_;
};

void fill_table(MeetTable& t, std::span<const std::uint8_t> rows, std::span<const std::uint8_t> cols) {
    std::fill(t.cells.begin(), t.cells.end(), 0);
    for (std::size_t e = 0; e < rows.size(); ++e) ++t.cells[static_cast<std::size_t>(rows[e]) * t.k + cols[e]];
}

template <class Worker>
void run_shards(int jobs, Worker&& work) {
    jobs = std::max(1, jobs);
    if (jobs == 1) {
        work(0, 1);
        return;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(jobs);
    for (int s = 0; s < jobs; ++s)
        pool.emplace_back([&, s] {
            try {
                work(s, jobs);
            } catch (...) {
                errors[s] = std::current_exception();
            }
        });
    for (auto& t : pool) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

}  // namespace

MeetTable canonical_form(const MeetTable& m) {
    if (m.k < 0 || m.cells.size() != static_cast<std::size_t>(m.k) * m.k) throw ParameterError("malformed meet table");
    if (m.k > 6) throw ParameterError("canonical form supports k <= 6");
    return canonical_impl(m, false);
}

// ---------------------------------------------------------------------------
// Equitable partition

long MeetClassPartition::vertex_count() const {
    long v = 0;
    for (const auto& c : classes) v += c.size;
    return v;
}

std::vector<long> MeetClassPartition::class_sizes() const {
    std::vector<long> s;
    for (const auto& c : classes) s.push_back(c.size);
    return s;
}

int MeetClassPartition::class_of(const Partition& q) const {
    const MeetTable canon = canonical_impl(meet_table(base, q), !uniform_family(*this));
    for (std::size_t c = 0; c < classes.size(); ++c)
        if (classes[c].table == canon) return static_cast<int>(c);
    return -1;
}

MeetClassPartition equitable_partition(int n, int k, long vertex_cap) {
    if (k < 1 || n % k != 0) throw ParameterError("uniform family needs k dividing n");
    return equitable_partition(n, k, PartitionFilter::uniform(), vertex_cap);
}

MeetClassPartition equitable_partition(int n, int k, const PartitionFilter& filter, long vertex_cap) {
    validate_partition_params(n, k, filter);
    if (k > 6) throw ParameterError("meet-table classes support k <= 6");
    const mpz_class count = count_partitions(n, k, filter);
    if (count > vertex_cap)
        throw ResourceError("family has " + count.get_str() + " members, above the cap of " + std::to_string(vertex_cap));

    MeetClassPartition mcp;
    mcp.n = n;
    mcp.k = k;
    mcp.filter = filter;
    const bool uniform = n % k == 0 && filter.size_range(n, k) == std::pair{n / k, n / k};
    const TableKeyer keyer(n, k, max_cell(n, k, filter));
    std::unordered_map<std::uint64_t, int> memo;
    std::map<MeetTable, int> index;
    std::vector<std::uint8_t> base;
    MeetTable raw{k, std::vector<int>(static_cast<std::size_t>(k) * k)};

    for_each_partition(n, k, filter, [&](std::span<const std::uint8_t> lab) {
        if (base.empty()) {
            base.assign(lab.begin(), lab.end());
            mcp.base = Partition::from_labels(lab);
        }
        fill_table(raw, base, lab);
        const std::uint64_t key = keyer.key(raw.cells.data());
        auto it = memo.find(key);
        int id;
        if (it != memo.end()) {
            id = it->second;
        } else {
            MeetTable canon = canonical_impl(raw, !uniform);
            auto f = index.find(canon);
            if (f == index.end()) {
                id = static_cast<int>(mcp.classes.size());
                index.emplace(canon, id);
                mcp.classes.push_back({std::move(canon), Partition::from_labels(lab), 0});
            } else {
                id = f->second;
            }
            memo.emplace(key, id);
        }
        ++mcp.classes[id].size;
        return true;
    });
    if (mcp.classes.empty() || mcp.classes[0].size != 1)
        throw StructureError("base partition is not alone in its class");
    return mcp;
}

// ---------------------------------------------------------------------------
// Quotients

Matrix quotient_matrix(const MeetClassPartition& mcp, const QuotientRelation& rel, int jobs) {
    if (rel.kind == QuotientRelation::Kind::MeetClass) {
        if (rel.meet_class < 0 || rel.meet_class >= static_cast<int>(mcp.classes.size()))
            throw ParameterError("meet class index out of range");
        return meet_quotients(mcp, jobs)[rel.meet_class];
    }
    const int m = static_cast<int>(mcp.classes.size()), k = mcp.k, n = mcp.n;
    const bool uniform = uniform_family(mcp);
    std::vector<std::uint64_t> rep_masks;
    for (const auto& c : mcp.classes) {
        const auto ms = c.representative.masks();
        rep_masks.insert(rep_masks.end(), ms.begin(), ms.end());
    }
    std::vector<Matrix> partial(std::max(1, jobs), Matrix(m, std::vector<long long>(m, 0)));
    run_shards(jobs, [&](int shard, int shards) {
        Classifier cls(mcp, !uniform);
        Matrix& b = partial[shard];
        MeetTable raw{k, std::vector<int>(static_cast<std::size_t>(k) * k)};
        const auto& base = mcp.base.labels();
        std::vector<std::uint64_t> qm(k);
        for_each_partition(
            n, k, mcp.filter,
            [&](std::span<const std::uint8_t> lab) {
                fill_table(raw, base, lab);
                const int d = cls.classify(raw);
                if (d < 0) throw StructureError("partition outside every meet class");
                std::fill(qm.begin(), qm.end(), 0);
                for (int e = 0; e < n; ++e) qm[lab[e]] |= std::uint64_t{1} << e;
                for (int c = 0; c < m; ++c) {
                    const std::uint64_t* r = rep_masks.data() + static_cast<std::size_t>(c) * k;
                    bool qi = true;
                    for (int i = 0; i < k && qi; ++i)
                        for (int j = 0; j < k && qi; ++j) qi = (r[i] & qm[j]) != 0;
                    if (qi) ++b[c][d];
                }
                return true;
            },
            shard, shards);
    });
    Matrix b(m, std::vector<long long>(m, 0));
    for (const auto& p : partial)
        for (int c = 0; c < m; ++c)
            for (int d = 0; d < m; ++d) b[c][d] += p[c][d];
    return b;
}

std::vector<Matrix> meet_quotients(const MeetClassPartition& mcp, int jobs) {
    if (!uniform_family(mcp)) throw ParameterError("meet-class relations need a uniform family");
    const int m = static_cast<int>(mcp.classes.size()), k = mcp.k, n = mcp.n;
    std::vector<std::vector<std::uint8_t>> reps;
    for (const auto& c : mcp.classes) reps.push_back(c.representative.labels());
    using Counts = std::vector<long long>;  // [e][c][d]
    std::vector<Counts> partial(std::max(1, jobs), Counts(static_cast<std::size_t>(m) * m * m, 0));
    run_shards(jobs, [&](int shard, int shards) {
        Classifier base_cls(mcp, false);
        std::vector<Classifier> rel_cls;
        for (int c = 0; c < m; ++c) rel_cls.emplace_back(mcp, false);
        Counts& cnt = partial[shard];
        MeetTable raw{k, std::vector<int>(static_cast<std::size_t>(k) * k)};
        const auto& base = mcp.base.labels();
        for_each_partition(
            n, k, mcp.filter,
            [&](std::span<const std::uint8_t> lab) {
                fill_table(raw, base, lab);
                const int d = base_cls.classify(raw);
                if (d < 0) throw StructureError("partition outside every meet class");
                for (int c = 0; c < m; ++c) {
                    fill_table(raw, reps[c], lab);
                    const int e = rel_cls[c].classify(raw);
                    if (e < 0) throw StructureError("pair relation outside every meet class");
                    ++cnt[(static_cast<std::size_t>(e) * m + c) * m + d];
                }
                return true;
            },
            shard, shards);
    });
    std::vector<Matrix> out(m, Matrix(m, std::vector<long long>(m, 0)));
    for (const auto& p : partial)
        for (int e = 0; e < m; ++e)
            for (int c = 0; c < m; ++c)
                for (int d = 0; d < m; ++d) out[e][c][d] += p[(static_cast<std::size_t>(e) * m + c) * m + d];
    return out;
}

// ---------------------------------------------------------------------------
// Association schemes

SchemeVerdict check_scheme_relations(int v, const std::vector<std::uint8_t>& labels, int classes, int jobs) {
    if (v < 1 || labels.size() != static_cast<std::size_t>(v) * v) throw ParameterError("label matrix has the wrong size");
    const int m = classes;
    auto L = [&](int x, int y) { return static_cast<int>(labels[static_cast<std::size_t>(x) * v + y]); };
    SchemeVerdict out;
    out.classes = m;
    for (int x = 0; x < v; ++x)
        for (int y = 0; y < v; ++y) {
            const int l = L(x, y);
            if (l >= m || (l == 0) != (x == y)) throw ParameterError("relation 0 must be exactly the diagonal");
        }
    for (int x = 0; x < v; ++x)
        for (int y = x + 1; y < v; ++y)
            if (L(x, y) != L(y, x)) {
                out.symmetric = false;
                out.complete = true;
                out.reason = "relation of (" + std::to_string(x) + "," + std::to_string(y) + ") differs from its reverse";
                return out;
            }

    const int w = (v + 63) / 64;
    std::vector<std::uint64_t> rel(static_cast<std::size_t>(m) * v * w, 0);
    auto row = [&](int i, int x) { return rel.data() + (static_cast<std::size_t>(i) * v + x) * w; };
    for (int x = 0; x < v; ++x)
        for (int y = 0; y < v; ++y) row(L(x, y), x)[y >> 6] |= std::uint64_t{1} << (y & 63);

    // Reference intersection numbers from the first pair of each relation.
    std::vector<long> ref(static_cast<std::size_t>(m) * m * m, -1);
    auto counts = [&](int x, int y, std::vector<long>& n) {
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) {
                const std::uint64_t *a = row(i, x), *b = row(j, y);
                long c = 0;
                for (int t = 0; t < w; ++t) c += std::popcount(a[t] & b[t]);
                n[static_cast<std::size_t>(i) * m + j] = c;
            }
    };
    std::vector<long> n(static_cast<std::size_t>(m) * m);
    std::vector<char> seen(m, 0);
    for (int x = 0; x < v && std::count(seen.begin(), seen.end(), 1) < m; ++x)
        for (int y = x; y < v; ++y) {
            const int k = L(x, y);
            if (seen[k]) continue;
            counts(x, y, n);
            std::copy(n.begin(), n.end(), ref.begin() + static_cast<std::size_t>(k) * m * m);
            seen[k] = 1;
        }
    for (int k = 0; k < m; ++k) {
        if (!seen[k]) {
            out.reason = "relation " + std::to_string(k) + " is empty";
            out.complete = true;
            return out;
        }
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < i; ++j)
                if (ref[(static_cast<std::size_t>(k) * m + i) * m + j] != ref[(static_cast<std::size_t>(k) * m + j) * m + i]) {
                    out.reason = "intersection numbers of relation " + std::to_string(k) + " are not symmetric";
                    out.complete = true;
                    return out;
                }
    }

    jobs = std::max(1, jobs);
    struct Failure {
        int x = -1, y = -1;
    };
    std::vector<Failure> fails(jobs);
    std::vector<long> checked(jobs, 0);
    run_shards(jobs, [&](int shard, int shards) {
        std::vector<long> local(static_cast<std::size_t>(m) * m);
        for (int x = shard; x < v; x += shards) {
            for (int y = x; y < v; ++y) {
                counts(x, y, local);
                ++checked[shard];
                const long* r = ref.data() + static_cast<std::size_t>(L(x, y)) * m * m;
                if (!std::equal(local.begin(), local.end(), r)) {
                    fails[shard] = {x, y};
                    return;
                }
            }
        }
    });
    out.complete = true;
    for (long c : checked) out.pairs_checked += c;
    Failure first;
    for (const auto& f : fails)
        if (f.x >= 0 && (first.x < 0 || std::pair{f.x, f.y} < std::pair{first.x, first.y})) first = f;
    if (first.x >= 0) {
        out.reason = "intersection numbers of (" + std::to_string(first.x) + "," + std::to_string(first.y) +
                     ") differ from the reference pair";
        return out;
    }
    out.scheme = true;
    out.p_numbers = ref;
    return out;
}

namespace {

SchemeVerdict sampled_check(const MeetClassPartition& mcp, const SchemeOptions& opt) {
    const int n = mcp.n, k = mcp.k, m = static_cast<int>(mcp.classes.size());
    std::vector<std::vector<std::uint8_t>> verts;
    for_each_partition(n, k, mcp.filter, [&](std::span<const std::uint8_t> lab) {
        verts.emplace_back(lab.begin(), lab.end());
        return true;
    });
    Classifier cls(mcp, false);
    MeetTable raw{k, std::vector<int>(static_cast<std::size_t>(k) * k)};
    auto relation = [&](const std::vector<std::uint8_t>& a, const std::vector<std::uint8_t>& b) {
        fill_table(raw, a, b);
        const int r = cls.classify(raw);
        if (r < 0) throw StructureError("pair relation outside every meet class");
        return r;
    };
    auto counts = [&](const std::vector<std::uint8_t>& x, const std::vector<std::uint8_t>& y) {
        std::vector<long> c(static_cast<std::size_t>(m) * m, 0);
        for (const auto& z : verts) ++c[static_cast<std::size_t>(relation(x, z)) * m + relation(z, y)];
        return c;
    };

    SchemeVerdict out;
    out.classes = m;
    std::vector<long> ref;
    const auto& base = mcp.base.labels();
    for (int c = 0; c < m; ++c) {
        const auto r = counts(base, mcp.classes[c].representative.labels());
        ref.insert(ref.end(), r.begin(), r.end());
    }
    std::mt19937_64 rng(opt.seed);
    const int c_size = n / k;
    for (int c = 0; c < m; ++c) {
        for (int s = 0; s < opt.samples; ++s) {
            const auto& x = verts[std::uniform_int_distribution<std::size_t>(0, verts.size() - 1)(rng)];
            // g maps the base onto x: base class i -> a shuffled copy of x's class pi(i).
            std::vector<int> pi(k);
            std::iota(pi.begin(), pi.end(), 0);
            std::shuffle(pi.begin(), pi.end(), rng);
            std::vector<std::vector<int>> xcls(k);
            for (int e = 0; e < n; ++e) xcls[x[e]].push_back(e);
            for (auto& v : xcls) std::shuffle(v.begin(), v.end(), rng);
            std::vector<int> g(n);
            std::vector<int> used(k, 0);
            for (int e = 0; e < n; ++e) {
                const int b = base[e];
                g[e] = xcls[pi[b]][used[b]++];
            }
            (void)c_size;
            const auto& rep = mcp.classes[c].representative.labels();
            std::vector<int> ylab(n);
            for (int e = 0; e < n; ++e) ylab[g[e]] = rep[e];
            const auto y = Partition::from_labels(std::span<const int>(ylab)).labels();
            if (relation(x, y) != c) throw StructureError("sampled pair has the wrong relation");
            ++out.pairs_checked;
            const auto got = counts(x, y);
            if (!std::equal(got.begin(), got.end(), ref.begin() + static_cast<std::size_t>(c) * m * m)) {
                out.complete = true;
                out.reason = "sampled pair in class " + std::to_string(c) + " has different intersection numbers";
                out.counterexample = std::pair{Partition::from_labels(std::span<const std::uint8_t>(x)),
                                               Partition::from_labels(std::span<const std::uint8_t>(y))};
                return out;
            }
        }
    }
    out.complete = true;
    out.scheme = true;
    out.reason = "sampled";
    out.p_numbers = ref;
    return out;
}

}  // namespace

SchemeVerdict check_association_scheme(int n, int k, const SchemeOptions& opt) {
    const MeetClassPartition mcp = equitable_partition(n, k);
    const int m = static_cast<int>(mcp.classes.size());
    if (m > 255) throw ResourceError("too many meet classes for the relation matrix");

    SchemeVerdict out;
    out.classes = m;
    for (int c = 0; c < m; ++c) {
        if (canonical_form(mcp.classes[c].table.transpose()) != mcp.classes[c].table) {
            out.symmetric = false;
            out.complete = true;
            out.counterexample = std::pair{mcp.base, mcp.classes[c].representative};
            out.reason = "meet tables of (P,Q) and (Q,P) are not isomorphic";
            return out;
        }
    }
    if (opt.mode == SchemeMode::Sampled) return sampled_check(mcp, opt);

    const long v = mcp.vertex_count();
    if (v > opt.full_cap)
        throw ResourceError("full scheme check needs " + std::to_string(v) + " vertices, above the cap of " +
                            std::to_string(opt.full_cap));
    std::vector<std::vector<std::uint8_t>> verts;
    for_each_partition(n, k, mcp.filter, [&](std::span<const std::uint8_t> lab) {
        verts.emplace_back(lab.begin(), lab.end());
        return true;
    });
    std::vector<std::uint8_t> labels(static_cast<std::size_t>(v) * v);
    run_shards(opt.jobs, [&](int shard, int shards) {
        Classifier cls(mcp, false);
        MeetTable raw{k, std::vector<int>(static_cast<std::size_t>(k) * k)};
        for (long x = shard; x < v; x += shards)
            for (long y = 0; y < v; ++y) {
                fill_table(raw, verts[x], verts[y]);
                const int r = cls.classify(raw);
                if (r < 0) throw StructureError("pair relation outside every meet class");
                labels[static_cast<std::size_t>(x) * v + y] = static_cast<std::uint8_t>(r);
            }
    });
    out = check_scheme_relations(static_cast<int>(v), labels, m, opt.jobs);
    if (!out.scheme && !out.reason.empty()) {
        // Translate vertex indices in the reason into partitions where possible.
        int x = -1, y = -1;
        if (std::sscanf(out.reason.c_str(), "intersection numbers of (%d,%d)", &x, &y) == 2 ||
            std::sscanf(out.reason.c_str(), "relation of (%d,%d)", &x, &y) == 2)
            out.counterexample = std::pair{Partition::from_labels(std::span<const std::uint8_t>(verts[x])),
                                           Partition::from_labels(std::span<const std::uint8_t>(verts[y]))};
    }
    return out;
}

}  // namespace qica
