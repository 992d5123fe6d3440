#include "topolens/rips.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <unordered_map>
#include <vector>

namespace topolens {

namespace {

using index_t = std::uint32_t;

struct Edge {
    double value;
    index_t a, b; // a < b
};

// Ascending (value, lexicographic vertex) order; the global simplex order is
// (value, dim, lex), and within one dimension this is it.
inline bool edge_less(const Edge& x, const Edge& y) {
    if (x.value != y.value) return x.value < y.value;
    if (x.a != y.a) return x.a < y.a;
    return x.b < y.b;
}

struct UnionFind {
    std::vector<index_t> parent;
    std::vector<std::uint8_t> rank;

    explicit UnionFind(index_t n) : parent(n), rank(n, 0) {
        for (index_t i = 0; i < n; ++i) parent[i] = i;
    }

    index_t find(index_t x) {
        index_t root = x;
        while (parent[root] != root) root = parent[root];
        while (parent[x] != root) {
            const index_t next = parent[x];
            parent[x] = root;
            x = next;
        }
        return root;
    }

    void link(index_t x, index_t y) {
        if (rank[x] < rank[y]) std::swap(x, y);
        parent[y] = x;
        if (rank[x] == rank[y]) ++rank[x];
    }
};

struct CobEntry {
    double value;
    std::uint64_t key;
};

// std heap functions build a max-heap; this comparator makes the top the
// minimal coface in ascending (value, key) order, which is the cohomology
// pivot.
inline bool cob_after(const CobEntry& x, const CobEntry& y) {
    if (x.value != y.value) return x.value > y.value;
    return x.key > y.key;
}

class CobHeap {
public:
    void clear() { entries_.clear(); }

    void push(const CobEntry& e) {
        entries_.push_back(e);
        std::push_heap(entries_.begin(), entries_.end(), cob_after);
    }

    // Extracts the minimal entry with Z/2 cancellation of duplicates; returns
    // false when the column is zero.
    bool pop_pivot(CobEntry& out) {
        while (!entries_.empty()) {
            out = entries_.front();
            std::pop_heap(entries_.begin(), entries_.end(), cob_after);
            entries_.pop_back();
            if (!entries_.empty() && entries_.front().key == out.key) {
                std::pop_heap(entries_.begin(), entries_.end(), cob_after);
                entries_.pop_back();
                continue;
            }
            return true;
        }
        return false;
    }

private:
    std::vector<CobEntry> entries_;
};

std::vector<double> dense_distances(const DistanceMatrix& dist) {
    const std::size_t n = dist.size();
    std::vector<double> dense(n * n);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            dense[static_cast<std::size_t>(i) * n + j] = dist(static_cast<std::size_t>(i), j);
        }
    }
    return dense;
}

double resolve_threshold(const DistanceMatrix& dist, std::optional<double> threshold) {
    if (threshold && *threshold < 0.0) throw NumericError("threshold must be nonnegative");
    const double radius = dist.enclosing_radius();
    // Clamping to the enclosing radius cannot change the barcode: the complex
    // is a cone past it, so every class born there dies there.
    return threshold ? std::min(*threshold, radius) : radius;
}

} // namespace

Barcode rips_persistence(const DistanceMatrix& dist, int max_dim,
                         std::optional<double> threshold) {
    if (max_dim < 0 || max_dim > 1) {
        throw NumericError("unsupported homology dimension " + std::to_string(max_dim) +
                           " (supported: 0, 1)");
    }
    const std::size_t n = dist.size();
    if (n == 0) throw NumericError("empty distance matrix");
    // edge ranks are 32-bit; n^2/2 must fit
    if (n > 90000) throw NumericError("point count " + std::to_string(n) + " exceeds kernel limit");

    const double t_eff = resolve_threshold(dist, threshold);

    Barcode barcode;
    barcode.threshold = t_eff;
    if (n == 1) {
        barcode.intervals.push_back({0, 0.0, kInfiniteDeath, false});
        return barcode;
    }

    const std::vector<double> dense = dense_distances(dist);
    const auto d = [&](index_t i, index_t j) { return dense[std::size_t(i) * n + j]; };

    // All edges of the complete graph in ascending (value, lex) order. Dim 0
    // is computed over the complete graph; the threshold applies to dim 1 only.
    std::vector<Edge> edges(n * (n - 1) / 2);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t ia = 0; ia < static_cast<std::ptrdiff_t>(n) - 1; ++ia) {
        const index_t a = static_cast<index_t>(ia);
        std::size_t pos = std::size_t(a) * n - std::size_t(a) * (a + 1) / 2;
        for (index_t b = a + 1; b < n; ++b, ++pos) edges[pos] = Edge{d(a, b), a, b};
    }
    std::sort(edges.begin(), edges.end(), edge_less);

    // Kruskal pass: merge values are the dim-0 deaths; surviving edges within
    // the threshold become the dim-1 columns (tree edges are cleared).
    std::vector<index_t> columns;
    {
        UnionFind uf(static_cast<index_t>(n));
        std::size_t merges = 0;
        for (index_t rank = 0; rank < edges.size(); ++rank) {
            const Edge& e = edges[rank];
            if (merges + 1 < n) {
                const index_t ra = uf.find(e.a);
                const index_t rb = uf.find(e.b);
                if (ra != rb) {
                    uf.link(ra, rb);
                    ++merges;
                    barcode.intervals.push_back({0, 0.0, e.value, false});
                    continue;
                }
            }
            if (e.value <= t_eff) columns.push_back(rank);
            else if (merges + 1 == n) break;
        }
        barcode.intervals.push_back({0, 0.0, kInfiniteDeath, false});
    }

    if (max_dim == 0 || n < 3) return barcode;

    // Persistent cohomology over Z/2 for dim 1: reduce the coboundary columns
    // of the non-tree edges in decreasing filtration order. The pivot of a
    // column is its minimal triangle coface in ascending (value, lex) order.
    const auto tri_key = [&](index_t x, index_t y, index_t z) {
        return (std::uint64_t(x) * n + y) * n + z;
    };
    const auto coface_value = [&](const Edge& e, index_t v) {
        return std::max(e.value, std::max(d(e.a, v), d(e.b, v)));
    };
    const auto coface_key = [&](const Edge& e, index_t v) {
        if (v < e.a) return tri_key(v, e.a, e.b);
        if (v < e.b) return tri_key(e.a, v, e.b);
        return tri_key(e.a, e.b, v);
    };

    std::unordered_map<std::uint64_t, index_t> pivot_owner;
    pivot_owner.reserve(columns.size() * 2);
    std::vector<std::vector<index_t>> v_columns;
    v_columns.reserve(columns.size());
    std::vector<double> pivot_values; // death value per stored column
    pivot_values.reserve(columns.size());

    CobHeap working_cob;
    std::vector<index_t> working_v;
    std::vector<CobEntry> scan_buffer;

    std::vector<Interval> dim1;

    const auto push_cofaces = [&](index_t edge_rank) {
        const Edge& e = edges[edge_rank];
        for (index_t v = 0; v < n; ++v) {
            if (v == e.a || v == e.b) continue;
            const double tv = coface_value(e, v);
            if (tv <= t_eff) working_cob.push({tv, coface_key(e, v)});
        }
    };

    for (std::size_t ci = columns.size(); ci-- > 0;) {
        const index_t edge_rank = columns[ci];
        const Edge& e = edges[edge_rank];

        // Single scan over candidate third vertices (increasing v is exactly
        // lex order of the cofaces). A coface sharing the edge value whose key
        // is unclaimed is an emergent pair: the column is already reduced and
        // contributes a zero-persistence pair, so only the claim is recorded.
        scan_buffer.clear();
        bool emergent = false;
        bool shortcut_open = true;
        for (index_t v = 0; v < n; ++v) {
            if (v == e.a || v == e.b) continue;
            const double tv = coface_value(e, v);
            if (tv > t_eff) continue;
            const std::uint64_t key = coface_key(e, v);
            if (shortcut_open && tv == e.value) {
                shortcut_open = false;
                if (pivot_owner.find(key) == pivot_owner.end()) {
                    pivot_owner.emplace(key, static_cast<index_t>(v_columns.size()));
                    v_columns.push_back({edge_rank});
                    pivot_values.push_back(tv);
                    emergent = true;
                    break;
                }
            }
            scan_buffer.push_back({tv, key});
        }
        if (emergent) continue;

        working_cob.clear();
        for (const auto& entry : scan_buffer) working_cob.push(entry);
        working_v.clear();
        working_v.push_back(edge_rank);

        CobEntry pivot;
        bool alive = true;
        while (true) {
            if (!working_cob.pop_pivot(pivot)) {
                alive = false;
                break;
            }
            const auto it = pivot_owner.find(pivot.key);
            if (it == pivot_owner.end()) break;
            working_cob.push(pivot); // put the pivot back, the added column cancels it
            for (const index_t er : v_columns[it->second]) {
                working_v.push_back(er);
                push_cofaces(er);
            }
        }

        if (!alive) {
            // Still alive at the cutoff: report the truncated bar.
            if (t_eff > e.value) dim1.push_back({1, e.value, t_eff, true});
            continue;
        }

        std::sort(working_v.begin(), working_v.end());
        std::vector<index_t> reduced;
        reduced.reserve(working_v.size());
        for (std::size_t i = 0; i < working_v.size();) {
            if (i + 1 < working_v.size() && working_v[i] == working_v[i + 1]) {
                i += 2;
                continue;
            }
            reduced.push_back(working_v[i]);
            ++i;
        }
        pivot_owner.emplace(pivot.key, static_cast<index_t>(v_columns.size()));
        v_columns.push_back(std::move(reduced));
        pivot_values.push_back(pivot.value);

        if (pivot.value > e.value) dim1.push_back({1, e.value, pivot.value, false});
    }

    std::sort(dim1.begin(), dim1.end(), [](const Interval& x, const Interval& y) {
        if (x.birth != y.birth) return x.birth < y.birth;
        if (x.death != y.death) return x.death < y.death;
        return x.truncated < y.truncated;
    });
    barcode.intervals.insert(barcode.intervals.end(), dim1.begin(), dim1.end());
    return barcode;
}

namespace reference {

namespace {

struct Simplex {
    double value;
    std::uint8_t dim;
    index_t v[3]; // ascending, unused slots = 0
};

bool simplex_less(const Simplex& x, const Simplex& y) {
    if (x.value != y.value) return x.value < y.value;
    if (x.dim != y.dim) return x.dim < y.dim;
    for (int k = 0; k <= x.dim; ++k) {
        if (x.v[k] != y.v[k]) return x.v[k] < y.v[k];
    }
    return false;
}

} // namespace

Barcode rips_persistence_naive(const DistanceMatrix& dist, int max_dim,
                               std::optional<double> threshold) {
    if (max_dim < 0 || max_dim > 1) {
        throw NumericError("unsupported homology dimension " + std::to_string(max_dim) +
                           " (supported: 0, 1)");
    }
    const std::size_t n = dist.size();
    if (n == 0) throw NumericError("empty distance matrix");

    const double t_eff = resolve_threshold(dist, threshold);

    Barcode barcode;
    barcode.threshold = t_eff;
    if (n == 1) {
        barcode.intervals.push_back({0, 0.0, kInfiniteDeath, false});
        return barcode;
    }

    // The full complex: all vertices and edges (dim 0 ignores the threshold),
    // triangles up to the threshold, ordered by (value, dim, lex).
    std::vector<Simplex> simplices;
    for (index_t i = 0; i < n; ++i) simplices.push_back({0.0, 0, {i, 0, 0}});
    for (index_t i = 0; i < n; ++i) {
        for (index_t j = i + 1; j < n; ++j) simplices.push_back({dist(i, j), 1, {i, j, 0}});
    }
    if (max_dim >= 1) {
        for (index_t i = 0; i < n; ++i) {
            for (index_t j = i + 1; j < n; ++j) {
                const double dij = dist(i, j);
                if (dij > t_eff) continue;
                for (index_t k = j + 1; k < n; ++k) {
                    const double val = std::max(dij, std::max(dist(i, k), dist(j, k)));
                    if (val <= t_eff) simplices.push_back({val, 2, {i, j, k}});
                }
            }
        }
    }
    std::sort(simplices.begin(), simplices.end(), simplex_less);

    const std::size_t m = simplices.size();
    std::vector<std::size_t> vertex_pos(n);
    std::unordered_map<std::uint64_t, std::size_t> edge_pos;
    edge_pos.reserve(n * n / 2);
    for (std::size_t p = 0; p < m; ++p) {
        const Simplex& s = simplices[p];
        if (s.dim == 0) vertex_pos[s.v[0]] = p;
        else if (s.dim == 1) edge_pos[std::uint64_t(s.v[0]) * n + s.v[1]] = p;
    }

    // Left-to-right column reduction over Z/2; columns are sorted row lists,
    // the pivot is the largest row.
    std::vector<std::vector<std::size_t>> reduced(m);
    std::vector<std::ptrdiff_t> claimed_by(m, -1);
    std::vector<std::size_t> col, merged;

    for (std::size_t j = 0; j < m; ++j) {
        const Simplex& s = simplices[j];
        col.clear();
        if (s.dim == 1) {
            col = {vertex_pos[s.v[0]], vertex_pos[s.v[1]]};
        } else if (s.dim == 2) {
            col = {edge_pos[std::uint64_t(s.v[0]) * n + s.v[1]],
                   edge_pos[std::uint64_t(s.v[0]) * n + s.v[2]],
                   edge_pos[std::uint64_t(s.v[1]) * n + s.v[2]]};
        }
        std::sort(col.begin(), col.end());

        while (!col.empty() && claimed_by[col.back()] >= 0) {
            const auto& other = reduced[static_cast<std::size_t>(claimed_by[col.back()])];
            merged.clear();
            std::set_symmetric_difference(col.begin(), col.end(), other.begin(), other.end(),
                                          std::back_inserter(merged));
            col.swap(merged);
        }
        if (!col.empty()) claimed_by[col.back()] = static_cast<std::ptrdiff_t>(j);
        reduced[j] = col;
    }

    // Paired rows give the bars; unpaired zero columns are essential classes.
    std::vector<Interval> dim1;
    for (std::size_t j = 0; j < m; ++j) {
        const Simplex& s = simplices[j];
        if (!reduced[j].empty()) continue; // j is a death, not a birth
        const std::ptrdiff_t killer = claimed_by[j];
        if (s.dim == 0) {
            const double death = killer >= 0 ? simplices[static_cast<std::size_t>(killer)].value
                                             : kInfiniteDeath;
            barcode.intervals.push_back({0, 0.0, death, false});
        } else if (s.dim == 1 && s.value <= t_eff) {
            if (killer >= 0) {
                const double death = simplices[static_cast<std::size_t>(killer)].value;
                if (death > s.value) dim1.push_back({1, s.value, death, false});
            } else if (t_eff > s.value) {
                dim1.push_back({1, s.value, t_eff, true});
            }
        }
    }

    std::sort(barcode.intervals.begin(), barcode.intervals.end(),
              [](const Interval& x, const Interval& y) {
                  if (x.finite() != y.finite()) return x.finite();
                  return x.death < y.death;
              });
    std::sort(dim1.begin(), dim1.end(), [](const Interval& x, const Interval& y) {
        if (x.birth != y.birth) return x.birth < y.birth;
        if (x.death != y.death) return x.death < y.death;
        return x.truncated < y.truncated;
    });
    barcode.intervals.insert(barcode.intervals.end(), dim1.begin(), dim1.end());
    return barcode;
}

} // namespace reference

} // namespace topolens
