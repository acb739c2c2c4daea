#include "psprog/polytope.hpp"

#include <mpfr.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include <json.hpp>

#include "psprog/parallel.hpp"

namespace psprog {

namespace {

using Matrix = std::vector<RationalVec>;

// Row-reduces a copy of M and returns its rank.
int rank_of(Matrix m) {
    const int rows = static_cast<int>(m.size());
    if (rows == 0) return 0;
    const int cols = static_cast<int>(m[0].size());
    int rank = 0;
    for (int c = 0; c < cols && rank < rows; ++c) {
        int pivot = -1;
        for (int r = rank; r < rows; ++r)
            if (m[r][c] != 0) { pivot = r; break; }
        if (pivot < 0) continue;
        std::swap(m[rank], m[pivot]);
        for (int r = rank + 1; r < rows; ++r) {
            if (m[r][c] == 0) continue;
            Rational factor = m[r][c] / m[rank][c];
            for (int cc = c; cc < cols; ++cc) m[r][cc] -= factor * m[rank][cc];
        }
        ++rank;
    }
    return rank;
}

// Solves A y = b for square A; empty result when singular.
std::vector<RationalVec> solve_square(Matrix a, RationalVec b) {
    const int n = static_cast<int>(a.size());
    for (int c = 0; c < n; ++c) {
        int pivot = -1;
        for (int r = c; r < n; ++r)
            if (a[r][c] != 0) { pivot = r; break; }
        if (pivot < 0) return {};
        std::swap(a[c], a[pivot]);
        std::swap(b[c], b[pivot]);
        for (int r = c + 1; r < n; ++r) {
            if (a[r][c] == 0) continue;
            Rational factor = a[r][c] / a[c][c];
            for (int cc = c; cc < n; ++cc) a[r][cc] -= factor * a[c][cc];
            b[r] -= factor * b[c];
        }
    }
    RationalVec y(n);
    for (int r = n - 1; r >= 0; --r) {
        Rational acc = b[r];
        for (int c = r + 1; c < n; ++c) acc -= a[r][c] * y[c];
        y[r] = acc / a[r][r];
    }
    return {y};
}

// One nonzero kernel vector of an (n-1)-row, rank n-1 system; empty if the
// rank is lower.
RationalVec kernel_direction(Matrix a) {
    const int n = a.empty() ? 0 : static_cast<int>(a[0].size());
    const int rows = static_cast<int>(a.size());
    std::vector<int> pivot_col(rows, -1);
    int rank = 0;
    for (int c = 0; c < n && rank < rows; ++c) {
        int pivot = -1;
        for (int r = rank; r < rows; ++r)
            if (a[r][c] != 0) { pivot = r; break; }
        if (pivot < 0) continue;
        std::swap(a[rank], a[pivot]);
        for (int r = 0; r < rows; ++r) {
            if (r == rank || a[r][c] == 0) continue;
            Rational factor = a[r][c] / a[rank][c];
            for (int cc = 0; cc < n; ++cc) a[r][cc] -= factor * a[rank][cc];
        }
        pivot_col[rank] = c;
        ++rank;
    }
    if (rank != n - 1) return {};
    std::vector<bool> is_pivot(n, false);
    for (int r = 0; r < rank; ++r) is_pivot[pivot_col[r]] = true;
    int free_col = -1;
    for (int c = 0; c < n; ++c)
        if (!is_pivot[c]) { free_col = c; break; }
    RationalVec v(n, Rational(0));
    v[free_col] = 1;
    for (int r = 0; r < rank; ++r)
        v[pivot_col[r]] = -a[r][free_col] / a[r][pivot_col[r]];
    return v;
}

Rational dot(const RationalVec& a, const RationalVec& b) {
    Rational s(0);
    for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

bool feasible(const Polytope& p, const RationalVec& y) {
    for (const auto& h : p.halfspaces)
        if (dot(h.normal, y) < h.offset) return false;
    return true;
}

// Iterates over all size-`take` subsets of [0, total).
struct SubsetIter {
    std::vector<int> idx;
    int total;
    bool done = false;
    SubsetIter(int total_, int take) : total(total_) {
        if (take > total_ || take < 0) { done = true; return; }
        idx.resize(take);
        for (int i = 0; i < take; ++i) idx[i] = i;
    }
    void next() {
        int take = static_cast<int>(idx.size());
        if (take == 0) { done = true; return; }
        int i = take - 1;
        while (i >= 0 && idx[i] == total - take + i) --i;
        if (i < 0) { done = true; return; }
        ++idx[i];
        for (int j = i + 1; j < take; ++j) idx[j] = idx[j - 1] + 1;
    }
};

int affine_rank(const std::vector<RationalVec>& pts) {
    if (pts.size() <= 1) return 0;
    Matrix diffs;
    for (size_t i = 1; i < pts.size(); ++i) {
        RationalVec row(pts[i].size());
        for (size_t c = 0; c < row.size(); ++c) row[c] = pts[i][c] - pts[0][c];
        diffs.push_back(std::move(row));
    }
    return rank_of(std::move(diffs));
}

RationalVec centroid(const std::vector<RationalVec>& pts) {
    RationalVec c(pts[0].size(), Rational(0));
    for (const auto& p : pts)
        for (size_t i = 0; i < c.size(); ++i) c[i] += p[i];
    Rational inv = make_rational(1, static_cast<long>(pts.size()));
    for (auto& v : c) v *= inv;
    return c;
}

Rational det(Matrix a) {
    const int n = static_cast<int>(a.size());
    Rational result(1);
    for (int c = 0; c < n; ++c) {
        int pivot = -1;
        for (int r = c; r < n; ++r)
            if (a[r][c] != 0) { pivot = r; break; }
        if (pivot < 0) return Rational(0);
        if (pivot != c) {
            std::swap(a[c], a[pivot]);
            result = -result;
        }
        result *= a[c][c];
        for (int r = c + 1; r < n; ++r) {
            if (a[r][c] == 0) continue;
            Rational factor = a[r][c] / a[c][c];
            for (int cc = c; cc < n; ++cc) a[r][cc] -= factor * a[c][cc];
        }
    }
    return result;
}

// Recursive triangulation of the face spanned by `pts` (affine dimension
// q), coning from the face centroid over its sub-faces.  Sub-faces are cut
// out by the other supporting hyperplanes of the parent polytope.
// Returns simplices as (q+1)-point tuples.
void triangulate_face(const Polytope& p, const std::vector<RationalVec>& pts, int q,
                      std::vector<std::vector<RationalVec>>& out) {
    if (q == 0) {
        out.push_back({pts[0]});
        return;
    }
    if (q == 1) {
        // Extreme pair along the first coordinate with variation.
        size_t lo = 0, hi = 0;
        for (size_t c = 0; c < pts[0].size(); ++c) {
            for (size_t i = 0; i < pts.size(); ++i) {
                if (pts[i][c] < pts[lo][c]) lo = i;
                if (pts[i][c] > pts[hi][c]) hi = i;
            }
            if (lo != hi) break;
        }
        if (lo == hi) return;  // all points coincide
        out.push_back({pts[lo], pts[hi]});
        return;
    }
    RationalVec apex = centroid(pts);
    std::set<std::vector<size_t>> seen;
    for (const auto& h : p.halfspaces) {
        std::vector<RationalVec> sub;
        std::vector<size_t> key;
        for (size_t i = 0; i < pts.size(); ++i) {
            if (dot(h.normal, pts[i]) == h.offset) {
                sub.push_back(pts[i]);
                key.push_back(i);
            }
        }
        if (sub.size() < static_cast<size_t>(q)) continue;
        if (sub.size() == pts.size()) continue;  // not a proper sub-face
        if (affine_rank(sub) != q - 1) continue;
        if (!seen.insert(key).second) continue;
        std::vector<std::vector<RationalVec>> sub_simplices;
        triangulate_face(p, sub, q - 1, sub_simplices);
        for (auto& s : sub_simplices) {
            s.push_back(apex);
            out.push_back(std::move(s));
        }
    }
}

double rational_to_double_dir(const Rational& q, mpfr_rnd_t rnd) {
    mpfr_t t;
    mpfr_init2(t, 53);
    mpfr_set_q(t, q.get_mpq_t(), rnd);
    double d = mpfr_get_d(t, rnd);
    mpfr_clear(t);
    return d;
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

}  // namespace

std::string to_string(PolytopeLabel label) {
    switch (label) {
        case PolytopeLabel::kC: return "C";
        case PolytopeLabel::kCminus: return "C-";
        case PolytopeLabel::kCplus: return "C+";
        case PolytopeLabel::kCprime: return "C'";
        case PolytopeLabel::kCustom: return "custom";
    }
    return "?";
}

Polytope build_C(int k, int d, PolytopeLabel variant, const Rational& eps) {
    if (d < 1) throw std::invalid_argument("build_C: d must be >= 1");
    if (k < d + 2) throw std::invalid_argument("build_C: k must be >= d+2");
    const bool eps_variant =
        variant == PolytopeLabel::kCminus || variant == PolytopeLabel::kCplus;
    if (eps_variant && (eps < 0 || eps >= make_rational(1, 2)))
        throw std::invalid_argument("build_C: eps must lie in [0, 1/2)");

    Polytope p;
    p.dim = d + 1;
    p.label = variant;
    p.k = k;
    p.d = d;
    p.eps = eps_variant ? eps : Rational(0);

    auto add_pair = [&](const RationalVec& normal, const Rational& lo,
                        const Rational& hi) {
        p.halfspaces.push_back({normal, lo});
        RationalVec neg(normal.size());
        for (size_t i = 0; i < normal.size(); ++i) neg[i] = -normal[i];
        p.halfspaces.push_back({neg, -hi});
    };

    if (variant == PolytopeLabel::kCprime) {
        for (int j = 0; j <= d; ++j) {
            RationalVec normal(d + 1, Rational(0));
            for (int i = 0; i <= j; ++i) normal[i] = binomial(k - 1, i);
            add_pair(normal, Rational(0), Rational(1));
        }
        return p;
    }

    for (int j = 0; j < k; ++j) {
        RationalVec normal(d + 1, Rational(0));
        for (int i = 0; i <= d && i <= j; ++i) normal[i] = binomial(j, i);
        Rational lo(0), hi(1);
        if (j >= 1 && variant == PolytopeLabel::kCminus) hi = Rational(1) - eps;
        if (j >= 1 && variant == PolytopeLabel::kCplus) {
            lo = -eps;
            hi = Rational(1) + eps;
        }
        add_pair(normal, lo, hi);
    }
    return p;
}

std::vector<RationalVec> vertices(const Polytope& p) {
    const int m = p.dim;
    const int faces = static_cast<int>(p.halfspaces.size());
    if (m < 1) throw std::invalid_argument("vertices: dim must be >= 1");
    if (faces < m) throw std::runtime_error("vertices: unbounded polytope (too few faces)");

    std::vector<RationalVec> verts;
    for (SubsetIter it(faces, m); !it.done; it.next()) {
        Matrix a;
        RationalVec b;
        for (int idx : it.idx) {
            a.push_back(p.halfspaces[idx].normal);
            b.push_back(p.halfspaces[idx].offset);
        }
        auto sol = solve_square(std::move(a), std::move(b));
        if (sol.empty()) continue;
        if (feasible(p, sol[0])) verts.push_back(std::move(sol[0]));
    }
    std::sort(verts.begin(), verts.end());
    verts.erase(std::unique(verts.begin(), verts.end()), verts.end());

    if (verts.empty()) {
        Matrix normals;
        for (const auto& h : p.halfspaces) normals.push_back(h.normal);
        if (rank_of(std::move(normals)) < m)
            throw std::runtime_error("vertices: unbounded polytope (normals do not span)");
        return verts;  // genuinely empty intersection
    }

    // Recession-ray test: each candidate extreme ray lies in the kernel of
    // m-1 independent normals; if a nonzero direction satisfies every
    // constraint the polytope is unbounded.
    if (m >= 2) {
        for (SubsetIter it(faces, m - 1); !it.done; it.next()) {
            Matrix a;
            for (int idx : it.idx) a.push_back(p.halfspaces[idx].normal);
            RationalVec v = kernel_direction(std::move(a));
            if (v.empty()) continue;
            bool plus = true, minus = true;
            for (const auto& h : p.halfspaces) {
                Rational s = dot(h.normal, v);
                if (s < 0) plus = false;
                if (s > 0) minus = false;
                if (!plus && !minus) break;
            }
            if (plus || minus)
                throw std::runtime_error("vertices: unbounded polytope (recession ray)");
        }
    } else {
        bool plus = true, minus = true;
        for (const auto& h : p.halfspaces) {
            if (h.normal[0] < 0) plus = false;
            if (h.normal[0] > 0) minus = false;
        }
        if (plus || minus)
            throw std::runtime_error("vertices: unbounded polytope (recession ray)");
    }
    return verts;
}

VolumeResult volume_exact(const Polytope& p) {
    const int m = p.dim;
    VolumeResult res;
    res.volume = 0;
    std::vector<RationalVec> verts = vertices(p);
    res.vertex_count = static_cast<long>(verts.size());
    if (verts.size() < static_cast<size_t>(m + 1)) return res;
    if (affine_rank(verts) < m) return res;  // lower-dimensional: volume 0

    RationalVec apex = centroid(verts);
    Rational inv_mfact = make_rational(1, 1) / Rational(factorial(m));

    std::set<std::vector<size_t>> seen_facets;
    for (const auto& h : p.halfspaces) {
        std::vector<RationalVec> tight;
        std::vector<size_t> key;
        for (size_t i = 0; i < verts.size(); ++i) {
            if (dot(h.normal, verts[i]) == h.offset) {
                tight.push_back(verts[i]);
                key.push_back(i);
            }
        }
        if (tight.size() < static_cast<size_t>(m)) continue;
        if (affine_rank(tight) != m - 1) continue;
        if (!seen_facets.insert(key).second) continue;

        std::vector<std::vector<RationalVec>> simplices;
        triangulate_face(p, tight, m - 1, simplices);
        for (const auto& s : simplices) {
            Matrix mat;
            for (const auto& pt : s) {
                RationalVec row(m);
                for (int c = 0; c < m; ++c) row[c] = pt[c] - apex[c];
                mat.push_back(std::move(row));
            }
            Rational dv = det(std::move(mat));
            if (dv < 0) dv = -dv;
            if (dv == 0) continue;
            res.volume += dv * inv_mfact;
            ++res.simplex_count;
        }
    }
    return res;
}

MonteCarloResult volume_montecarlo(const Polytope& p, long long samples,
                                   std::uint64_t seed, int threads) {
    if (samples <= 0) throw std::invalid_argument("volume_montecarlo: samples must be > 0");
    const int m = p.dim;
    MonteCarloResult res;
    res.samples = samples;
    std::vector<RationalVec> verts = vertices(p);
    if (verts.empty()) return res;

    RationalVec lo_q = verts[0], hi_q = verts[0];
    for (const auto& v : verts)
        for (int c = 0; c < m; ++c) {
            if (v[c] < lo_q[c]) lo_q[c] = v[c];
            if (v[c] > hi_q[c]) hi_q[c] = v[c];
        }
    // Samples are drawn over the outward-rounded double box, so the
    // estimator scales by that box's volume, not the rational hull's.
    std::vector<double> lo(m), hi(m);
    double box_vol = 1;
    for (int c = 0; c < m; ++c) {
        lo[c] = rational_to_double_dir(lo_q[c], MPFR_RNDD);
        hi[c] = rational_to_double_dir(hi_q[c], MPFR_RNDU);
        box_vol *= hi[c] - lo[c];
    }
    res.box_volume = box_vol;
    if (box_vol == 0) return res;

    // Double-precision face data plus a conservative margin; samples inside
    // the margin band are re-tested exactly, so the hit count is exact.
    const int nf = static_cast<int>(p.halfspaces.size());
    std::vector<std::vector<double>> nrm(nf, std::vector<double>(m));
    std::vector<double> off(nf), margin(nf);
    for (int f = 0; f < nf; ++f) {
        double scale = 0;
        for (int c = 0; c < m; ++c) {
            nrm[f][c] = to_double(p.halfspaces[f].normal[c]);
            scale += std::abs(nrm[f][c]) *
                     std::max(std::abs(lo[c]), std::abs(hi[c]));
        }
        off[f] = to_double(p.halfspaces[f].offset);
        scale += std::abs(off[f]);
        margin[f] = scale * 1e-12 + 1e-300;
    }

    constexpr int kChunks = 64;
    const long long per_chunk = samples / kChunks;
    const long long rem = samples % kChunks;
    std::vector<long long> chunk_hits(kChunks, 0);

    parallel_for(0, kChunks, threads, [&](long a, long b) {
        std::vector<double> x(m);
        RationalVec xq(m);
        for (long chunk = a; chunk < b; ++chunk) {
            std::uint64_t state = splitmix64(seed ^ (0x5851f42d4c957f2dULL * (chunk + 1)));
            auto next_u64 = [&state]() {
                state = splitmix64(state);
                return state;
            };
            long long count = per_chunk + (chunk < rem ? 1 : 0);
            long long hits = 0;
            for (long long s = 0; s < count; ++s) {
                for (int c = 0; c < m; ++c) {
                    double u = static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
                    x[c] = lo[c] + u * (hi[c] - lo[c]);
                }
                bool inside = true;
                bool need_exact = false;
                for (int f = 0; f < nf && inside; ++f) {
                    double sdot = -off[f];
                    for (int c = 0; c < m; ++c) sdot += nrm[f][c] * x[c];
                    if (sdot < -margin[f]) {
                        inside = false;
                    } else if (sdot <= margin[f]) {
                        need_exact = true;
                    }
                }
                if (inside && need_exact) {
                    for (int c = 0; c < m; ++c) {
                        mpq_class q;
                        mpq_set_d(q.get_mpq_t(), x[c]);
                        xq[c] = q;
                    }
                    inside = feasible(p, xq);
                }
                if (inside) ++hits;
            }
            chunk_hits[chunk] = hits;
        }
    });

    long long hits = 0;
    for (long long h : chunk_hits) hits += h;
    res.hits = hits;
    const double box = box_vol;
    const double rate = static_cast<double>(hits) / static_cast<double>(samples);
    res.estimate = box * rate;
    res.std_error = box * std::sqrt(std::max(0.0, rate * (1 - rate) /
                                                      static_cast<double>(samples)));
    return res;
}

Rational lower_bound_volume(int k, int d) {
    if (d < 1 || k < d + 2) throw std::invalid_argument("lower_bound_volume: need k >= d+2");
    Rational prod(1);
    for (int i = 1; i <= d; ++i) prod *= binomial(k - 1, i);
    return Rational(1) / prod;
}

std::string polytope_json(const Polytope& p, bool with_vertices, bool with_volume) {
    nlohmann::json j;
    j["dim"] = p.dim;
    j["label"] = to_string(p.label);
    if (p.label != PolytopeLabel::kCustom) {
        j["k"] = p.k;
        j["d"] = p.d;
        if (p.label == PolytopeLabel::kCminus || p.label == PolytopeLabel::kCplus)
            j["eps"] = format_rational(p.eps);
    }
    nlohmann::json faces = nlohmann::json::array();
    for (const auto& h : p.halfspaces) {
        nlohmann::json f;
        nlohmann::json normal = nlohmann::json::array();
        for (const auto& c : h.normal) normal.push_back(format_rational(c));
        f["normal"] = normal;
        f["offset"] = format_rational(h.offset);
        faces.push_back(f);
    }
    j["halfspaces"] = faces;
    if (with_vertices || with_volume) {
        auto verts = vertices(p);
        if (with_vertices) {
            nlohmann::json vs = nlohmann::json::array();
            for (const auto& v : verts) {
                nlohmann::json row = nlohmann::json::array();
                for (const auto& c : v) row.push_back(format_rational(c));
                vs.push_back(row);
            }
            j["vertices"] = vs;
        }
        if (with_volume) {
            VolumeResult vr = volume_exact(p);
            j["volume"] = format_rational(vr.volume);
            j["volume_decimal"] = format_decimal(vr.volume);
            j["vertex_count"] = vr.vertex_count;
            j["simplex_count"] = vr.simplex_count;
        }
    }
    return j.dump(2);
}

}  // namespace psprog
