#ifndef PSPROG_POLYTOPE_HPP
#define PSPROG_POLYTOPE_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "psprog/rational.hpp"

namespace psprog {

using RationalVec = std::vector<Rational>;

// Constraint normal . y >= offset with exact rational data.
struct HalfSpace {
    RationalVec normal;
    Rational offset;
};

enum class PolytopeLabel { kC, kCminus, kCplus, kCprime, kCustom };
std::string to_string(PolytopeLabel label);

struct Polytope {
    int dim = 0;
    std::vector<HalfSpace> halfspaces;
    PolytopeLabel label = PolytopeLabel::kCustom;
    int k = 0;
    int d = 0;
    Rational eps;
};

// The polytope family behind the progression densities, as closures of the
// half-open sets (the boundary is Lebesgue-null, so volumes agree):
//   kC:      0 <= y_0 <= 1,  0 <= sum_i C(j,i) y_i <= 1        (j in [1,k))
//   kCminus: upper bounds replaced by 1 - eps on j >= 1 (one-sided variant)
//   kCplus:  j >= 1 faces relaxed to [-eps, 1 + eps]
//   kCprime: 0 <= y_0 <= 1,  0 <= sum_{i<=j} C(k-1,i) y_i <= 1 (j in [1,d])
Polytope build_C(int k, int d, PolytopeLabel variant, const Rational& eps = Rational(0));

// Exact H-to-V enumeration: solves every dim-subset of faces and keeps the
// feasible, deduplicated solutions.  Throws on an unbounded input (some
// recession ray satisfies every constraint).  An infeasible system yields
// an empty list.
std::vector<RationalVec> vertices(const Polytope& p);

struct VolumeResult {
    Rational volume;
    long vertex_count = 0;
    long simplex_count = 0;
};

// Exact volume by coning: apex at the vertex centroid, one cone per facet,
// facets triangulated recursively through their own centroids.  Degenerate
// (lower-dimensional) inputs report volume 0.
VolumeResult volume_exact(const Polytope& p);

struct MonteCarloResult {
    double estimate = 0;
    double std_error = 0;
    long long hits = 0;
    long long samples = 0;
    double box_volume = 0;
};

// Hit-rate estimate over the vertex bounding box.  Points within a rounding
// margin of a face are re-tested in exact arithmetic, so the count is
// exact for the sampled points; deterministic for a fixed seed regardless
// of thread count.
MonteCarloResult volume_montecarlo(const Polytope& p, long long samples,
                                   std::uint64_t seed, int threads = 0);

// 1 / prod_{i=1..d} C(k-1, i), the proven lower bound for vol(C_{k,d+1}).
Rational lower_bound_volume(int k, int d);

std::string polytope_json(const Polytope& p, bool with_vertices = false,
                          bool with_volume = false);

}  // namespace psprog

#endif  // PSPROG_POLYTOPE_HPP
