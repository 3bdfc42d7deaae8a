#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace lofdrf {

// A finite point set described only by a pairwise distance. The callable must
// be symmetric with zero self-distance; nothing here assumes a metric space.
struct PointSet {
  size_t size = 0;
  std::function<double(size_t, size_t)> distance;
};

struct NeighborhoodInfo {
  size_t k = 0;
  std::vector<double> k_distance;            // per point: distance to its k-th nearest other point
  std::vector<std::vector<size_t>> neighbors;  // per point: all others within k_distance, index-sorted
};

// Exact k-nearest-neighbor pass over every point. Neighborhoods keep every
// point at distance <= k_distance, so ties can make them larger than k.
NeighborhoodInfo knn(const PointSet& ps, size_t k);

double reachability_distance(const PointSet& ps, const NeighborhoodInfo& info, size_t a, size_t b);

// Inverse of the mean reachability distance from a to its neighborhood.
// Returns +inf when that mean is zero (a sits on duplicates of itself).
double local_reachability_density(const PointSet& ps, const NeighborhoodInfo& info, size_t a);

double lof_score(const PointSet& ps, const NeighborhoodInfo& info, std::span<const double> lrd,
                 size_t a);

// Raw LOF for every point at neighborhood size k. Requires 2 <= size and
// 1 <= k <= size - 1.
std::vector<double> compute_lof(const PointSet& ps, size_t k, size_t threads = 0);

// Min-max rescaling into [0, 1]. All-equal input maps to all 0.5. When +inf
// scores are present they map to 1.0 and the finite scores are compressed
// into [0, 0.5] so outliers stay on top.
std::vector<double> normalize_scores(std::span<const double> scores);

// Fraction of positions where two label vectors disagree.
double prediction_distance(std::span<const int32_t> a, std::span<const int32_t> b);

}  // namespace lofdrf
