#include "lofdrf/lof.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "lofdrf/error.hpp"
#include "lofdrf/parallel.hpp"

namespace lofdrf {

NeighborhoodInfo knn(const PointSet& ps, size_t k) {
  size_t m = ps.size;
  if (m < 2) throw InputError("point set needs at least 2 points");
  if (k < 1 || k > m - 1) throw InputError("neighborhood size out of range");

  NeighborhoodInfo info;
  info.k = k;
  info.k_distance.resize(m);
  info.neighbors.resize(m);

  std::vector<std::pair<double, size_t>> dist(m - 1);
  for (size_t a = 0; a < m; ++a) {
    size_t w = 0;
    for (size_t b = 0; b < m; ++b) {
      if (b == a) continue;
      dist[w++] = {ps.distance(a, b), b};
    }
    std::nth_element(dist.begin(), dist.begin() + (k - 1), dist.end(),
                     [](const auto& x, const auto& y) { return x.first < y.first; });
    double kd = dist[k - 1].first;
    info.k_distance[a] = kd;
    auto& nbrs = info.neighbors[a];
    for (const auto& [d, b] : dist) {
      if (d <= kd) nbrs.push_back(b);
    }
    std::sort(nbrs.begin(), nbrs.end());
  }
  return info;
}

double reachability_distance(const PointSet& ps, const NeighborhoodInfo& info, size_t a,
                             size_t b) {
  return std::max(info.k_distance[b], ps.distance(a, b));
}

double local_reachability_density(const PointSet& ps, const NeighborhoodInfo& info, size_t a) {
  const auto& nbrs = info.neighbors[a];
  double sum = 0.0;
  for (size_t b : nbrs) sum += reachability_distance(ps, info, a, b);
  if (sum == 0.0) return std::numeric_limits<double>::infinity();
  return double(nbrs.size()) / sum;
}

double lof_score([[maybe_unused]] const PointSet& ps, const NeighborhoodInfo& info,
                 std::span<const double> lrd, size_t a) {
  const auto& nbrs = info.neighbors[a];
  double la = lrd[a];
  double sum = 0.0;
  for (size_t b : nbrs) {
    double lb = lrd[b];
    double ratio;
    if (std::isinf(lb)) {
      // Both densities infinite: the point is indistinguishable from its
      // neighbor, so the ratio contributes a neutral 1.
      ratio = std::isinf(la) ? 1.0 : std::numeric_limits<double>::infinity();
    } else {
      ratio = std::isinf(la) ? 0.0 : lb / la;
    }
    sum += ratio;
  }
  return sum / double(nbrs.size());
}

std::vector<double> compute_lof(const PointSet& ps, size_t k, size_t threads) {
  NeighborhoodInfo info = knn(ps, k);
  size_t m = ps.size;

  std::vector<double> lrd(m);
  parallel_for(m, threads, [&](size_t a) { lrd[a] = local_reachability_density(ps, info, a); });

  std::vector<double> raw(m);
  parallel_for(m, threads, [&](size_t a) { raw[a] = lof_score(ps, info, lrd, a); });
  return raw;
}

std::vector<double> normalize_scores(std::span<const double> scores) {
  std::vector<double> out(scores.size());
  if (scores.empty()) return out;

  bool any_inf = false;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (double s : scores) {
    if (std::isinf(s)) {
      any_inf = true;
      continue;
    }
    lo = std::min(lo, s);
    hi = std::max(hi, s);
  }

  if (!any_inf) {
    if (lo == hi) {
      std::fill(out.begin(), out.end(), 0.5);
      return out;
    }
    for (size_t i = 0; i < scores.size(); ++i) out[i] = (scores[i] - lo) / (hi - lo);
    return out;
  }

  // Infinite scores pin the top of the scale; finite scores keep their
  // relative order in the lower half.
  for (size_t i = 0; i < scores.size(); ++i) {
    if (std::isinf(scores[i])) {
      out[i] = 1.0;
    } else if (lo == hi) {
      out[i] = 0.0;
    } else {
      out[i] = 0.5 * (scores[i] - lo) / (hi - lo);
    }
  }
  return out;
}

double prediction_distance(std::span<const int32_t> a, std::span<const int32_t> b) {
  if (a.size() != b.size()) throw InputError("prediction vectors differ in length");
  if (a.empty()) return 0.0;
  size_t diff = 0;
  for (size_t i = 0; i < a.size(); ++i) diff += (a[i] != b[i]);
  return double(diff) / double(a.size());
}

}  // namespace lofdrf
