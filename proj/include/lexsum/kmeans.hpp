#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <span>
#include <vector>

#include "lexsum/error.hpp"

namespace lexsum {

using Vector = std::vector<double>;

struct KMeansResult {
  std::vector<std::size_t> assignments;
  std::vector<Vector> centroids;
  // Within-cluster squared distance after each assignment step.
  std::vector<double> distortion;
  int iterations = 0;
};

struct KMeansOptions {
  int max_iterations = 100;
};

namespace detail {

inline double squared_distance(const Vector& a, const Vector& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double t = a[i] - b[i];
    d += t * t;
  }
  return d;
}

// Uniform double in [0, 1) from the top 53 bits; identical on every platform,
// unlike std::uniform_real_distribution.
inline double unit_double(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline std::size_t uniform_index(std::mt19937_64& rng, std::size_t n) {
  return static_cast<std::size_t>(unit_double(rng) * static_cast<double>(n));
}

// Index drawn with probability proportional to weights[i].
inline std::size_t weighted_index(std::mt19937_64& rng,
                                  const std::vector<double>& weights,
                                  double total) {
  const double target = unit_double(rng) * total;
  double acc = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (weights[i] <= 0.0) continue;
    acc += weights[i];
    last_positive = i;
    if (target < acc) return i;
  }
  return last_positive;
}

// Greedy k-means++: each new centre is the best of several D²-weighted
// candidates, judged by the resulting potential.
inline std::vector<Vector> seed_centroids(std::span<const Vector> points,
                                          std::size_t k, std::mt19937_64& rng) {
  const std::size_t n = points.size();
  std::vector<Vector> centres;
  centres.reserve(k);
  std::vector<bool> taken(n, false);
  const std::size_t first = uniform_index(rng, n);
  centres.push_back(points[first]);
  taken[first] = true;

  std::vector<double> nearest(n);
  double potential = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    nearest[i] = squared_distance(points[i], centres[0]);
    potential += nearest[i];
  }
  const std::size_t trials =
      2 + static_cast<std::size_t>(std::log(static_cast<double>(k)));

  while (centres.size() < k) {
    std::size_t chosen = n;
    if (potential <= 0.0) {
      // Every point coincides with a centre already; take the next unused.
      for (std::size_t i = 0; i < n && chosen == n; ++i)
        if (!taken[i]) chosen = i;
    } else {
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t t = 0; t < trials; ++t) {
        const std::size_t cand = weighted_index(rng, nearest, potential);
        double pot = 0.0;
        for (std::size_t i = 0; i < n; ++i)
          pot += std::min(nearest[i], squared_distance(points[i], points[cand]));
        if (pot < best) {
          best = pot;
          chosen = cand;
        }
      }
    }
    centres.push_back(points[chosen]);
    taken[chosen] = true;
    potential = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      nearest[i] = std::min(nearest[i], squared_distance(points[i], points[chosen]));
      potential += nearest[i];
    }
  }
  return centres;
}

}  // namespace detail

/// Lloyd's algorithm from a seeded greedy k-means++ start. Stops once an
/// assignment pass changes nothing, or after max_iterations passes. A cluster
/// left empty takes over the point farthest from its own centroid.
inline KMeansResult kmeans(std::span<const Vector> points, std::size_t k,
                           std::uint64_t seed, KMeansOptions opts = {}) {
  const std::size_t n = points.size();
  if (k < 1 || k > n)
    throw Error("k-means: k=" + std::to_string(k) + " outside [1, " +
                std::to_string(n) + "]");
  const std::size_t dim = points[0].size();
  for (const auto& p : points) {
    if (p.size() != dim) throw Error("k-means: dimension mismatch");
    for (double x : p)
      if (!std::isfinite(x)) throw Error("k-means: non-finite coordinate");
  }

  std::mt19937_64 rng(seed);
  KMeansResult r;
  r.centroids = detail::seed_centroids(points, k, rng);
  r.assignments.assign(n, k);
  std::vector<double> dist(n);

  for (int iter = 0; iter < opts.max_iterations; ++iter) {
    bool changed = false;
    std::vector<std::size_t> sizes(k, 0);
    double distortion = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t best = 0;
      double best_d = detail::squared_distance(points[i], r.centroids[0]);
      for (std::size_t c = 1; c < k; ++c) {
        const double d = detail::squared_distance(points[i], r.centroids[c]);
        if (d < best_d) {
          best_d = d;
          best = c;
        }
      }
      if (r.assignments[i] != best) changed = true;
      r.assignments[i] = best;
      dist[i] = best_d;
      distortion += best_d;
      ++sizes[best];
    }
    for (std::size_t c = 0; c < k; ++c) {
      if (sizes[c] != 0) continue;
      std::size_t far = n;
      for (std::size_t i = 0; i < n; ++i) {
        if (sizes[r.assignments[i]] < 2) continue;
        if (far == n || dist[i] > dist[far]) far = i;
      }
      --sizes[r.assignments[far]];
      distortion -= dist[far];
      r.assignments[far] = c;
      dist[far] = 0.0;
      sizes[c] = 1;
      r.centroids[c] = points[far];
      changed = true;
    }
    r.distortion.push_back(distortion);
    r.iterations = iter + 1;

    std::vector<Vector> sums(k, Vector(dim, 0.0));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t d = 0; d < dim; ++d) sums[r.assignments[i]][d] += points[i][d];
    for (std::size_t c = 0; c < k; ++c)
      for (std::size_t d = 0; d < dim; ++d)
        r.centroids[c][d] = sums[c][d] / static_cast<double>(sizes[c]);

    if (!changed) break;
  }
  return r;
}

inline KMeansResult kmeans(const std::vector<Vector>& points, std::size_t k,
                           std::uint64_t seed, KMeansOptions opts = {}) {
  return kmeans(std::span<const Vector>(points), k, seed, opts);
}

}  // namespace lexsum
