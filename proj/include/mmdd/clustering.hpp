#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "mmdd/mode.hpp"
#include "mmdd/time.hpp"

namespace mmdd {

// 1 - cos(u, v), clamped to [0, 2]. Throws std::invalid_argument on a
// zero-norm input.
double cosine_distance(std::span<const double> u, std::span<const double> v);

// Node ids: 0..n-1 are rows, n+t is the cluster created by merge t.
struct Merge {
  int left = 0;  // left < right
  int right = 0;
  double distance = 0.0;
  int size = 0;  // members of the merged cluster
};

// Average-linkage merge distances may invert, so cuts go by merge order,
// never by distance threshold.
struct Dendrogram {
  int n_leaves = 0;
  std::vector<Merge> merges;  // n_leaves - 1 entries
};

using FeatureRows = std::vector<std::vector<double>>;

// Bottom-up average-linkage agglomeration under cosine distance.
// Equal-distance pairs merge in lexicographic (older id, younger id) order.
Dendrogram build_dendrogram(const FeatureRows& rows, unsigned threads = 1);

// Partition left after the first n-k merges; labels numbered by first member
// row. Throws std::invalid_argument unless 1 <= k <= n.
std::vector<int> cut_dendrogram(const Dendrogram& dendro, int k);

std::vector<int> agglomerative(const FeatureRows& rows, int k,
                               unsigned threads = 1);

// Davies-Bouldin index with Euclidean scatters and centroid gaps, on
// L2-normalized rows by default (Euclidean on the unit sphere tracks cosine
// while keeping centroids meaningful). Throws DegenerateClusteringError when
// clusters with nonzero scatter share a centroid.
double davies_bouldin(const FeatureRows& rows, const std::vector<int>& labels,
                      bool l2_normalize = true);

struct KSelection {
  int k_star = 0;
  std::vector<std::pair<int, double>> curve;  // (k, DB); +inf where degenerate
};

// One dendrogram, cut at every k in [k_min, k_max]; the smallest k within
// 1e-9 of the minimum DB wins (ties from duplicate rows land within
// floating-point scatter of each other).
KSelection select_k(const FeatureRows& rows, int k_min, int k_max,
                    unsigned threads = 1);

struct ClusterProfile {
  int cluster_id = 0;
  std::size_t size = 0;
  double share = 0.0;
  std::array<double, kNumModes> mean_deviance{};
  std::vector<HourSlot> hours;  // ascending
};

// Cluster ids ordered by descending size, ties by earliest member hour.
struct ClusterResult {
  int k = 0;
  std::vector<int> labels;
  std::vector<ClusterProfile> clusters;
};

ClusterResult profile_clusters(const FeatureRows& rows,
                               const std::vector<int>& labels,
                               const std::vector<HourSlot>& hours);

}  // namespace mmdd
