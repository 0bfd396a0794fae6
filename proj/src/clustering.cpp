#include "mmdd/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "mmdd/errors.hpp"
#include "mmdd/parallel.hpp"

namespace mmdd {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Candidate pair ordering: distance first, then (older id, younger id).
struct PairKey {
  double distance = kInf;
  int id_lo = -1;
  int id_hi = -1;

  bool operator<(const PairKey& other) const {
    if (distance != other.distance) return distance < other.distance;
    if (id_lo != other.id_lo) return id_lo < other.id_lo;
    return id_hi < other.id_hi;
  }
};

PairKey make_key(double distance, int id_a, int id_b) {
  return PairKey{distance, std::min(id_a, id_b), std::max(id_a, id_b)};
}

void validate_labels(const FeatureRows& rows, const std::vector<int>& labels,
                     int* out_k) {
  if (labels.size() != rows.size()) {
    throw std::invalid_argument("labels do not cover the rows");
  }
  int k = 0;
  for (int l : labels) {
    if (l < 0) throw std::invalid_argument("negative cluster label");
    k = std::max(k, l + 1);
  }
  std::vector<std::size_t> sizes(static_cast<std::size_t>(k), 0);
  for (int l : labels) ++sizes[static_cast<std::size_t>(l)];
  for (std::size_t s : sizes) {
    if (s == 0) throw std::invalid_argument("empty cluster in labels");
  }
  *out_k = k;
}

}  // namespace

double cosine_distance(std::span<const double> u, std::span<const double> v) {
  if (u.size() != v.size()) {
    throw std::invalid_argument("cosine_distance: dimension mismatch");
  }
  double uu = 0.0, vv = 0.0, uv = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    uu += u[i] * u[i];
    vv += v[i] * v[i];
    uv += u[i] * v[i];
  }
  if (uu == 0.0 || vv == 0.0) {
    throw std::invalid_argument("cosine_distance: zero-norm vector");
  }
  const double c = uv / (std::sqrt(uu) * std::sqrt(vv));
  return std::clamp(1.0 - c, 0.0, 2.0);
}

Dendrogram build_dendrogram(const FeatureRows& rows, unsigned threads) {
  const std::size_t n = rows.size();
  Dendrogram dendro;
  dendro.n_leaves = static_cast<int>(n);
  if (n < 2) return dendro;

  // Slot-based condensed state: a merge reuses the lower slot, the higher
  // slot goes inactive. Node ids keep the dendrogram numbering.
  std::vector<double> dist(n * n, 0.0);
  parallel_for(n, threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        const double d = cosine_distance(rows[i], rows[j]);
        dist[i * n + j] = d;
        dist[j * n + i] = d;
      }
    }
  });

  std::vector<int> node_id(n);
  std::iota(node_id.begin(), node_id.end(), 0);
  std::vector<int> size(n, 1);
  std::vector<bool> active(n, true);
  std::vector<int> nn(n, -1);        // nearest active slot
  std::vector<PairKey> nn_key(n);

  auto recompute_nn = [&](std::size_t i) {
    PairKey best;
    int best_slot = -1;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i || !active[j]) continue;
      const PairKey key = make_key(dist[i * n + j], node_id[i], node_id[j]);
      if (best_slot < 0 || key < best) {
        best = key;
        best_slot = static_cast<int>(j);
      }
    }
    nn[i] = best_slot;
    nn_key[i] = best;
  };
  for (std::size_t i = 0; i < n; ++i) recompute_nn(i);

  dendro.merges.reserve(n - 1);
  for (std::size_t t = 0; t + 1 < n; ++t) {
    // Global best pair via the per-slot caches.
    std::size_t best_i = n;
    for (std::size_t i = 0; i < n; ++i) {
      if (!active[i] || nn[i] < 0) continue;
      if (best_i == n || nn_key[i] < nn_key[best_i]) best_i = i;
    }
    std::size_t a = best_i;
    std::size_t b = static_cast<std::size_t>(nn[best_i]);
    if (a > b) std::swap(a, b);

    Merge merge;
    merge.left = std::min(node_id[a], node_id[b]);
    merge.right = std::max(node_id[a], node_id[b]);
    merge.distance = nn_key[best_i].distance;
    merge.size = size[a] + size[b];
    dendro.merges.push_back(merge);

    // Average linkage (Lance-Williams): d(a+b, c) is the size-weighted mean.
    const double wa = static_cast<double>(size[a]);
    const double wb = static_cast<double>(size[b]);
    for (std::size_t c = 0; c < n; ++c) {
      if (!active[c] || c == a || c == b) continue;
      const double d =
          (wa * dist[a * n + c] + wb * dist[b * n + c]) / (wa + wb);
      dist[a * n + c] = d;
      dist[c * n + a] = d;
    }
    node_id[a] = dendro.n_leaves + static_cast<int>(t);
    size[a] += size[b];
    active[b] = false;

    // Slots pointing at a or b need a fresh scan; the merged slot too. A
    // merged cluster can never steal a tie from a cached pair because its
    // node id is the largest so far.
    recompute_nn(a);
    for (std::size_t i = 0; i < n; ++i) {
      if (!active[i] || i == a) continue;
      if (nn[i] == static_cast<int>(a) || nn[i] == static_cast<int>(b)) {
        recompute_nn(i);
      }
    }
  }
  return dendro;
}

std::vector<int> cut_dendrogram(const Dendrogram& dendro, int k) {
  const int n = dendro.n_leaves;
  if (k < 1 || k > n) {
    throw std::invalid_argument("cut_dendrogram: k out of range");
  }
  const int merges_applied = n - k;
  std::vector<int> parent(static_cast<std::size_t>(n + merges_applied));
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[static_cast<std::size_t>(x)] != x) {
      parent[static_cast<std::size_t>(x)] =
          parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
      x = parent[static_cast<std::size_t>(x)];
    }
    return x;
  };
  for (int t = 0; t < merges_applied; ++t) {
    const Merge& m = dendro.merges[static_cast<std::size_t>(t)];
    const int id = n + t;
    parent[static_cast<std::size_t>(find(m.left))] = id;
    parent[static_cast<std::size_t>(find(m.right))] = id;
  }
  std::vector<int> labels(static_cast<std::size_t>(n), -1);
  std::vector<int> root_label(parent.size(), -1);
  int next = 0;
  for (int i = 0; i < n; ++i) {
    const int root = find(i);
    if (root_label[static_cast<std::size_t>(root)] < 0) {
      root_label[static_cast<std::size_t>(root)] = next++;
    }
    labels[static_cast<std::size_t>(i)] =
        root_label[static_cast<std::size_t>(root)];
  }
  return labels;
}

std::vector<int> agglomerative(const FeatureRows& rows, int k,
                               unsigned threads) {
  if (k < 1 || static_cast<std::size_t>(k) > rows.size()) {
    throw std::invalid_argument("agglomerative: k out of range");
  }
  return cut_dendrogram(build_dendrogram(rows, threads), k);
}

double davies_bouldin(const FeatureRows& rows, const std::vector<int>& labels,
                      bool l2_normalize) {
  int k = 0;
  validate_labels(rows, labels, &k);
  if (k < 2) {
    throw std::invalid_argument("davies_bouldin: needs at least 2 clusters");
  }
  const std::size_t dim = rows.empty() ? 0 : rows[0].size();

  FeatureRows points = rows;
  if (l2_normalize) {
    for (auto& p : points) {
      double norm = 0.0;
      for (double x : p) norm += x * x;
      norm = std::sqrt(norm);
      if (norm == 0.0) {
        throw std::invalid_argument("davies_bouldin: zero-norm row");
      }
      for (double& x : p) x /= norm;
    }
  }

  std::vector<std::vector<double>> centroid(
      static_cast<std::size_t>(k), std::vector<double>(dim, 0.0));
  std::vector<std::size_t> sizes(static_cast<std::size_t>(k), 0);
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto c = static_cast<std::size_t>(labels[i]);
    ++sizes[c];
    for (std::size_t d = 0; d < dim; ++d) centroid[c][d] += points[i][d];
  }
  for (std::size_t c = 0; c < centroid.size(); ++c) {
    for (double& x : centroid[c]) x /= static_cast<double>(sizes[c]);
  }

  auto euclid = [dim](const std::vector<double>& a,
                      const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t d = 0; d < dim; ++d) {
      const double diff = a[d] - b[d];
      s += diff * diff;
    }
    return std::sqrt(s);
  };

  std::vector<double> scatter(static_cast<std::size_t>(k), 0.0);
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto c = static_cast<std::size_t>(labels[i]);
    scatter[c] += euclid(points[i], centroid[c]);
  }
  for (std::size_t c = 0; c < scatter.size(); ++c) {
    scatter[c] /= static_cast<double>(sizes[c]);
  }

  double total = 0.0;
  for (int i = 0; i < k; ++i) {
    double worst = 0.0;
    for (int j = 0; j < k; ++j) {
      if (i == j) continue;
      const double gap = euclid(centroid[static_cast<std::size_t>(i)],
                                centroid[static_cast<std::size_t>(j)]);
      const double spread = scatter[static_cast<std::size_t>(i)] +
                            scatter[static_cast<std::size_t>(j)];
      if (gap == 0.0) {
        if (spread > 0.0) {
          throw DegenerateClusteringError(
              "davies_bouldin: degenerate clustering (coincident centroids)");
        }
        continue;  // two perfectly tight coincident clusters: no penalty
      }
      worst = std::max(worst, spread / gap);
    }
    total += worst;
  }
  return total / static_cast<double>(k);
}

KSelection select_k(const FeatureRows& rows, int k_min, int k_max,
                    unsigned threads) {
  const int n = static_cast<int>(rows.size());
  if (k_min < 2 || k_min > k_max || k_max > n - 1) {
    throw std::invalid_argument("select_k: need 2 <= k_min <= k_max <= n-1");
  }
  const Dendrogram dendro = build_dendrogram(rows, threads);
  KSelection result;
  result.curve.reserve(static_cast<std::size_t>(k_max - k_min + 1));
  for (int k = k_min; k <= k_max; ++k) {
    const auto labels = cut_dendrogram(dendro, k);
    double db;
    try {
      db = davies_bouldin(rows, labels, true);
    } catch (const DegenerateClusteringError&) {
      db = kInf;
    }
    result.curve.emplace_back(k, db);
  }
  double best = kInf;
  for (const auto& [k, db] : result.curve) best = std::min(best, db);
  // Smallest k within numerical scatter of the minimum.
  for (const auto& [k, db] : result.curve) {
    if (db <= best + 1e-9) {
      result.k_star = k;
      break;
    }
  }
  return result;
}

ClusterResult profile_clusters(const FeatureRows& rows,
                               const std::vector<int>& labels,
                               const std::vector<HourSlot>& hours) {
  int k = 0;
  validate_labels(rows, labels, &k);
  if (hours.size() != rows.size()) {
    throw std::invalid_argument("profile_clusters: hours do not cover rows");
  }
  for (const auto& row : rows) {
    if (row.size() != static_cast<std::size_t>(kNumModes)) {
      throw std::invalid_argument("profile_clusters: rows must have one "
                                  "column per mode");
    }
  }

  std::vector<ClusterProfile> profiles(static_cast<std::size_t>(k));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    auto& p = profiles[static_cast<std::size_t>(labels[i])];
    ++p.size;
    for (int q = 0; q < kNumModes; ++q) {
      p.mean_deviance[static_cast<std::size_t>(q)] +=
          rows[i][static_cast<std::size_t>(q)];
    }
    p.hours.push_back(hours[i]);
  }
  const double n = static_cast<double>(rows.size());
  for (auto& p : profiles) {
    for (double& v : p.mean_deviance) v /= static_cast<double>(p.size);
    std::sort(p.hours.begin(), p.hours.end());
    p.share = static_cast<double>(p.size) / n;
  }

  // Order clusters by descending size, ties by earliest member hour.
  std::vector<int> order(static_cast<std::size_t>(k));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    const auto& pa = profiles[static_cast<std::size_t>(a)];
    const auto& pb = profiles[static_cast<std::size_t>(b)];
    if (pa.size != pb.size) return pa.size > pb.size;
    return pa.hours.front() < pb.hours.front();
  });
  std::vector<int> remap(static_cast<std::size_t>(k));
  for (int new_id = 0; new_id < k; ++new_id) {
    remap[static_cast<std::size_t>(order[static_cast<std::size_t>(new_id)])] =
        new_id;
  }

  ClusterResult result;
  result.k = k;
  result.labels.resize(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    result.labels[i] = remap[static_cast<std::size_t>(labels[i])];
  }
  result.clusters.resize(static_cast<std::size_t>(k));
  for (int old_id = 0; old_id < k; ++old_id) {
    auto& p = profiles[static_cast<std::size_t>(old_id)];
    p.cluster_id = remap[static_cast<std::size_t>(old_id)];
    result.clusters[static_cast<std::size_t>(p.cluster_id)] = std::move(p);
  }
  return result;
}

}  // namespace mmdd
