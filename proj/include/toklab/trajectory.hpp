#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "toklab/error.hpp"

namespace toklab::trajectory {

class ShapeMismatch : public Error {
 public:
  using Error::Error;
};
class CorruptPayload : public Error {
 public:
  using Error::Error;
};
class DimensionTooSmall : public Error {
 public:
  using Error::Error;
};
class UnknownCluster : public Error {
 public:
  explicit UnknownCluster(int id)
      : Error("no cluster with label " + std::to_string(id)) {}
};

// One exemplar instance: its per-layer vectors and the surrounding text.
struct TrajectoryTensor {
  std::string instance_id;
  std::string context_snippet;
  std::size_t exemplar_offset = 0;  // whitespace-token index in the snippet
  Eigen::MatrixXf values;           // layers x dim

  std::size_t layers() const { return static_cast<std::size_t>(values.rows()); }
  std::size_t dim() const { return static_cast<std::size_t>(values.cols()); }
};

// File layout: one JSON header line
//   {"count":N,"layers":L,"dim":D,"ids":[...],"snippets":[...],
//    "exemplar_offsets":[...],"shapes":[[L,D],...]}   ("shapes" optional)
// then N*L*D little-endian float32 values, instance-major, layer-major.
std::vector<TrajectoryTensor> parse_trajectories(std::string_view bytes);
std::vector<TrajectoryTensor> load_trajectories(const std::filesystem::path& path);
std::string serialize_trajectories(const std::vector<TrajectoryTensor>& tensors);

// Layer 0 first.
Eigen::VectorXd flatten(const TrajectoryTensor& t);
Eigen::MatrixXf unflatten(const Eigen::VectorXd& v, std::size_t layers,
                          std::size_t dim);
// N x (L*D), one flattened instance per row.
Eigen::MatrixXd stack_flattened(const std::vector<TrajectoryTensor>& tensors);
// N x D rows of a single layer.
Eigen::MatrixXd layer_matrix(const std::vector<TrajectoryTensor>& tensors,
                             std::size_t layer);

struct PcaResult {
  Eigen::MatrixXd components;          // K x M, orthonormal rows
  Eigen::MatrixXd scores;              // N x K
  Eigen::VectorXd explained_variance;  // K, non-increasing, >= 0
  Eigen::RowVectorXd mean;             // M
  double total_variance = 0;
  std::size_t positive_components = 0;  // among the K kept
  bool rank_deficient = false;          // fewer than K positive eigenvalues

  double explained_fraction() const;
  // Scores mapped back to the original space (mean added).
  Eigen::MatrixXd reconstruct() const;
};

// Exact eigen-decomposition of the sample covariance (N-1 denominator). For
// M > N the N x N Gram matrix is decomposed instead. Each component's
// largest-magnitude entry is made positive.
PcaResult pca_reduce(const Eigen::MatrixXd& data, std::size_t k);
std::vector<PcaResult> per_layer_pca(const std::vector<TrajectoryTensor>& tensors,
                                     std::size_t k);

enum class Projection { kPca2, kExternal };

Eigen::MatrixXd project_pca2(const Eigen::MatrixXd& scores);
// CSV with x,y columns (an optional leading id column and header allowed).
Eigen::MatrixXd load_external_points(const std::filesystem::path& path,
                                     std::size_t expected_rows);

struct ClusterMap {
  Eigen::MatrixXd points;  // N x 2
  std::vector<int> labels;  // -1 = noise; clusters numbered by first core index
  double epsilon = 0;
  std::size_t min_points = 0;

  int cluster_count() const;
  std::vector<std::size_t> members(int label) const;
};

// Density clustering: a core point has at least min_points points (itself
// included) within epsilon; cores within epsilon of each other share a
// cluster; a non-core point within epsilon of a core joins its nearest core.
ClusterMap cluster(const Eigen::MatrixXd& points, double epsilon,
                   std::size_t min_points);

// 10th-percentile pairwise distance; exact up to max_pairs pairs, otherwise
// estimated from max_pairs seeded random pairs.
double default_epsilon(const Eigen::MatrixXd& points, std::uint64_t seed = 0,
                       std::size_t max_pairs = 5'000'000);

struct Sample {
  std::size_t index = 0;
  std::string instance_id;
  std::string snippet;
};

// Keeps `window` whitespace tokens on each side of the exemplar.
std::string trim_snippet(const std::string& snippet, std::size_t exemplar_offset,
                         std::size_t window);

// Up to n members (all if fewer), chosen with a seeded shuffle, returned in
// index order.
std::vector<Sample> sample_cluster(const ClusterMap& map,
                                   const std::vector<TrajectoryTensor>& tensors,
                                   int cluster_id, std::size_t n,
                                   std::size_t display_window, std::uint64_t seed);

}  // namespace toklab::trajectory
