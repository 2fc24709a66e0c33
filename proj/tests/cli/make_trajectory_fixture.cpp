// Writes a trajectory file of three well-separated blobs: N instances of
// shape L x D whose flattened vectors sit around three distinct centers.
// Usage: make_trajectory_fixture OUT N L D SEED

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <random>
#include <string>

#include "toklab/trajectory.hpp"

int main(int argc, char** argv) {
  if (argc != 6) {
    std::cerr << "usage: make_trajectory_fixture OUT N L D SEED\n";
    return 1;
  }
  const std::size_t n = std::stoul(argv[2]), layers = std::stoul(argv[3]),
                    dim = std::stoul(argv[4]);
  std::mt19937_64 rng(std::stoull(argv[5]));
  std::normal_distribution<float> noise(0.0f, 0.1f);
  std::vector<toklab::trajectory::TrajectoryTensor> out;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t blob = i % 3;
    toklab::trajectory::TrajectoryTensor t;
    t.instance_id = "inst" + std::to_string(i);
    t.context_snippet = "left context blob" + std::to_string(blob) + " bank right context";
    t.exemplar_offset = 3;
    t.values = Eigen::MatrixXf::Zero(layers, dim);
    for (std::size_t l = 0; l < layers; ++l) {
      for (std::size_t d = 0; d < dim; ++d) {
        t.values(l, d) = (d % 3 == blob ? 10.0f : 0.0f) + noise(rng);
      }
    }
    out.push_back(std::move(t));
  }
  std::ofstream(argv[1], std::ios::binary) << toklab::trajectory::serialize_trajectories(out);
  return 0;
}
