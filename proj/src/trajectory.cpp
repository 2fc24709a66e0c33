#include "toklab/trajectory.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include <json.hpp>

#include "toklab/digest.hpp"

namespace toklab::trajectory {
namespace {

std::uint32_t swap32(std::uint32_t v) {
  return (v >> 24) | ((v >> 8) & 0xFF00u) | ((v << 8) & 0xFF0000u) | (v << 24);
}

float read_le_float(const char* p) {
  std::uint32_t bits;
  std::memcpy(&bits, p, 4);
  if constexpr (std::endian::native == std::endian::big) bits = swap32(bits);
  float f;
  std::memcpy(&f, &bits, 4);
  return f;
}

void append_le_float(std::string& out, float f) {
  std::uint32_t bits;
  std::memcpy(&bits, &f, 4);
  if constexpr (std::endian::native == std::endian::big) bits = swap32(bits);
  char buf[4];
  std::memcpy(buf, &bits, 4);
  out.append(buf, 4);
}

template <typename T>
T header_field(const nlohmann::json& header, const char* name) {
  if (!header.contains(name)) {
    throw CorruptPayload(std::string("header lacks '") + name + "'");
  }
  try {
    return header.at(name).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw CorruptPayload(std::string("header field '") + name + "' has the wrong type");
  }
}

void check_same_shape(const std::vector<TrajectoryTensor>& tensors) {
  for (const auto& t : tensors) {
    if (t.layers() != tensors.front().layers() || t.dim() != tensors.front().dim()) {
      throw ShapeMismatch("instance " + t.instance_id + " is " +
                          std::to_string(t.layers()) + "x" + std::to_string(t.dim()) +
                          ", expected " + std::to_string(tensors.front().layers()) +
                          "x" + std::to_string(tensors.front().dim()));
    }
  }
}

// Largest-magnitude entry positive; the first such entry on ties.
void fix_sign(Eigen::Ref<Eigen::VectorXd> v) {
  Eigen::Index arg = 0;
  v.cwiseAbs().maxCoeff(&arg);
  if (v(arg) < 0) v = -v;
}

// Orthonormalizes column j against columns [0, j) twice; false if it vanishes.
bool orthonormalize_against(Eigen::MatrixXd& basis, Eigen::Index j) {
  for (int pass = 0; pass < 2; ++pass) {
    for (Eigen::Index i = 0; i < j; ++i) {
      basis.col(j) -= basis.col(i).dot(basis.col(j)) * basis.col(i);
    }
  }
  const double norm = basis.col(j).norm();
  if (norm < 1e-6) return false;
  basis.col(j) /= norm;
  return true;
}

struct CellHash {
  std::size_t operator()(const std::pair<std::int64_t, std::int64_t>& c) const {
    return std::hash<std::int64_t>()(c.first * 0x9E3779B97F4A7C15LL ^ c.second);
  }
};

std::int64_t cell_of(double value, double epsilon) {
  const double c = std::floor(value / epsilon);
  constexpr double kLimit = 4e18;
  return static_cast<std::int64_t>(std::clamp(c, -kLimit, kLimit));
}

}  // namespace

std::vector<TrajectoryTensor> parse_trajectories(std::string_view bytes) {
  const auto newline = bytes.find('\n');
  if (newline == std::string_view::npos) throw CorruptPayload("missing header line");
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(bytes.substr(0, newline));
  } catch (const nlohmann::json::exception& e) {
    throw CorruptPayload(std::string("header is not JSON: ") + e.what());
  }
  if (!header.is_object()) throw CorruptPayload("header is not a JSON object");
  const auto count = header_field<std::size_t>(header, "count");
  const auto layers = header_field<std::size_t>(header, "layers");
  const auto dim = header_field<std::size_t>(header, "dim");
  const auto ids = header_field<std::vector<std::string>>(header, "ids");
  const auto snippets = header_field<std::vector<std::string>>(header, "snippets");
  const auto offsets =
      header_field<std::vector<std::size_t>>(header, "exemplar_offsets");
  if (layers == 0 || dim == 0) throw CorruptPayload("layers and dim must be >= 1");
  if (ids.size() != count || snippets.size() != count || offsets.size() != count) {
    throw CorruptPayload("ids, snippets and exemplar_offsets must have count entries");
  }
  if (header.contains("shapes")) {
    const auto shapes =
        header_field<std::vector<std::vector<std::size_t>>>(header, "shapes");
    if (shapes.size() != count) throw CorruptPayload("shapes must have count entries");
    for (std::size_t i = 0; i < count; ++i) {
      if (shapes[i] != std::vector<std::size_t>{layers, dim}) {
        throw ShapeMismatch("instance " + ids[i] + " does not have shape " +
                            std::to_string(layers) + "x" + std::to_string(dim));
      }
    }
  }

  const std::string_view payload = bytes.substr(newline + 1);
  const std::size_t per_instance = layers * dim;
  if (payload.size() != count * per_instance * 4) {
    throw CorruptPayload("payload has " + std::to_string(payload.size()) +
                         " bytes, expected " +
                         std::to_string(count * per_instance * 4));
  }
  std::vector<TrajectoryTensor> out(count);
  const char* p = payload.data();
  for (std::size_t n = 0; n < count; ++n) {
    TrajectoryTensor& t = out[n];
    t.instance_id = ids[n];
    t.context_snippet = snippets[n];
    t.exemplar_offset = offsets[n];
    if (t.context_snippet.empty()) throw CorruptPayload("empty snippet for " + ids[n]);
    t.values.resize(static_cast<Eigen::Index>(layers), static_cast<Eigen::Index>(dim));
    for (std::size_t l = 0; l < layers; ++l) {
      for (std::size_t d = 0; d < dim; ++d, p += 4) {
        const float v = read_le_float(p);
        if (!std::isfinite(v)) {
          throw CorruptPayload("non-finite value in instance " + ids[n]);
        }
        t.values(static_cast<Eigen::Index>(l), static_cast<Eigen::Index>(d)) = v;
      }
    }
  }
  return out;
}

std::vector<TrajectoryTensor> load_trajectories(const std::filesystem::path& path) {
  return parse_trajectories(read_file(path));
}

std::string serialize_trajectories(const std::vector<TrajectoryTensor>& tensors) {
  if (!tensors.empty()) check_same_shape(tensors);
  nlohmann::ordered_json header;
  header["count"] = tensors.size();
  header["layers"] = tensors.empty() ? 1 : tensors.front().layers();
  header["dim"] = tensors.empty() ? 1 : tensors.front().dim();
  std::vector<std::string> ids;
  std::vector<std::string> snippets;
  std::vector<std::size_t> offsets;
  for (const auto& t : tensors) {
    ids.push_back(t.instance_id);
    snippets.push_back(t.context_snippet);
    offsets.push_back(t.exemplar_offset);
  }
  header["ids"] = ids;
  header["snippets"] = snippets;
  header["exemplar_offsets"] = offsets;
  std::string out = header.dump() + "\n";
  for (const auto& t : tensors) {
    for (Eigen::Index l = 0; l < t.values.rows(); ++l) {
      for (Eigen::Index d = 0; d < t.values.cols(); ++d) {
        append_le_float(out, t.values(l, d));
      }
    }
  }
  return out;
}

Eigen::VectorXd flatten(const TrajectoryTensor& t) {
  Eigen::VectorXd v(t.values.size());
  Eigen::Index k = 0;
  for (Eigen::Index l = 0; l < t.values.rows(); ++l) {
    for (Eigen::Index d = 0; d < t.values.cols(); ++d) v(k++) = t.values(l, d);
  }
  return v;
}

Eigen::MatrixXf unflatten(const Eigen::VectorXd& v, std::size_t layers,
                          std::size_t dim) {
  if (static_cast<std::size_t>(v.size()) != layers * dim) {
    throw ShapeMismatch("vector length does not equal layers*dim");
  }
  Eigen::MatrixXf m(static_cast<Eigen::Index>(layers), static_cast<Eigen::Index>(dim));
  Eigen::Index k = 0;
  for (Eigen::Index l = 0; l < m.rows(); ++l) {
    for (Eigen::Index d = 0; d < m.cols(); ++d) m(l, d) = static_cast<float>(v(k++));
  }
  return m;
}

Eigen::MatrixXd stack_flattened(const std::vector<TrajectoryTensor>& tensors) {
  if (tensors.empty()) return {};
  check_same_shape(tensors);
  Eigen::MatrixXd out(static_cast<Eigen::Index>(tensors.size()),
                      tensors.front().values.size());
  for (std::size_t i = 0; i < tensors.size(); ++i) {
    out.row(static_cast<Eigen::Index>(i)) = flatten(tensors[i]).transpose();
  }
  return out;
}

Eigen::MatrixXd layer_matrix(const std::vector<TrajectoryTensor>& tensors,
                             std::size_t layer) {
  if (tensors.empty()) return {};
  check_same_shape(tensors);
  if (layer >= tensors.front().layers()) throw std::out_of_range("layer index");
  Eigen::MatrixXd out(static_cast<Eigen::Index>(tensors.size()),
                      static_cast<Eigen::Index>(tensors.front().dim()));
  for (std::size_t i = 0; i < tensors.size(); ++i) {
    out.row(static_cast<Eigen::Index>(i)) =
        tensors[i].values.row(static_cast<Eigen::Index>(layer)).cast<double>();
  }
  return out;
}

double PcaResult::explained_fraction() const {
  return total_variance > 0 ? explained_variance.sum() / total_variance : 0.0;
}

Eigen::MatrixXd PcaResult::reconstruct() const {
  return (scores * components).rowwise() + mean;
}

PcaResult pca_reduce(const Eigen::MatrixXd& data, std::size_t k) {
  const Eigen::Index n = data.rows();
  const Eigen::Index m = data.cols();
  const auto kk = static_cast<Eigen::Index>(k);
  if (n < 2) throw std::invalid_argument("PCA needs at least 2 rows");
  if (kk < 1 || kk > std::min(n - 1, m)) {
    throw std::invalid_argument("k must be in [1, min(N-1, M)]");
  }
  PcaResult r;
  r.mean = data.colwise().mean();
  const Eigen::MatrixXd centered = data.rowwise() - r.mean;
  const double denom = static_cast<double>(n - 1);
  r.total_variance = centered.squaredNorm() / denom;

  Eigen::VectorXd values(kk);
  Eigen::MatrixXd vectors(m, kk);
  if (m <= n) {
    const Eigen::MatrixXd cov = (centered.transpose() * centered) / denom;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
    if (solver.info() != Eigen::Success) throw Error("eigen-decomposition failed");
    for (Eigen::Index i = 0; i < kk; ++i) {
      values(i) = solver.eigenvalues()(m - 1 - i);
      vectors.col(i) = solver.eigenvectors().col(m - 1 - i);
    }
  } else {
    const Eigen::MatrixXd gram = (centered * centered.transpose()) / denom;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(gram);
    if (solver.info() != Eigen::Success) throw Error("eigen-decomposition failed");
    for (Eigen::Index i = 0; i < kk; ++i) {
      values(i) = solver.eigenvalues()(n - 1 - i);
      vectors.col(i) = centered.transpose() * solver.eigenvectors().col(n - 1 - i);
    }
  }

  const double top = std::max(values(0), 0.0);
  const double tol = top * 1e-10;
  for (Eigen::Index i = 0; i < kk; ++i) {
    if (!(values(i) > tol)) values(i) = 0;
  }
  if (m > n) {
    // Directions with positive variance come first; complete the rest from
    // the standard basis.
    Eigen::Index filled = 0;
    for (; filled < kk && values(filled) > 0; ++filled) {
      orthonormalize_against(vectors, filled);
    }
    Eigen::Index basis = 0;
    for (Eigen::Index i = filled; i < kk; ++i) {
      do {
        if (basis >= m) throw Error("could not complete an orthonormal basis");
        vectors.col(i) = Eigen::VectorXd::Unit(m, basis++);
      } while (!orthonormalize_against(vectors, i));
    }
  }
  for (Eigen::Index i = 0; i < kk; ++i) fix_sign(vectors.col(i));

  r.components = vectors.transpose();
  r.scores = centered * vectors;
  r.explained_variance = values;
  r.positive_components =
      static_cast<std::size_t>((values.array() > 0).count());
  r.rank_deficient = r.positive_components < k;
  return r;
}

std::vector<PcaResult> per_layer_pca(const std::vector<TrajectoryTensor>& tensors,
                                     std::size_t k) {
  if (tensors.empty()) throw std::invalid_argument("no trajectories");
  check_same_shape(tensors);
  std::vector<PcaResult> out;
  for (std::size_t l = 0; l < tensors.front().layers(); ++l) {
    out.push_back(pca_reduce(layer_matrix(tensors, l), k));
  }
  return out;
}

Eigen::MatrixXd project_pca2(const Eigen::MatrixXd& scores) {
  if (scores.cols() < 2) {
    throw DimensionTooSmall("pca2 projection needs at least 2 score columns");
  }
  return pca_reduce(scores, 2).scores;
}

Eigen::MatrixXd load_external_points(const std::filesystem::path& path,
                                     std::size_t expected_rows) {
  std::istringstream in(read_file(path));
  std::vector<std::pair<double, double>> rows;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    for (std::string f; std::getline(ss, f, ',');) fields.push_back(f);
    if (fields.size() < 2) throw CorruptPayload("line " + std::to_string(number) + ": need x,y");
    try {
      std::size_t used_x = 0;
      std::size_t used_y = 0;
      const std::string& fx = fields[fields.size() - 2];
      const std::string& fy = fields[fields.size() - 1];
      const double x = std::stod(fx, &used_x);
      const double y = std::stod(fy, &used_y);
      if (used_x != fx.size() || used_y != fy.size()) throw std::invalid_argument("junk");
      rows.emplace_back(x, y);
    } catch (const std::exception&) {
      if (number == 1) continue;  // header
      throw CorruptPayload("line " + std::to_string(number) + ": bad coordinate");
    }
  }
  if (expected_rows != 0 && rows.size() != expected_rows) {
    throw ShapeMismatch("external projection has " + std::to_string(rows.size()) +
                        " points, expected " + std::to_string(expected_rows));
  }
  Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), 2);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out(static_cast<Eigen::Index>(i), 0) = rows[i].first;
    out(static_cast<Eigen::Index>(i), 1) = rows[i].second;
  }
  return out;
}

int ClusterMap::cluster_count() const {
  int best = -1;
  for (int l : labels) best = std::max(best, l);
  return best + 1;
}

std::vector<std::size_t> ClusterMap::members(int label) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] == label) out.push_back(i);
  }
  return out;
}

ClusterMap cluster(const Eigen::MatrixXd& points, double epsilon,
                   std::size_t min_points) {
  if (points.cols() != 2) throw std::invalid_argument("points must be N x 2");
  if (!(epsilon > 0) || !std::isfinite(epsilon)) {
    throw std::invalid_argument("epsilon must be positive");
  }
  if (min_points < 1) throw std::invalid_argument("min_points must be >= 1");
  const std::size_t n = static_cast<std::size_t>(points.rows());
  const double eps2 = epsilon * epsilon;

  using Cell = std::pair<std::int64_t, std::int64_t>;
  std::unordered_map<Cell, std::vector<std::size_t>, CellHash> grid;
  std::vector<Cell> cell(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    cell[i] = {cell_of(points(r, 0), epsilon), cell_of(points(r, 1), epsilon)};
    grid[cell[i]].push_back(i);
  }
  auto for_neighbors = [&](std::size_t i, auto&& fn) {
    const auto r = static_cast<Eigen::Index>(i);
    for (std::int64_t dx = -1; dx <= 1; ++dx) {
      for (std::int64_t dy = -1; dy <= 1; ++dy) {
        const auto it = grid.find({cell[i].first + dx, cell[i].second + dy});
        if (it == grid.end()) continue;
        for (std::size_t j : it->second) {
          const double d2 = (points.row(static_cast<Eigen::Index>(j)) - points.row(r))
                                .squaredNorm();
          if (d2 <= eps2) fn(j, d2);
        }
      }
    }
  };

  std::vector<bool> core(n, false);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t count = 0;
    for_neighbors(i, [&count](std::size_t, double) { ++count; });
    core[i] = count >= min_points;
  }

  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&parent](std::size_t x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  };
  for (std::size_t i = 0; i < n; ++i) {
    if (!core[i]) continue;
    for_neighbors(i, [&](std::size_t j, double) {
      if (j > i && core[j]) {
        const std::size_t a = find(i);
        const std::size_t b = find(j);
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
      }
    });
  }

  ClusterMap map;
  map.points = points;
  map.epsilon = epsilon;
  map.min_points = min_points;
  map.labels.assign(n, -1);
  std::unordered_map<std::size_t, int> label_of_root;
  for (std::size_t i = 0; i < n; ++i) {
    if (!core[i]) continue;
    const auto [it, inserted] =
        label_of_root.emplace(find(i), static_cast<int>(label_of_root.size()));
    map.labels[i] = it->second;
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (core[i]) continue;
    double best = std::numeric_limits<double>::infinity();
    std::size_t nearest = n;
    for_neighbors(i, [&](std::size_t j, double d2) {
      if (core[j] && (d2 < best || (d2 == best && j < nearest))) {
        best = d2;
        nearest = j;
      }
    });
    if (nearest < n) map.labels[i] = map.labels[nearest];
  }
  return map;
}

double default_epsilon(const Eigen::MatrixXd& points, std::uint64_t seed,
                       std::size_t max_pairs) {
  const std::size_t n = static_cast<std::size_t>(points.rows());
  if (n < 2) throw std::invalid_argument("need at least 2 points");
  const std::size_t total = n * (n - 1) / 2;
  std::vector<double> d;
  auto dist = [&points](std::size_t i, std::size_t j) {
    return (points.row(static_cast<Eigen::Index>(i)) -
            points.row(static_cast<Eigen::Index>(j)))
        .norm();
  };
  if (total <= max_pairs) {
    d.reserve(total);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) d.push_back(dist(i, j));
    }
  } else {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    d.reserve(max_pairs);
    while (d.size() < max_pairs) {
      const std::size_t i = pick(rng);
      const std::size_t j = pick(rng);
      if (i != j) d.push_back(dist(i, j));
    }
  }
  const std::size_t at = static_cast<std::size_t>(0.1 * static_cast<double>(d.size() - 1));
  std::nth_element(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(at), d.end());
  double eps = d[at];
  if (eps > 0) return eps;
  // Many coincident points: fall back to the smallest positive distance.
  double smallest = std::numeric_limits<double>::infinity();
  for (double x : d) {
    if (x > 0) smallest = std::min(smallest, x);
  }
  return std::isfinite(smallest) ? smallest : 1.0;
}

std::string trim_snippet(const std::string& snippet, std::size_t exemplar_offset,
                         std::size_t window) {
  std::vector<std::string> tokens;
  std::istringstream in(snippet);
  for (std::string t; in >> t;) tokens.push_back(t);
  if (tokens.empty()) return {};
  if (exemplar_offset >= tokens.size()) {
    throw std::invalid_argument("exemplar offset beyond the snippet");
  }
  const std::size_t begin = exemplar_offset >= window ? exemplar_offset - window : 0;
  const std::size_t end = std::min(tokens.size(), exemplar_offset + window + 1);
  std::string out;
  for (std::size_t i = begin; i < end; ++i) {
    if (i > begin) out.push_back(' ');
    out += tokens[i];
  }
  return out;
}

std::vector<Sample> sample_cluster(const ClusterMap& map,
                                   const std::vector<TrajectoryTensor>& tensors,
                                   int cluster_id, std::size_t n,
                                   std::size_t display_window, std::uint64_t seed) {
  if (tensors.size() != map.labels.size()) {
    throw std::invalid_argument("tensors and cluster labels differ in length");
  }
  std::vector<std::size_t> members = map.members(cluster_id);
  if (members.empty()) throw UnknownCluster(cluster_id);
  if (n < members.size()) {
    std::mt19937_64 rng(seed);
    for (std::size_t i = 0; i < n; ++i) {
      std::uniform_int_distribution<std::size_t> pick(i, members.size() - 1);
      std::swap(members[i], members[pick(rng)]);
    }
    members.resize(n);
    std::sort(members.begin(), members.end());
  }
  std::vector<Sample> out;
  for (std::size_t i : members) {
    const auto& t = tensors[i];
    out.push_back({i, t.instance_id,
                   trim_snippet(t.context_snippet, t.exemplar_offset, display_window)});
  }
  return out;
}

}  // namespace toklab::trajectory
