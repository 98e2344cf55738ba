#include "chaining/metric.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "chaining/errors.hpp"

namespace chaining {

Measure Measure::uniform(int n) {
  Measure m;
  m.weights.assign(static_cast<std::size_t>(n), 1.0 / n);
  return m;
}

void Measure::validate() const {
  double sum = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0)) throw ValidationError("measure has a negative weight");
    sum += w;
  }
  if (std::fabs(sum - 1.0) > 1e-9)
    throw ValidationError("measure weights sum to " + std::to_string(sum) + ", expected 1");
}

std::vector<int> Measure::support() const {
  std::vector<int> s;
  for (int i = 0; i < n(); ++i)
    if (weights[static_cast<std::size_t>(i)] > 0.0) s.push_back(i);
  return s;
}

Measure load_measure(std::istream& in, int n) {
  Measure m;
  m.weights.reserve(static_cast<std::size_t>(n));
  double w;
  while (static_cast<int>(m.weights.size()) < n && in >> w) m.weights.push_back(w);
  if (static_cast<int>(m.weights.size()) != n)
    throw FormatError("measure file has fewer than " + std::to_string(n) + " entries");
  m.validate();
  return m;
}

Measure load_measure_file(const std::string& path, int n) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open measure file '" + path + "'");
  return load_measure(in, n);
}

MetricSpace MetricSpace::from_matrix(std::vector<double> dist, int n, const LoadOptions& opts) {
  if (n <= 0) throw FormatError("metric space needs at least one point");
  if (dist.size() != static_cast<std::size_t>(n) * n)
    throw FormatError("distance matrix size mismatch");
  for (int i = 0; i < n; ++i) {
    if (dist[static_cast<std::size_t>(i) * n + i] != 0.0)
      throw FormatError("distance matrix has a nonzero diagonal entry at " + std::to_string(i));
    for (int j = 0; j < n; ++j) {
      double d = dist[static_cast<std::size_t>(i) * n + j];
      if (!(d >= 0.0)) throw FormatError("negative or non-finite distance");
      if (d != dist[static_cast<std::size_t>(j) * n + i])
        throw FormatError("distance matrix is not symmetric at (" + std::to_string(i) + "," +
                          std::to_string(j) + ")");
      if (i != j && d == 0.0 && !opts.allow_pseudo)
        throw ValidationError("duplicate points (distance 0) at (" + std::to_string(i) + "," +
                              std::to_string(j) + "); pass the pseudo-metric flag to allow");
    }
  }
  if (opts.check_triangle) {
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        for (int k = 0; k < n; ++k) {
          double dij = dist[static_cast<std::size_t>(i) * n + j];
          double dik = dist[static_cast<std::size_t>(i) * n + k];
          double dkj = dist[static_cast<std::size_t>(k) * n + j];
          if (dij > dik + dkj + 1e-12 * std::max({dij, dik, dkj}))
            throw ValidationError("triangle inequality violated: d(" + std::to_string(i) + "," +
                                  std::to_string(j) + ") > d(" + std::to_string(i) + "," +
                                  std::to_string(k) + ") + d(" + std::to_string(k) + "," +
                                  std::to_string(j) + ")");
        }
  }
  MetricSpace X;
  X.n_ = n;
  X.dist_ = std::move(dist);
  X.preprocess();
  return X;
}

MetricSpace MetricSpace::from_points(const std::vector<std::vector<double>>& coords,
                                     const LoadOptions& opts) {
  int n = static_cast<int>(coords.size());
  if (n == 0) throw FormatError("point cloud is empty");
  std::size_t d = coords[0].size();
  std::vector<double> dist(static_cast<std::size_t>(n) * n, 0.0);
  for (int i = 0; i < n; ++i) {
    if (coords[static_cast<std::size_t>(i)].size() != d)
      throw FormatError("point cloud rows have inconsistent dimension");
    for (int j = i + 1; j < n; ++j) {
      double acc = 0.0;
      for (std::size_t k = 0; k < d; ++k) {
        double diff = coords[static_cast<std::size_t>(i)][k] - coords[static_cast<std::size_t>(j)][k];
        acc += diff * diff;
      }
      double dd = std::sqrt(acc);
      dist[static_cast<std::size_t>(i) * n + j] = dd;
      dist[static_cast<std::size_t>(j) * n + i] = dd;
    }
  }
  LoadOptions o = opts;
  o.check_triangle = false;  // Euclidean distances satisfy it by construction
  return from_matrix(std::move(dist), n, o);
}

MetricSpace MetricSpace::load(std::istream& in, const LoadOptions& opts) {
  std::string first;
  if (!(in >> first)) throw FormatError("empty metric input");
  if (first == "points") {
    int d;
    if (!(in >> d) || d <= 0) throw FormatError("bad point-cloud dimension");
    std::vector<std::vector<double>> coords;
    std::vector<double> row(static_cast<std::size_t>(d));
    for (;;) {
      bool got = true;
      for (int k = 0; k < d; ++k)
        if (!(in >> row[static_cast<std::size_t>(k)])) {
          got = false;
          if (k != 0) throw FormatError("point-cloud row truncated");
          break;
        }
      if (!got) break;
      coords.push_back(row);
    }
    return from_points(coords, opts);
  }
  int n;
  try {
    std::size_t pos = 0;
    n = std::stoi(first, &pos);
    if (pos != first.size()) throw std::invalid_argument("");
  } catch (const std::exception&) {
    throw FormatError("expected point count or 'points d' header, got '" + first + "'");
  }
  if (n <= 0) throw FormatError("metric space needs at least one point");
  std::vector<double> dist(static_cast<std::size_t>(n) * n);
  for (std::size_t i = 0; i < dist.size(); ++i)
    if (!(in >> dist[i])) throw FormatError("distance matrix truncated");
  return from_matrix(std::move(dist), n, opts);
}

MetricSpace MetricSpace::load_file(const std::string& path, const LoadOptions& opts) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open metric file '" + path + "'");
  return load(in, opts);
}

void MetricSpace::preprocess() {
  nbr_idx_.assign(static_cast<std::size_t>(n_), {});
  nbr_dist_.assign(static_cast<std::size_t>(n_), {});
  brk_start_.assign(static_cast<std::size_t>(n_), {});
  diameter_ = 0.0;
  for (int x = 0; x < n_; ++x) {
    auto& idx = nbr_idx_[static_cast<std::size_t>(x)];
    idx.resize(static_cast<std::size_t>(n_));
    std::iota(idx.begin(), idx.end(), 0);
    const double* row = dist_.data() + static_cast<std::size_t>(x) * n_;
    std::sort(idx.begin(), idx.end(), [row](int a, int b) {
      if (row[a] != row[b]) return row[a] < row[b];
      return a < b;
    });
    auto& dst = nbr_dist_[static_cast<std::size_t>(x)];
    dst.resize(static_cast<std::size_t>(n_));
    for (int k = 0; k < n_; ++k) dst[static_cast<std::size_t>(k)] = row[idx[static_cast<std::size_t>(k)]];
    diameter_ = std::max(diameter_, dst.back());
    // Positions where the sorted distance strictly increases; the leading
    // group (distance 0) is the radius-0 ball.
    auto& brk = brk_start_[static_cast<std::size_t>(x)];
    for (int k = 1; k < n_; ++k)
      if (dst[static_cast<std::size_t>(k)] > dst[static_cast<std::size_t>(k - 1)]) brk.push_back(k);
  }
}

std::vector<double> MetricSpace::breakpoints(int x) const {
  std::vector<double> out;
  for (int k : brk_start_[static_cast<std::size_t>(x)])
    out.push_back(nbr_dist_[static_cast<std::size_t>(x)][static_cast<std::size_t>(k)]);
  return out;
}

MetricSpace MetricSpace::deduplicated(std::vector<int>* representative) const {
  std::vector<int> rep(static_cast<std::size_t>(n_), -1);
  std::vector<int> keep;
  for (int i = 0; i < n_; ++i) {
    if (rep[static_cast<std::size_t>(i)] >= 0) continue;
    rep[static_cast<std::size_t>(i)] = static_cast<int>(keep.size());
    for (int j = i + 1; j < n_; ++j)
      if (dist(i, j) == 0.0) rep[static_cast<std::size_t>(j)] = static_cast<int>(keep.size());
    keep.push_back(i);
  }
  int m = static_cast<int>(keep.size());
  std::vector<double> sub(static_cast<std::size_t>(m) * m);
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b)
      sub[static_cast<std::size_t>(a) * m + b] = dist(keep[static_cast<std::size_t>(a)], keep[static_cast<std::size_t>(b)]);
  if (representative) *representative = rep;
  LoadOptions opts;
  opts.check_triangle = false;
  return from_matrix(std::move(sub), m, opts);
}

double ball_mass(const MetricSpace& X, const Measure& mu, int x, double r) {
  if (x < 0 || x >= X.n()) throw DomainError("ball_mass: point index out of range");
  double acc = 0.0;
  for (int y = 0; y < X.n(); ++y)
    if (X.dist(x, y) <= r) acc += mu.weights[static_cast<std::size_t>(y)];
  return acc;
}

double BallMassProfile::mass_at(double r) const {
  if (r < radii.front()) return 0.0;
  auto it = std::upper_bound(radii.begin(), radii.end(), r);
  return mass[static_cast<std::size_t>(it - radii.begin()) - 1];
}

BallMassProfile ball_mass_profile(const MetricSpace& X, const Measure& mu, int x) {
  const auto& idx = X.sorted_neighbors(x);
  const auto& brk = X.breakpoint_index(x);
  BallMassProfile p;
  p.radii.reserve(brk.size() + 1);
  p.mass.reserve(brk.size() + 1);
  p.radii.push_back(0.0);
  double acc = 0.0;
  std::size_t pos = 0;
  for (std::size_t b = 0; b <= brk.size(); ++b) {
    std::size_t end = b < brk.size() ? static_cast<std::size_t>(brk[b]) : idx.size();
    for (; pos < end; ++pos) acc += mu.weights[static_cast<std::size_t>(idx[pos])];
    p.mass.push_back(acc);
    if (b < brk.size())
      p.radii.push_back(X.sorted_distances(x)[static_cast<std::size_t>(brk[b])]);
  }
  return p;
}

}  // namespace chaining
