#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace chaining {

// A probability measure over the points of a metric space.
struct Measure {
  std::vector<double> weights;

  static Measure uniform(int n);
  // Throws ValidationError unless weights are nonnegative and sum to 1
  // within 1e-9.
  void validate() const;
  std::vector<int> support() const;
  int n() const { return static_cast<int>(weights.size()); }
};

Measure load_measure(std::istream& in, int n);
Measure load_measure_file(const std::string& path, int n);

struct LoadOptions {
  bool check_triangle = true;
  bool allow_pseudo = false;  // permit zero distance between distinct points
};

// A finite metric space given by its full distance matrix, with the
// preprocessing needed for ball queries: per-point neighbor lists sorted by
// distance and the distinct positive radii ("breakpoints") at which the
// closed ball around each point changes.
//
// Immutable after construction; all queries are pure and safe to run
// concurrently.
class MetricSpace {
 public:
  static MetricSpace from_matrix(std::vector<double> dist, int n,
                                 const LoadOptions& opts = {});
  static MetricSpace from_points(const std::vector<std::vector<double>>& coords,
                                 const LoadOptions& opts = {});
  // Text formats: a distance matrix ("n" then n rows of n entries) or a
  // point cloud ("points d" then one row of d coordinates per point).
  static MetricSpace load(std::istream& in, const LoadOptions& opts = {});
  static MetricSpace load_file(const std::string& path, const LoadOptions& opts = {});

  int n() const { return n_; }
  double dist(int i, int j) const { return dist_[static_cast<std::size_t>(i) * n_ + j]; }
  double diameter() const { return diameter_; }
  const std::vector<double>& matrix() const { return dist_; }

  const std::vector<int>& sorted_neighbors(int x) const { return nbr_idx_[x]; }
  const std::vector<double>& sorted_distances(int x) const { return nbr_dist_[x]; }
  // Strictly increasing positive radii at which B(x, r) gains points.
  const std::vector<int>& breakpoint_index(int x) const { return brk_start_[x]; }
  std::vector<double> breakpoints(int x) const;

  // Merges points at pairwise distance zero, keeping the smallest index of
  // each class. Needed before partitioning pseudo-metrics.
  MetricSpace deduplicated(std::vector<int>* representative = nullptr) const;

 private:
  MetricSpace() = default;
  void preprocess();

  int n_ = 0;
  std::vector<double> dist_;  // row-major n x n
  double diameter_ = 0.0;
  std::vector<std::vector<int>> nbr_idx_;
  std::vector<std::vector<double>> nbr_dist_;
  // brk_start_[x][k] = first position in the sorted neighbor list whose
  // distance is strictly greater than breakpoint k-1 (k=0: positions with
  // distance 0). Parallel to breakpoints(x) with a leading radius-0 entry.
  std::vector<std::vector<int>> brk_start_;
};

// mu(B(x, r)) by direct O(n) summation over the closed ball. This is the
// reference implementation that the profile-based paths are tested against.
double ball_mass(const MetricSpace& X, const Measure& mu, int x, double r);

// Piecewise-constant r -> mu(B(x, r)): radii[0] = 0 and mass[k] is the ball
// mass for r in [radii[k], radii[k+1]). The last mass is 1 for a probability
// measure.
struct BallMassProfile {
  std::vector<double> radii;
  std::vector<double> mass;

  double mass_at(double r) const;
};

BallMassProfile ball_mass_profile(const MetricSpace& X, const Measure& mu, int x);

}  // namespace chaining
