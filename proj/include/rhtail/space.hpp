#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "rhtail/common.hpp"

namespace rhtail {

using Field = std::vector<double>;

enum class SpaceKind { PeriodicGrid, PointCloud };

/// Finite measure quasi-metric space: a periodic grid in dimension 1 or 2,
/// or a weighted point cloud with a user quasi-distance. Immutable after
/// construction; all derived quantities (diameter, total measure, quasi
/// triangle constant) are computed up front.
class Space {
 public:
  using QuasiDist = std::function<double(const std::vector<double>&, const std::vector<double>&)>;

  static Space periodic_grid(int dim, int cells_per_side, double period);

  /// A point cloud with explicit quasi-distance. If declared_k is absent the
  /// quasi triangle constant is measured: exhaustively over all triples for
  /// clouds of at most 500 points, by 1e5 random triples otherwise.
  static Space point_cloud(std::vector<std::vector<double>> points,
                           std::vector<double> weights, const QuasiDist& dist,
                           std::optional<double> declared_k = std::nullopt);

  SpaceKind kind() const { return kind_; }
  bool is_grid() const { return kind_ == SpaceKind::PeriodicGrid; }

  std::size_t size() const { return size_; }
  double measure(std::size_t i) const { return is_grid() ? cell_measure_ : weights_[i]; }
  double total_measure() const { return total_measure_; }
  double diameter() const { return diameter_; }

  double distance(std::size_t i, std::size_t j) const;

  /// Quasi triangle constant K >= 1 and how it was obtained
  /// ("grid", "declared", "exhaustive", "sampled").
  double quasi_constant() const { return quasi_k_; }
  const std::string& quasi_method() const { return quasi_k_method_; }

  // Grid-only accessors.
  int dim() const { return dim_; }
  int cells_per_side() const { return cells_; }
  double period() const { return period_; }
  double spacing() const { return spacing_; }

  std::size_t grid_index(int ix, int iy = 0) const;
  std::array<int, 2> grid_coords_int(std::size_t i) const;
  std::vector<double> coords(std::size_t i) const;

  const std::vector<std::vector<double>>& points() const { return points_; }

 private:
  Space() = default;

  SpaceKind kind_ = SpaceKind::PeriodicGrid;
  std::size_t size_ = 0;

  int dim_ = 0;
  int cells_ = 0;
  double period_ = 0.0;
  double spacing_ = 0.0;
  double cell_measure_ = 0.0;

  std::vector<std::vector<double>> points_;
  std::vector<double> weights_;
  std::vector<double> dist_matrix_;  // dense, clouds only

  double quasi_k_ = 1.0;
  std::string quasi_k_method_ = "grid";
  double diameter_ = 0.0;
  double total_measure_ = 0.0;
};

/// Open ball: strict membership d(x, center) < radius. A ball whose radius
/// reaches the diameter of the space saturates to the whole space.
struct Ball {
  std::size_t center = 0;
  double radius = 0.0;
};

inline Ball dilate(const Ball& b, double factor) { return Ball{b.center, b.radius * factor}; }

bool ball_saturated(const Space& s, const Ball& b);
bool ball_contains(const Space& s, const Ball& b, std::size_t i);
bool balls_equal(const Space& s, const Ball& a, const Ball& b);

std::vector<std::size_t> ball_members(const Space& s, const Ball& b);
double ball_measure(const Space& s, const Ball& b);

/// Weighted average of u over the ball; throws EmptyBallError when the ball
/// has no members (radius <= 0).
double ball_average(const Space& s, const Field& u, const Ball& b);

/// Sum of u d(mu) over the ball (unnormalized integral).
double ball_integral(const Space& s, const Field& u, const Ball& b);

double field_mean(const Space& s, const Field& u);
double field_integral(const Space& s, const Field& u);
double field_lp_norm(const Space& s, const Field& u, double p);

struct DoublingProfile {
  double c_d = 1.0;  // max mu(2B)/mu(B) over the sampled balls
  double dimension = 0.0;  // log2(c_d)
  std::size_t samples_used = 0;
};

DoublingProfile doubling_profile(const Space& s, const std::vector<Ball>& samples);

/// Deterministic default samples: centers on a coarse sublattice, dyadic radii.
std::vector<Ball> default_doubling_samples(const Space& s);

/// Greedy Vitali selection: repeatedly keep the largest remaining ball and
/// drop every ball that meets it (d(c_i,c_j) < r_i + r_j). The kept balls are
/// pairwise disjoint and every input ball lies inside dilation_factor times
/// some kept ball (dilation_factor >= 5 on metric spaces; callers supply a
/// larger factor for quasi-metric inputs).
std::vector<std::size_t> vitali_cover(const Space& s, const std::vector<Ball>& balls,
                                      double dilation_factor);

/// O(1) cyclic interval sums for fields on 1-d grids; used by the radius
/// sweeps where per-candidate membership loops would be quadratic.
class Prefix1D {
 public:
  Prefix1D(const Space& s, const Field& u);
  double integral(const Ball& b) const;  // sum of u dmu over the ball
  double measure(const Ball& b) const;
  double average(const Ball& b) const;

 private:
  const Space* space_;
  std::vector<double> pref_;
  double total_;
};

struct ChainMetricResult {
  std::vector<double> rho_tilde;  // dense n x n, row-major
  double delta = 1.0;
  double e_achieved = 1.0;
  double quasi_k_used = 1.0;
};

/// Chain-construction metrization of a point cloud: delta solves
/// (2K)^delta = 2, d = all-pairs shortest path with edge weights rho^delta,
/// rho_tilde = d^(1/delta). rho_tilde^delta is a genuine metric and
/// rho_tilde <= rho pointwise via the one-hop chain.
ChainMetricResult chain_metric(const Space& s, std::size_t max_points = 512);

/// Region: a subset of the space given by a membership mask.
struct Region {
  std::vector<std::uint8_t> mask;
  bool whole = false;

  bool contains(std::size_t i) const { return whole || mask[i] != 0; }
};

Region region_whole(const Space& s);
Region region_box(const Space& s, const std::vector<double>& lo, const std::vector<double>& hi);
Region region_ball(const Space& s, const Ball& b);

bool region_contains_ball(const Space& s, const Region& omega, const Ball& b);
/// Distance from a point to the complement of omega; +infinity when omega is
/// the whole space.
double region_complement_distance(const Space& s, const Region& omega, std::size_t i);

// CSV loading: point clouds as rows "x1,...,xd,weight"; fields as one value
// per line aligned with the space's point order.
Space load_point_cloud_csv(const std::string& path, const Space::QuasiDist& dist,
                           std::optional<double> declared_k = std::nullopt);
Field load_field_csv(const std::string& path, const Space& s);
void save_field_csv(const std::string& path, const Field& u);

// Built-in quasi-distances.
double euclidean_dist(const std::vector<double>& a, const std::vector<double>& b);
double squared_euclidean_dist(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace rhtail
