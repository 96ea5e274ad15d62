#include "rhtail/space.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>

namespace rhtail {

Space Space::periodic_grid(int dim, int cells_per_side, double period) {
  if (dim != 1 && dim != 2) throw std::invalid_argument("grid dimension must be 1 or 2");
  if (cells_per_side < 2) throw std::invalid_argument("grid needs at least 2 cells per side");
  if (period <= 0.0) throw std::invalid_argument("period must be positive");
  Space s;
  s.kind_ = SpaceKind::PeriodicGrid;
  s.dim_ = dim;
  s.cells_ = cells_per_side;
  s.period_ = period;
  s.spacing_ = period / cells_per_side;
  s.cell_measure_ = std::pow(s.spacing_, dim);
  s.size_ = 1;
  for (int d = 0; d < dim; ++d) s.size_ *= static_cast<std::size_t>(cells_per_side);
  s.total_measure_ = std::pow(period, dim);
  double half = static_cast<double>(cells_per_side / 2) * s.spacing_;
  s.diameter_ = half * std::sqrt(static_cast<double>(dim));
  s.quasi_k_ = 1.0;
  s.quasi_k_method_ = "grid";
  return s;
}

Space Space::point_cloud(std::vector<std::vector<double>> points, std::vector<double> weights,
                         const QuasiDist& dist, std::optional<double> declared_k) {
  const std::size_t n = points.size();
  if (n == 0) throw std::invalid_argument("point cloud must be nonempty");
  if (weights.size() != n) throw std::invalid_argument("weights must match point count");
  for (double w : weights)
    if (!(w > 0.0)) throw std::invalid_argument("all point weights must be positive");

  Space s;
  s.kind_ = SpaceKind::PointCloud;
  s.size_ = n;
  s.points_ = std::move(points);
  s.weights_ = std::move(weights);
  s.total_measure_ = std::accumulate(s.weights_.begin(), s.weights_.end(), 0.0);

  s.dist_matrix_.assign(n * n, 0.0);
  double diam = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      double dij = dist(s.points_[i], s.points_[j]);
      double dji = dist(s.points_[j], s.points_[i]);
      if (dij != dji) throw std::invalid_argument("quasi-distance must be exactly symmetric");
      if (!(dij > 0.0)) throw std::invalid_argument("quasi-distance must vanish only on the diagonal");
      s.dist_matrix_[i * n + j] = dij;
      s.dist_matrix_[j * n + i] = dij;
      diam = std::max(diam, dij);
    }
  }
  s.diameter_ = diam;

  if (declared_k) {
    if (*declared_k < 1.0) throw std::invalid_argument("declared quasi constant must be >= 1");
    s.quasi_k_ = *declared_k;
    s.quasi_k_method_ = "declared";
  } else if (n <= 500) {
    double k = 1.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        if (j == i) continue;
        for (std::size_t l = 0; l < n; ++l) {
          if (l == i || l == j) continue;
          double denom = s.dist_matrix_[i * n + j] + s.dist_matrix_[j * n + l];
          if (denom > 0.0) k = std::max(k, s.dist_matrix_[i * n + l] / denom);
        }
      }
    s.quasi_k_ = k;
    s.quasi_k_method_ = "exhaustive";
  } else {
    Rng rng(0x51a9u);
    double k = 1.0;
    for (int t = 0; t < 100000; ++t) {
      std::size_t i = rng.next_below(n), j = rng.next_below(n), l = rng.next_below(n);
      if (i == j || j == l || i == l) continue;
      double denom = s.dist_matrix_[i * n + j] + s.dist_matrix_[j * n + l];
      if (denom > 0.0) k = std::max(k, s.dist_matrix_[i * n + l] / denom);
    }
    s.quasi_k_ = k;
    s.quasi_k_method_ = "sampled";
  }
  return s;
}

double Space::distance(std::size_t i, std::size_t j) const {
  if (kind_ == SpaceKind::PointCloud) return dist_matrix_[i * size_ + j];
  if (dim_ == 1) {
    int d = std::abs(static_cast<int>(i) - static_cast<int>(j));
    d = std::min(d, cells_ - d);
    return d * spacing_;
  }
  int ix1 = static_cast<int>(i) % cells_, iy1 = static_cast<int>(i) / cells_;
  int ix2 = static_cast<int>(j) % cells_, iy2 = static_cast<int>(j) / cells_;
  int dx = std::abs(ix1 - ix2);
  dx = std::min(dx, cells_ - dx);
  int dy = std::abs(iy1 - iy2);
  dy = std::min(dy, cells_ - dy);
  return std::sqrt(static_cast<double>(dx) * dx + static_cast<double>(dy) * dy) * spacing_;
}

std::size_t Space::grid_index(int ix, int iy) const {
  auto wrap = [this](int v) {
    v %= cells_;
    if (v < 0) v += cells_;
    return v;
  };
  if (dim_ == 1) return static_cast<std::size_t>(wrap(ix));
  return static_cast<std::size_t>(wrap(iy)) * cells_ + wrap(ix);
}

std::array<int, 2> Space::grid_coords_int(std::size_t i) const {
  if (dim_ == 1) return {static_cast<int>(i), 0};
  return {static_cast<int>(i) % cells_, static_cast<int>(i) / cells_};
}

std::vector<double> Space::coords(std::size_t i) const {
  if (kind_ == SpaceKind::PointCloud) return points_[i];
  auto c = grid_coords_int(i);
  if (dim_ == 1) return {c[0] * spacing_};
  return {c[0] * spacing_, c[1] * spacing_};
}

bool ball_saturated(const Space& s, const Ball& b) { return b.radius >= s.diameter(); }

bool ball_contains(const Space& s, const Ball& b, std::size_t i) {
  if (ball_saturated(s, b)) return true;
  return s.distance(b.center, i) < b.radius;
}

bool balls_equal(const Space& s, const Ball& a, const Ball& b) {
  if (ball_saturated(s, a) && ball_saturated(s, b)) return true;
  return a.center == b.center && a.radius == b.radius;
}

namespace {

// 1-d grids: members form a cyclic index interval. Returns the half width in
// cells, chosen so that k*h < r <= (k+1)*h with the same float expressions as
// Space::distance.
int interval_halfwidth(const Space& s, double r) {
  double h = s.spacing();
  int k = static_cast<int>(std::ceil(r / h)) - 1;
  if (k < 0) k = 0;
  while (k * h >= r) --k;
  while ((k + 1) * h < r) ++k;
  return k;
}

}  // namespace

std::vector<std::size_t> ball_members(const Space& s, const Ball& b) {
  std::vector<std::size_t> out;
  if (ball_saturated(s, b)) {
    out.resize(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) out[i] = i;
    return out;
  }
  if (b.radius <= 0.0) return out;
  if (s.is_grid() && s.dim() == 1) {
    int k = interval_halfwidth(s, b.radius);
    int m = s.cells_per_side();
    if (2 * k + 1 >= m) {
      out.resize(s.size());
      for (std::size_t i = 0; i < s.size(); ++i) out[i] = i;
      return out;
    }
    int c = static_cast<int>(b.center);
    for (int d = -k; d <= k; ++d) out.push_back(s.grid_index(c + d));
    std::sort(out.begin(), out.end());
    return out;
  }
  for (std::size_t i = 0; i < s.size(); ++i)
    if (s.distance(b.center, i) < b.radius) out.push_back(i);
  return out;
}

double ball_measure(const Space& s, const Ball& b) {
  if (ball_saturated(s, b)) return s.total_measure();
  if (b.radius <= 0.0) return 0.0;
  if (s.is_grid()) {
    if (s.dim() == 1) {
      int k = interval_halfwidth(s, b.radius);
      int cnt = std::min(2 * k + 1, s.cells_per_side());
      return cnt * s.measure(0);
    }
    std::size_t cnt = 0;
    for (std::size_t i = 0; i < s.size(); ++i)
      if (s.distance(b.center, i) < b.radius) ++cnt;
    return static_cast<double>(cnt) * s.measure(0);
  }
  double m = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i)
    if (s.distance(b.center, i) < b.radius) m += s.measure(i);
  return m;
}

double ball_integral(const Space& s, const Field& u, const Ball& b) {
  if (ball_saturated(s, b)) return field_integral(s, u);
  if (b.radius <= 0.0) return 0.0;
  if (s.is_grid() && s.dim() == 1) {
    int k = interval_halfwidth(s, b.radius);
    int m = s.cells_per_side();
    if (2 * k + 1 >= m) return field_integral(s, u);
    int c = static_cast<int>(b.center);
    double sum = 0.0;
    for (int d = -k; d <= k; ++d) sum += u[s.grid_index(c + d)];
    return sum * s.measure(0);
  }
  double num = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i)
    if (s.distance(b.center, i) < b.radius) num += u[i] * s.measure(i);
  return num;
}

double ball_average(const Space& s, const Field& u, const Ball& b) {
  double den = ball_measure(s, b);
  if (den <= 0.0) throw EmptyBallError("ball of radius " + std::to_string(b.radius));
  return ball_integral(s, u, b) / den;
}

double field_integral(const Space& s, const Field& u) {
  double num = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) num += u[i] * s.measure(i);
  return num;
}

double field_mean(const Space& s, const Field& u) {
  return field_integral(s, u) / s.total_measure();
}

double field_lp_norm(const Space& s, const Field& u, double p) {
  double acc = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) acc += std::pow(std::abs(u[i]), p) * s.measure(i);
  return std::pow(acc, 1.0 / p);
}

DoublingProfile doubling_profile(const Space& s, const std::vector<Ball>& samples) {
  if (samples.empty()) throw std::invalid_argument("doubling_profile: empty sample list");
  DoublingProfile prof;
  prof.samples_used = samples.size();
  for (const Ball& b : samples) {
    double small = ball_measure(s, b);
    if (small <= 0.0) throw EmptyBallError("doubling sample of radius " + std::to_string(b.radius));
    double big = ball_measure(s, dilate(b, 2.0));
    prof.c_d = std::max(prof.c_d, big / small);
  }
  prof.dimension = std::log2(prof.c_d);
  return prof;
}

std::vector<Ball> default_doubling_samples(const Space& s) {
  std::vector<Ball> out;
  std::size_t stride = std::max<std::size_t>(1, s.size() / 32);
  double rmin = s.is_grid() ? 4.0 * s.spacing() : s.diameter() / 64.0;
  for (std::size_t c = 0; c < s.size(); c += stride)
    for (double r = rmin; 2.0 * r < s.diameter(); r *= 2.0) out.push_back(Ball{c, r});
  if (out.empty()) out.push_back(Ball{0, s.diameter() / 4.0});
  return out;
}

std::vector<std::size_t> vitali_cover(const Space& s, const std::vector<Ball>& balls,
                                      double dilation_factor) {
  if (dilation_factor < 5.0)
    throw std::invalid_argument("vitali_cover: dilation factor must be >= 5");
  std::vector<std::size_t> order(balls.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return balls[a].radius > balls[b].radius;
  });

  std::vector<char> alive(balls.size(), 1);
  std::vector<std::size_t> selected;
  for (std::size_t idx : order) {
    if (!alive[idx]) continue;
    selected.push_back(idx);
    alive[idx] = 0;
    for (std::size_t j = 0; j < balls.size(); ++j) {
      if (!alive[j]) continue;
      double d = s.distance(balls[idx].center, balls[j].center);
      if (d < balls[idx].radius + balls[j].radius) alive[j] = 0;
    }
  }
  std::sort(selected.begin(), selected.end());
  return selected;
}

Prefix1D::Prefix1D(const Space& s, const Field& u) : space_(&s) {
  if (!s.is_grid() || s.dim() != 1) throw std::invalid_argument("Prefix1D needs a 1-d grid");
  int m = s.cells_per_side();
  pref_.assign(m + 1, 0.0);
  for (int i = 0; i < m; ++i) pref_[i + 1] = pref_[i] + u[i];
  total_ = pref_[m] * s.measure(0);
}

double Prefix1D::integral(const Ball& b) const {
  const Space& s = *space_;
  if (ball_saturated(s, b)) return total_;
  if (b.radius <= 0.0) return 0.0;
  int m = s.cells_per_side();
  int k = interval_halfwidth(s, b.radius);
  if (2 * k + 1 >= m) return total_;
  int lo = (static_cast<int>(b.center) - k) % m;
  if (lo < 0) lo += m;
  int hi = lo + 2 * k + 1;
  double sum = hi <= m ? pref_[hi] - pref_[lo] : (pref_[m] - pref_[lo]) + pref_[hi - m];
  return sum * s.measure(0);
}

double Prefix1D::measure(const Ball& b) const {
  const Space& s = *space_;
  if (ball_saturated(s, b)) return s.total_measure();
  if (b.radius <= 0.0) return 0.0;
  int k = interval_halfwidth(s, b.radius);
  return std::min(2 * k + 1, s.cells_per_side()) * s.measure(0);
}

double Prefix1D::average(const Ball& b) const {
  double den = measure(b);
  if (den <= 0.0) throw EmptyBallError("prefix average over radius " + std::to_string(b.radius));
  return integral(b) / den;
}

ChainMetricResult chain_metric(const Space& s, std::size_t max_points) {
  if (s.is_grid()) throw std::invalid_argument("chain_metric expects a point cloud");
  const std::size_t n = s.size();
  if (n > max_points) throw std::invalid_argument("chain_metric: cloud exceeds configured limit");
  double k = s.quasi_constant();
  if (k < 1.0) throw std::invalid_argument("chain_metric: quasi constant K must be >= 1");

  ChainMetricResult res;
  res.quasi_k_used = k;
  res.delta = std::log(2.0) / std::log(2.0 * k);

  std::vector<double> d(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j) d[i * n + j] = std::pow(s.distance(i, j), res.delta);

  for (std::size_t via = 0; via < n; ++via)
    for (std::size_t i = 0; i < n; ++i) {
      double div = d[i * n + via];
      for (std::size_t j = 0; j < n; ++j) {
        double cand = div + d[via * n + j];
        if (cand < d[i * n + j]) d[i * n + j] = cand;
      }
    }

  res.rho_tilde.assign(n * n, 0.0);
  double e = 1.0;
  double inv_delta = 1.0 / res.delta;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      double rt = std::pow(d[i * n + j], inv_delta);
      res.rho_tilde[i * n + j] = rt;
      double rho = s.distance(i, j);
      e = std::max(e, std::max(rho / rt, rt / rho));
    }
  res.e_achieved = e;
  return res;
}

Region region_whole(const Space& s) {
  Region r;
  r.whole = true;
  r.mask.assign(s.size(), 1);
  return r;
}

Region region_box(const Space& s, const std::vector<double>& lo, const std::vector<double>& hi) {
  Region r;
  r.mask.assign(s.size(), 0);
  for (std::size_t i = 0; i < s.size(); ++i) {
    auto c = s.coords(i);
    bool inside = true;
    for (std::size_t d = 0; d < c.size() && d < lo.size(); ++d)
      inside = inside && c[d] >= lo[d] && c[d] < hi[d];
    r.mask[i] = inside ? 1 : 0;
  }
  return r;
}

Region region_ball(const Space& s, const Ball& b) {
  Region r;
  r.mask.assign(s.size(), 0);
  for (std::size_t i = 0; i < s.size(); ++i)
    if (ball_contains(s, b, i)) r.mask[i] = 1;
  return r;
}

bool region_contains_ball(const Space& s, const Region& omega, const Ball& b) {
  if (omega.whole) return true;
  if (ball_saturated(s, b)) {
    for (std::size_t i = 0; i < s.size(); ++i)
      if (!omega.mask[i]) return false;
    return true;
  }
  for (std::size_t i = 0; i < s.size(); ++i)
    if (s.distance(b.center, i) < b.radius && !omega.mask[i]) return false;
  return true;
}

double region_complement_distance(const Space& s, const Region& omega, std::size_t i) {
  if (omega.whole) return std::numeric_limits<double>::infinity();
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < s.size(); ++j)
    if (!omega.mask[j]) best = std::min(best, s.distance(i, j));
  return best;
}

Space load_point_cloud_csv(const std::string& path, const Space::QuasiDist& dist,
                           std::optional<double> declared_k) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::vector<std::vector<double>> pts;
  std::vector<double> ws;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string tok;
    while (std::getline(ss, tok, ',')) row.push_back(std::stod(tok));
    if (row.size() < 2) throw std::runtime_error("cloud CSV rows need coordinates and a weight");
    ws.push_back(row.back());
    row.pop_back();
    pts.push_back(std::move(row));
  }
  return Space::point_cloud(std::move(pts), std::move(ws), dist, declared_k);
}

Field load_field_csv(const std::string& path, const Space& s) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  Field u;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    u.push_back(std::stod(line));
  }
  if (u.size() != s.size()) throw std::runtime_error("field CSV does not match space size");
  return u;
}

void save_field_csv(const std::string& path, const Field& u) {
  std::ofstream out(path);
  out.precision(17);
  for (double v : u) out << v << "\n";
}

double euclidean_dist(const std::vector<double>& a, const std::vector<double>& b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(acc);
}

double squared_euclidean_dist(const std::vector<double>& a, const std::vector<double>& b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += (a[i] - b[i]) * (a[i] - b[i]);
  return acc;
}

}  // namespace rhtail
