#include "rhtail/field.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "json.hpp"

namespace rhtail {

Field make_constant_field(const Space& s, double c) { return Field(s.size(), c); }

Field make_power_field(const Space& s, double a, std::size_t center, bool* warned) {
  int n = s.is_grid() ? s.dim() : static_cast<int>(s.points()[0].size());
  if (warned) *warned = (a >= n);
  Field u(s.size(), 0.0);
  double nearest = s.diameter();
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i == center) continue;
    nearest = std::min(nearest, s.distance(center, i));
  }
  for (std::size_t i = 0; i < s.size(); ++i) {
    double d = (i == center) ? nearest : s.distance(center, i);
    u[i] = std::pow(d, -a);
  }
  return u;
}

Field make_indicator_field(const Space& s, const Region& omega) {
  Field u(s.size(), 0.0);
  for (std::size_t i = 0; i < s.size(); ++i) u[i] = omega.contains(i) ? 1.0 : 0.0;
  return u;
}

Field make_bandlimited_field(const Space& s, std::uint64_t seed, int kmax) {
  if (!s.is_grid()) throw std::invalid_argument("band-limited fields need a grid space");
  int m = s.cells_per_side();
  if (kmax <= 0) kmax = std::max(1, m / 6);
  kmax = std::min(kmax, m / 3);
  Rng rng(seed);
  Field u(s.size(), 0.0);
  const double two_pi = 6.283185307179586476925286766559;
  if (s.dim() == 1) {
    for (int k = 1; k <= kmax; ++k) {
      double amp = rng.normal() / (1.0 + k);
      double phase = two_pi * rng.uniform();
      for (int i = 0; i < m; ++i)
        u[i] += amp * std::cos(two_pi * k * i / static_cast<double>(m) + phase);
    }
    return u;
  }
  // 2-d: independent amplitude and phase per mode, cosine sum over half the
  // lattice so the result is real with zero mean.
  for (int kx = -kmax; kx <= kmax; ++kx) {
    for (int ky = 0; ky <= kmax; ++ky) {
      if (ky == 0 && kx <= 0) continue;
      double kn = std::sqrt(static_cast<double>(kx) * kx + static_cast<double>(ky) * ky);
      double amp = rng.normal() / (1.0 + kn);
      double phase = two_pi * rng.uniform();
      for (int iy = 0; iy < m; ++iy)
        for (int ix = 0; ix < m; ++ix) {
          double arg = two_pi * (kx * ix + ky * iy) / static_cast<double>(m) + phase;
          u[static_cast<std::size_t>(iy) * m + ix] += amp * std::cos(arg);
        }
    }
  }
  return u;
}

Field field_pow(const Field& u, double p) {
  Field out(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) out[i] = std::pow(u[i], p);
  return out;
}

Field field_abs(const Field& u) {
  Field out(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) out[i] = std::abs(u[i]);
  return out;
}

Field field_add(const Field& u, const Field& v) {
  Field out(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) out[i] = u[i] + v[i];
  return out;
}

Field field_scale(const Field& u, double c) {
  Field out(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) out[i] = c * u[i];
  return out;
}

double field_min(const Field& u) { return *std::min_element(u.begin(), u.end()); }
double field_max(const Field& u) { return *std::max_element(u.begin(), u.end()); }

Field field_shift_nonneg(const Field& u, double floor_value) {
  double lo = field_min(u);
  Field out(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) out[i] = u[i] - lo + floor_value;
  return out;
}

void save_field_binary(const std::string& path_prefix, const Space& s, const Field& u) {
  std::ofstream bin(path_prefix + ".bin", std::ios::binary);
  bin.write(reinterpret_cast<const char*>(u.data()),
            static_cast<std::streamsize>(u.size() * sizeof(double)));
  nlohmann::json meta;
  meta["layout"] = "row-major";
  meta["count"] = u.size();
  if (s.is_grid()) {
    meta["dims"] = s.dim() == 1 ? std::vector<int>{s.cells_per_side()}
                                : std::vector<int>{s.cells_per_side(), s.cells_per_side()};
    meta["period"] = s.period();
  }
  std::ofstream js(path_prefix + ".json");
  js << meta.dump(2) << "\n";
}

Field load_field_binary(const std::string& path_prefix, const Space& s) {
  std::ifstream bin(path_prefix + ".bin", std::ios::binary);
  if (!bin) throw std::runtime_error("cannot open " + path_prefix + ".bin");
  Field u(s.size());
  bin.read(reinterpret_cast<char*>(u.data()),
           static_cast<std::streamsize>(u.size() * sizeof(double)));
  if (!bin) throw std::runtime_error("field binary shorter than the space");
  return u;
}

}  // namespace rhtail
