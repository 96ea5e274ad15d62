#include "rhtail/fft.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

namespace rhtail {

namespace {

const double kTwoPi = 6.283185307179586476925286766559;

bool is_pow2(int m) { return m > 0 && (m & (m - 1)) == 0; }

void fft_radix2(cd* a, int m, bool inverse) {
  for (int i = 1, j = 0; i < m; ++i) {
    int bit = m >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (int len = 2; len <= m; len <<= 1) {
    double ang = kTwoPi / len * (inverse ? 1.0 : -1.0);
    cd wl(std::cos(ang), std::sin(ang));
    for (int i = 0; i < m; i += len) {
      cd w(1.0, 0.0);
      for (int j = 0; j < len / 2; ++j) {
        cd u = a[i + j];
        cd v = a[i + j + len / 2] * w;
        a[i + j] = u + v;
        a[i + j + len / 2] = u - v;
        w *= wl;
      }
    }
  }
}

// Direct O(m^2) transform for non power-of-two sizes; twiddles cached per m
// behind a mutex so concurrent transforms stay safe.
const std::vector<cd>& twiddles(int m) {
  static std::mutex mu;
  static std::map<int, std::vector<cd>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(m);
  if (it != cache.end()) return it->second;
  std::vector<cd> tw(m);
  for (int k = 0; k < m; ++k) {
    double ang = -kTwoPi * k / m;
    tw[k] = cd(std::cos(ang), std::sin(ang));
  }
  return cache.emplace(m, std::move(tw)).first->second;
}

void fft_direct(cd* a, int m, bool inverse) {
  const auto& tw = twiddles(m);
  std::vector<cd> out(m, cd(0.0, 0.0));
  for (int k = 0; k < m; ++k) {
    cd acc(0.0, 0.0);
    for (int j = 0; j < m; ++j) {
      int idx = static_cast<int>((static_cast<long long>(k) * j) % m);
      cd w = tw[idx];
      if (inverse) w = std::conj(w);
      acc += a[j] * w;
    }
    out[k] = acc;
  }
  for (int k = 0; k < m; ++k) a[k] = out[k];
}

}  // namespace

void fft_1d(cd* a, int m, bool inverse) {
  if (is_pow2(m))
    fft_radix2(a, m, inverse);
  else
    fft_direct(a, m, inverse);
  double scale = 1.0 / std::sqrt(static_cast<double>(m));
  for (int i = 0; i < m; ++i) a[i] *= scale;
}

void fft_nd(std::vector<cd>& a, int dim, int m, bool inverse) {
  if (dim == 1) {
    if (static_cast<int>(a.size()) != m) throw std::invalid_argument("fft_nd: size mismatch");
    fft_1d(a.data(), m, inverse);
    return;
  }
  if (dim != 2 || static_cast<int>(a.size()) != m * m)
    throw std::invalid_argument("fft_nd: size mismatch");
  for (int row = 0; row < m; ++row) fft_1d(a.data() + static_cast<std::size_t>(row) * m, m, inverse);
  std::vector<cd> col(m);
  for (int c = 0; c < m; ++c) {
    for (int r = 0; r < m; ++r) col[r] = a[static_cast<std::size_t>(r) * m + c];
    fft_1d(col.data(), m, inverse);
    for (int r = 0; r < m; ++r) a[static_cast<std::size_t>(r) * m + c] = col[r];
  }
}

}  // namespace rhtail
