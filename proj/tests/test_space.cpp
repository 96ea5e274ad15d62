#include <cmath>
#include <fstream>

#include "doctest.h"
#include "rhtail/field.hpp"
#include "rhtail/space.hpp"

using namespace rhtail;

TEST_CASE("ball average of a constant is the constant") {
  Space g = Space::periodic_grid(1, 64, 1.0);
  Field one = make_constant_field(g, 1.0);
  CHECK(ball_average(g, one, Ball{0, 0.1}) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(ball_average(g, one, Ball{13, 0.37}) == doctest::Approx(1.0).epsilon(1e-15));
  Field ind = make_indicator_field(g, region_whole(g));
  CHECK(ball_average(g, ind, Ball{5, 2.0}) == doctest::Approx(1.0));  // saturated
}

TEST_CASE("ball average against direct summation") {
  // u(x) = x on the 64-cell unit torus, ball at 0.5 with radius 0.25.
  Space g = Space::periodic_grid(1, 64, 1.0);
  Field u(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) u[i] = g.coords(i)[0];
  Ball b{32, 0.25};

  double num = 0.0, den = 0.0;
  for (int j = 0; j < 64; ++j) {
    int d = std::abs(j - 32);
    d = std::min(d, 64 - d);
    if (d / 64.0 < 0.25) {
      num += (j / 64.0) * (1.0 / 64.0);
      den += 1.0 / 64.0;
    }
  }
  double oracle = num / den;
  CHECK(ball_average(g, u, b) == doctest::Approx(oracle).epsilon(1e-15));
  CHECK(oracle == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("ball membership and errors") {
  Space g = Space::periodic_grid(1, 64, 1.0);
  Field u = make_constant_field(g, 1.0);
  CHECK_THROWS_AS(ball_average(g, u, Ball{0, 0.0}), EmptyBallError);
  CHECK(ball_members(g, Ball{0, 1.0 / 64.0}).size() == 1);  // strict inequality
  CHECK(ball_members(g, Ball{0, 1.5 / 64.0}).size() == 3);
  // Saturation at the diameter.
  CHECK(ball_saturated(g, Ball{7, 0.5}));
  CHECK(ball_members(g, Ball{7, 0.5}).size() == g.size());
  CHECK(balls_equal(g, Ball{7, 0.5}, Ball{11, 0.9}));
}

TEST_CASE("doubling profile on grids against exact cardinalities") {
  Space g1 = Space::periodic_grid(1, 512, 1.0);
  std::vector<Ball> samples;
  for (std::size_t c = 0; c < g1.size(); c += 64) samples.push_back(Ball{c, 40.0 * g1.spacing()});
  DoublingProfile p1 = doubling_profile(g1, samples);
  // Exact cardinalities: |B(r)| = 2*ceil(r/h)-1 cells for r/h integral.
  double expect = (2.0 * 80 - 1) / (2.0 * 40 - 1);
  CHECK(p1.c_d == doctest::Approx(expect).epsilon(1e-12));
  CHECK(std::abs(p1.c_d - 2.0) < 0.05);

  Space g2 = Space::periodic_grid(2, 64, 1.0);
  std::vector<Ball> s2;
  for (std::size_t c = 0; c < g2.size(); c += 257) s2.push_back(Ball{c, 12.0 * g2.spacing()});
  DoublingProfile p2 = doubling_profile(g2, s2);
  CHECK(std::abs(p2.c_d - 4.0) < 0.5);
  CHECK(std::abs(p2.dimension - 2.0) < 0.2);

  Space lonely = Space::point_cloud({{0.0}}, {1.0}, euclidean_dist);
  DoublingProfile p0 = doubling_profile(lonely, {Ball{0, 1.0}});
  CHECK(p0.c_d == doctest::Approx(1.0));
  CHECK(p0.dimension == doctest::Approx(0.0));

  CHECK_THROWS(doubling_profile(g1, {}));
}

TEST_CASE("doubling constant invariant under weight scaling") {
  Rng rng(5);
  std::vector<std::vector<double>> pts;
  std::vector<double> w1, w2;
  for (int i = 0; i < 40; ++i) {
    pts.push_back({rng.uniform(), rng.uniform()});
    double w = 0.2 + rng.uniform();
    w1.push_back(w);
    w2.push_back(17.5 * w);
  }
  Space a = Space::point_cloud(pts, w1, euclidean_dist);
  Space b = Space::point_cloud(pts, w2, euclidean_dist);
  std::vector<Ball> samples = {{0, 0.2}, {5, 0.3}, {11, 0.25}};
  CHECK(doubling_profile(a, samples).c_d ==
        doctest::Approx(doubling_profile(b, samples).c_d).epsilon(1e-13));
}

TEST_CASE("chain metric: already a metric stays put") {
  Rng rng(3);
  std::vector<std::vector<double>> pts;
  for (int i = 0; i < 20; ++i) pts.push_back({rng.uniform(), rng.uniform()});
  Space cloud = Space::point_cloud(pts, std::vector<double>(20, 1.0), euclidean_dist, 1.0);
  ChainMetricResult res = chain_metric(cloud);
  CHECK(res.delta == doctest::Approx(1.0));
  double worst = 0.0;
  for (std::size_t i = 0; i < 20; ++i)
    for (std::size_t j = 0; j < 20; ++j)
      if (i != j)
        worst = std::max(worst, std::abs(res.rho_tilde[i * 20 + j] - cloud.distance(i, j)));
  CHECK(worst <= 1e-12);
  CHECK(res.e_achieved == doctest::Approx(1.0));
}

TEST_CASE("chain metric: squared euclidean snowflake is exact") {
  Rng rng(9);
  std::vector<std::vector<double>> pts;
  for (int i = 0; i < 50; ++i) pts.push_back({rng.uniform()});
  Space cloud = Space::point_cloud(pts, std::vector<double>(50, 1.0), squared_euclidean_dist, 2.0);
  ChainMetricResult res = chain_metric(cloud);
  CHECK(res.delta == doctest::Approx(0.5));
  double worst = 0.0;
  for (std::size_t i = 0; i < 50; ++i)
    for (std::size_t j = 0; j < 50; ++j)
      if (i != j)
        worst = std::max(worst, std::abs(res.rho_tilde[i * 50 + j] - cloud.distance(i, j)));
  CHECK(worst <= 1e-12);
  CHECK(res.e_achieved <= 1.0 + 1e-12);

  // Triangle inequality for rho_tilde^delta over all triples.
  double tri = 0.0;
  for (std::size_t i = 0; i < 50; ++i)
    for (std::size_t j = 0; j < 50; ++j)
      for (std::size_t k = 0; k < 50; ++k) {
        if (i == j || j == k || i == k) continue;
        tri = std::max(tri, std::pow(res.rho_tilde[i * 50 + k], res.delta) -
                                std::pow(res.rho_tilde[i * 50 + j], res.delta) -
                                std::pow(res.rho_tilde[j * 50 + k], res.delta));
      }
  CHECK(tri <= 1e-12);
}

TEST_CASE("chain metric: three point triangle violator is repaired") {
  // rho(a,b) = 1, rho(b,c) = 0.5, rho(a,c) = 2 violates the triangle
  // inequality; the two-hop chain is strictly shorter than the direct hop.
  auto rho = [](const std::vector<double>& x, const std::vector<double>& y) {
    double d = std::abs(x[0] - y[0]);
    if (d > 1.5) return 2.0;
    return d == 1.0 ? (x[0] + y[0] > 2.0 ? 0.5 : 1.0) : d;
  };
  Space cloud = Space::point_cloud({{0.0}, {1.0}, {2.0}}, {1.0, 1.0, 1.0}, rho);
  double k_exhaustive = cloud.quasi_constant();
  CHECK(k_exhaustive == doctest::Approx(2.0 / 1.5));
  ChainMetricResult res = chain_metric(cloud);
  double delta = std::log(2.0) / std::log(2.0 * k_exhaustive);
  CHECK(res.delta == doctest::Approx(delta));
  // Hand-solved shortest path a -> b -> c.
  double chain = std::pow(1.0, delta) + std::pow(0.5, delta);
  CHECK(res.rho_tilde[0 * 3 + 2] == doctest::Approx(std::pow(chain, 1.0 / delta)));
  CHECK(res.e_achieved > 1.0);
  CHECK(res.e_achieved == doctest::Approx(2.0 / std::pow(chain, 1.0 / delta)));
}

TEST_CASE("chain metric input validation") {
  Space g = Space::periodic_grid(1, 8, 1.0);
  CHECK_THROWS(chain_metric(g));
}

TEST_CASE("vitali cover basics") {
  Space g = Space::periodic_grid(1, 512, 1.0);
  std::vector<Ball> one = {Ball{10, 0.01}};
  CHECK(vitali_cover(g, one, 5.0) == std::vector<std::size_t>{0});
  std::vector<Ball> two = {Ball{10, 0.01}, Ball{300, 0.01}};
  CHECK(vitali_cover(g, two, 5.0).size() == 2);
  CHECK_THROWS(vitali_cover(g, one, 3.0));
  CHECK(vitali_cover(g, {}, 5.0).empty());
}

TEST_CASE("vitali cover: disjointness and coverage on random balls") {
  Space g = Space::periodic_grid(1, 512, 1.0);
  Rng rng(31);
  std::vector<Ball> balls;
  for (int i = 0; i < 100; ++i)
    balls.push_back(Ball{rng.next_below(g.size()), rng.uniform(0.004, 0.08)});
  std::vector<std::size_t> sel = vitali_cover(g, balls, 5.0);
  REQUIRE(!sel.empty());

  // Pairwise disjoint as exact member sets.
  std::vector<std::vector<char>> masks;
  for (std::size_t idx : sel) {
    std::vector<char> m(g.size(), 0);
    for (std::size_t i : ball_members(g, balls[idx])) m[i] = 1;
    masks.push_back(std::move(m));
  }
  for (std::size_t a = 0; a < masks.size(); ++a)
    for (std::size_t b = a + 1; b < masks.size(); ++b)
      for (std::size_t i = 0; i < g.size(); ++i) CHECK(!(masks[a][i] && masks[b][i]));

  // Exact coverage by 5x dilates.
  std::vector<char> covered(g.size(), 0);
  for (std::size_t idx : sel)
    for (std::size_t i : ball_members(g, dilate(balls[idx], 5.0))) covered[i] = 1;
  for (const Ball& b : balls)
    for (std::size_t i : ball_members(g, b)) CHECK(covered[i] == 1);
}

TEST_CASE("test fields") {
  Space g = Space::periodic_grid(1, 64, 1.0);
  Field c = make_constant_field(g, 1.0);
  for (double v : c) CHECK(v == 1.0);

  Region left = region_box(g, {0.0}, {0.5});
  Field ind = make_indicator_field(g, left);
  CHECK(ind[16] == 1.0);  // x = 0.25
  CHECK(ind[48] == 0.0);  // x = 0.75

  bool warned = true;
  Field pw = make_power_field(g, 0.5, 0, &warned);
  CHECK(!warned);
  CHECK(pw[16] == doctest::Approx(2.0).epsilon(1e-15));  // 0.25^{-1/2}
  CHECK(pw[0] == doctest::Approx(8.0).epsilon(1e-15));   // capped to one cell away
  make_power_field(g, 1.5, 0, &warned);
  CHECK(warned);  // a >= dim flagged, not an error

  Field bl1 = make_bandlimited_field(g, 1234);
  Field bl2 = make_bandlimited_field(g, 1234);
  CHECK(bl1 == bl2);  // deterministic in the seed
  CHECK(std::abs(field_mean(g, bl1)) < 1e-12);
}

TEST_CASE("ball average is monotone and matches the global mean on the whole space") {
  Space g = Space::periodic_grid(1, 128, 1.0);
  Rng rng(77);
  Field u(g.size()), v(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    u[i] = rng.uniform();
    v[i] = u[i] + rng.uniform();  // v >= u pointwise
  }
  for (int t = 0; t < 30; ++t) {
    Ball b{rng.next_below(g.size()), rng.uniform(0.02, 0.6)};
    CHECK(ball_average(g, u, b) <= ball_average(g, v, b) + 1e-14);
  }
  Ball full{0, 2.0};
  CHECK(ball_average(g, u, full) == doctest::Approx(field_mean(g, u)).epsilon(1e-12));
}

TEST_CASE("quasi constant estimation methods") {
  // Small clouds are measured exhaustively, large ones by sampled triples,
  // and built-in kinds may declare the analytic constant.
  std::vector<std::vector<double>> small_pts = {{0.0}, {0.3}, {1.0}};
  Space small = Space::point_cloud(small_pts, {1.0, 1.0, 1.0}, euclidean_dist);
  CHECK(small.quasi_method() == "exhaustive");
  CHECK(small.quasi_constant() == doctest::Approx(1.0));  // collinear metric

  Rng rng(17);
  std::vector<std::vector<double>> big_pts;
  for (int i = 0; i < 600; ++i) big_pts.push_back({rng.uniform(), rng.uniform()});
  Space big = Space::point_cloud(big_pts, std::vector<double>(600, 1.0), squared_euclidean_dist);
  CHECK(big.quasi_method() == "sampled");
  CHECK(big.quasi_constant() <= 2.0 + 1e-12);  // analytic bound for the square
  CHECK(big.quasi_constant() > 1.0);

  Space declared = Space::point_cloud(small_pts, {1.0, 1.0, 1.0}, squared_euclidean_dist, 2.0);
  CHECK(declared.quasi_method() == "declared");
  CHECK(declared.quasi_constant() == 2.0);
}

TEST_CASE("cloud and field CSV round trip") {
  Space g = Space::point_cloud({{0.0, 0.0}, {0.5, 0.1}, {0.2, 0.9}}, {1.0, 2.0, 0.5},
                               euclidean_dist);
  Field u = {1.5, -2.25, 0.125};
  save_field_csv("/tmp/rhtail_field.csv", u);
  Field back = load_field_csv("/tmp/rhtail_field.csv", g);
  CHECK(back == u);

  {
    std::ofstream csv("/tmp/rhtail_cloud.csv");
    csv << "# x, y, weight\n0.0,0.0,1.0\n0.5,0.1,2.0\n0.2,0.9,0.5\n";
  }
  Space loaded = load_point_cloud_csv("/tmp/rhtail_cloud.csv", euclidean_dist);
  CHECK(loaded.size() == 3);
  CHECK(loaded.measure(1) == 2.0);
  CHECK(loaded.distance(0, 1) == doctest::Approx(g.distance(0, 1)));
  CHECK(loaded.total_measure() == doctest::Approx(3.5));
}
