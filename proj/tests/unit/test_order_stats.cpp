#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <vector>

#include "osmax/errors.hpp"
#include "osmax/order_stats.hpp"
#include "osmax/synthesis.hpp"

using namespace osmax;

namespace {

std::vector<double> osp_of(const std::vector<std::vector<double>>& paths, int m) {
  std::vector<std::span<const double>> views(paths.begin(), paths.end());
  return order_stat_path(views, m);
}

}  // namespace

TEST_CASE("order statistic path: fixed examples") {
  CHECK(osp_of({{3.0}, {1.0}, {2.0}}, 2) == std::vector<double>{2.0});
  const std::vector<double> x{0.3, -1.0, 2.0};
  CHECK(osp_of({x}, 1) == x);
  const std::vector<double> a{1.0, -2.0, 0.5}, b{0.0, 3.0, 0.5};
  CHECK(osp_of({a, b}, 2) == std::vector<double>{0.0, -2.0, 0.5});
  CHECK(osp_of({a, b}, 1) == std::vector<double>{1.0, 3.0, 0.5});
}

TEST_CASE("order statistic path: monotone in m and exchangeable") {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> z;
  std::vector<std::vector<double>> paths(5, std::vector<double>(50));
  for (auto& p : paths)
    for (double& v : p) v = z(rng);
  for (int m = 1; m < 5; ++m) {
    const auto hi = osp_of(paths, m), lo = osp_of(paths, m + 1);
    for (std::size_t k = 0; k < hi.size(); ++k) CHECK(hi[k] >= lo[k]);
  }
  auto shuffled = paths;
  std::shuffle(shuffled.begin(), shuffled.end(), rng);
  for (int m = 1; m <= 5; ++m) CHECK(osp_of(paths, m) == osp_of(shuffled, m));
}

TEST_CASE("order statistic path: errors") {
  CHECK_THROWS_AS(osp_of({}, 1), DimensionMismatch);
  CHECK_THROWS_AS(osp_of({{1.0}, {2.0}}, 3), DimensionMismatch);
  CHECK_THROWS_AS(osp_of({{1.0}, {2.0, 3.0}}, 1), DimensionMismatch);
}

TEST_CASE("maxima pair: enumerated examples") {
  const auto lattice = LatticeSpec::make(1.0, 4);
  const std::vector<double> osp{0.5, 1.5, -0.2, 0.9};
  GridSpec grid;
  grid.T = 3.0;

  grid.p = 2.0;
  auto s = maxima_pair(osp, lattice, grid);
  CHECK(s.m_cont == 1.5);
  CHECK(s.m_grid == 0.5);

  grid.p = 1.0;
  s = maxima_pair(osp, lattice, grid);
  CHECK(s.m_grid == s.m_cont);

  grid.p = 10.0;
  CHECK(maxima_pair(osp, lattice, grid).m_grid == osp[0]);

  grid.p = 0.0;
  CHECK_THROWS_AS(maxima_pair(osp, lattice, grid), GridOutOfRange);
  grid.p = 1.0;
  grid.T = 10.0;
  CHECK_THROWS_AS(maxima_pair(osp, lattice, grid), GridOutOfRange);
}

TEST_CASE("maxima pair: refining the grid never lowers the grid maximum") {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> z;
  const auto lattice = LatticeSpec::make(0.01, 801);
  std::vector<double> osp(lattice.n_points);
  for (int rep = 0; rep < 50; ++rep) {
    for (double& v : osp) v = z(rng);
    GridSpec grid;
    grid.T = 8.0;
    double previous = -1e300;
    for (double p : {0.64, 0.32, 0.16, 0.08, 0.04, 0.02, 0.01}) {
      grid.p = p;
      const auto s = maxima_pair(osp, lattice, grid);
      CHECK(s.m_grid >= previous);
      CHECK(s.m_grid <= s.m_cont);
      previous = s.m_grid;
    }
  }
}

TEST_CASE("aligned grids per regime") {
  const double T = 1000.0;
  const double scale = regime_scale(T, 1, 1.0);
  CHECK(scale == doctest::Approx(2.0 * std::log(T)));
  const auto lattice = LatticeSpec::covering(T, 0.05 / scale);

  const auto sparse = make_aligned_grid(GridRegime::Sparse, 10.0, T, 1, 1.0, lattice);
  CHECK(grid_stride(sparse, lattice) > 0);
  CHECK(sparse.scaled_step() >= 10.0 - 1e-9);

  const auto dense = make_aligned_grid(GridRegime::Dense, 0.1, T, 1, 1.0, lattice);
  CHECK(grid_stride(dense, lattice) == 2);
  CHECK(dense.scaled_step() <= 0.1 + 1e-12);

  const auto pick = make_aligned_grid(GridRegime::Pickands, 0.5, T, 1, 1.0, lattice);
  CHECK(grid_stride(pick, lattice) == 10);
  CHECK(pick.scaled_step() == doctest::Approx(0.5));

  CHECK_THROWS_AS(make_aligned_grid(GridRegime::Sparse, 5.0, T, 1, 1.0, lattice), RegimeMismatch);
  CHECK_THROWS_AS(make_aligned_grid(GridRegime::Dense, 0.5, T, 1, 1.0, lattice), RegimeMismatch);
  CHECK_THROWS_AS(make_aligned_grid(GridRegime::Pickands, 0.123, T, 1, 1.0, lattice), StepMismatch);
}

TEST_CASE("maxima CSV") {
  std::ostringstream os;
  write_maxima_header(os);
  MaximaSample s;
  s.T = 100;
  s.m_cont = 1.25;
  s.m_grid = 1.0;
  s.seed = 7;
  write_maxima_row(os, s);
  CHECK(os.str() == "T,m,n,regime,m_cont,m_grid,seed\n100,1,1,sparse,1.25,1,7\n");
}
