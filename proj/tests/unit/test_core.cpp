#include <doctest.h>

#include <cmath>

#include <vector>

#include "rsm/core.hpp"
#include "rsm/error.hpp"

using namespace rsm;

TEST_CASE("grid graph edge counts") {
  CHECK(build_grid_graph(1, 1).edge_count() == 0);
  CHECK(build_grid_graph(2, 2).edge_count() == 4);
  CHECK(build_grid_graph(100, 100).edge_count() == 19800);
  CHECK(build_grid_graph(7, 3).edge_count() == 2 * 7 * 3 - 7 - 3);
}

TEST_CASE("grid graph degrees and row-major layout") {
  const std::size_t w = 6, h = 4;
  const auto g = build_grid_graph(w, h);
  for (std::size_t r = 0; r < h; ++r) {
    for (std::size_t c = 0; c < w; ++c) {
      const bool row_edge = r == 0 || r == h - 1;
      const bool col_edge = c == 0 || c == w - 1;
      const std::size_t expect = row_edge && col_edge ? 2 : (row_edge || col_edge ? 3 : 4);
      CHECK(g.degree(r * w + c) == expect);
    }
  }
  // node 7 = (row 1, col 1): neighbours 1, 6, 8, 13
  std::vector<std::size_t> nb;
  for (const auto& n : g.neighbors(7)) nb.push_back(n.node);
  std::sort(nb.begin(), nb.end());
  CHECK(nb == std::vector<std::size_t>{1, 6, 8, 13});
}

TEST_CASE("graph rejects self loops, duplicates and out-of-range nodes") {
  CHECK_THROWS_AS(NeighborhoodGraph(3, {{1, 1}}), ConfigError);
  CHECK_THROWS_AS(NeighborhoodGraph(3, {{0, 1}, {1, 0}}), ConfigError);
  CHECK_THROWS_AS(NeighborhoodGraph(3, {{0, 3}}), ConfigError);
}

TEST_CASE("graph neighbours reference edge indices consistently") {
  NeighborhoodGraph g(4, {{2, 3}, {0, 1}, {1, 2}});
  REQUIRE(g.edge_count() == 3);
  for (std::size_t j = 0; j < 4; ++j) {
    for (const auto& n : g.neighbors(j)) {
      const auto& e = g.edges()[n.edge];
      CHECK(((e.j == j && e.k == n.node) || (e.k == j && e.j == n.node)));
    }
  }
  CHECK(g.edges()[0].j == 0);
  CHECK(g.edges()[2].k == 3);
}

TEST_CASE("dataset validation") {
  Dataset d(3);
  d.add(std::vector<double>{1, 2, 3}, 0);
  d.add(std::vector<double>{4, 5, 6}, 1);
  CHECK(d.size() == 2);
  CHECK(d.count(1) == 1);
  CHECK(d.row(1)[2] == 6);
  CHECK_THROWS_AS(d.add(std::vector<double>{1, 2}, 0), DimensionError);
  CHECK_THROWS(d.add(std::vector<double>{1, 2, 3}, 2));
  CHECK_THROWS(d.add(std::vector<double>{1, NAN, 3}, 0));

  Dataset single(1);
  single.add(std::vector<double>{1}, 0);
  single.add(std::vector<double>{2}, 0);
  const auto rows = single.all_rows();
  CHECK_THROWS_AS(single.require_both_classes(rows), TrainingError);
}

TEST_CASE("binary map count") {
  BinaryEffectMap q{{1, 0, 1, 1}};
  CHECK(q.count() == 3);
}
