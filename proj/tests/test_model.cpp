#include <doctest.h>

#include "helpers.hpp"
#include "liftmap/io.hpp"

using namespace liftmap;

namespace {

Feature unary(int v, std::vector<double> t, double w, int cell) {
  Feature f;
  f.scope = {v};
  f.table = std::move(t);
  f.weight = w;
  f.tie_cell = cell;
  return f;
}

Feature pairwise(int u, int v, std::vector<double> t, double w, int cell) {
  Feature f;
  f.scope = {u, v};
  f.table = std::move(t);
  f.weight = w;
  f.tie_cell = cell;
  return f;
}

}  // namespace

TEST_CASE("feature validation") {
  CHECK_THROWS_AS(Model::make(2, {unary(0, {1, 1}, 1, 0)}), ValidationError);  // constant
  CHECK_THROWS_AS(Model::make(2, {pairwise(1, 0, {0, 1, 1, 0}, 1, 0)}), ValidationError);
  CHECK_THROWS_AS(Model::make(2, {pairwise(0, 0, {0, 1, 1, 0}, 1, 0)}), ValidationError);
  CHECK_THROWS_AS(Model::make(2, {pairwise(0, 2, {0, 1, 1, 0}, 1, 0)}), ValidationError);
  CHECK_THROWS_AS(Model::make(2, {pairwise(0, 1, {0, 1}, 1, 0)}), ValidationError);
  // equal columns: the table ignores the second variable
  CHECK_THROWS_AS(Model::make(2, {pairwise(0, 1, {1, 1, 0, 0}, 1, 0)}), ValidationError);
  // equal rows: ignores the first
  CHECK_THROWS_AS(Model::make(2, {pairwise(0, 1, {1, 0, 1, 0}, 1, 0)}), ValidationError);
  CHECK_NOTHROW(Model::make(2, {pairwise(0, 1, {0, 0, 0, 1}, 1, 0)}));
}

TEST_CASE("tie cells renumber densely and require equal weights") {
  Model m = Model::make(3, {unary(0, {0, 1}, 2, 7), unary(1, {0, 1}, 1, 3),
                            unary(2, {0, 1}, 2, 7)});
  REQUIRE(m.tie_cells.size() == 2);
  CHECK(m.features[0].tie_cell == 0);
  CHECK(m.features[1].tie_cell == 1);
  CHECK(m.features[2].tie_cell == 0);
  CHECK(m.tie_cells[0] == std::vector<int>{0, 2});

  CHECK_THROWS_AS(Model::make(2, {unary(0, {0, 1}, 2, 7), unary(1, {0, 1}, 1, 7)}),
                  ValidationError);
}

TEST_CASE("score and score_bits agree") {
  std::mt19937 rng(11);
  Model m = testing::random_tied_model(rng, 6);
  for (uint32_t bits = 0; bits < (1u << 6); ++bits) {
    Config x = config_from_bits(bits, 6);
    CHECK(m.score(x) == doctest::Approx(m.score_bits(bits)).epsilon(1e-12));
  }
}

TEST_CASE("graph structure collapses duplicate scopes") {
  Model m = Model::make(3, {pairwise(0, 1, {0, 0, 0, 1}, 1, 0), pairwise(0, 1, {0, 1, 1, 0}, 2, 1),
                            pairwise(1, 2, {0, 0, 0, 1}, 1, 0)});
  Graph g = graph_structure(m);
  CHECK(g.num_edges() == 2);
  CHECK(g.edge_index(0, 1) == 0);
  CHECK(g.edge_index(1, 2) == 1);
  CHECK(g.edge_index(0, 2) == -1);
  CHECK(g.adj[1].size() == 2);
}

TEST_CASE("overcomplete parameters reproduce every score") {
  std::mt19937 rng(17);
  for (int trial = 0; trial < 10; ++trial) {
    Model m = testing::random_tied_model(rng, 7);
    Graph g = graph_structure(m);
    OvercompleteParams theta = to_overcomplete(m, g);
    for (uint32_t bits = 0; bits < (1u << 7); bits += 3) {
      Config x = config_from_bits(bits, 7);
      CHECK(overcomplete_score(theta, g, x) == doctest::Approx(m.score(x)).epsilon(1e-9));
    }
  }
}

TEST_CASE("model json round trip") {
  std::mt19937 rng(5);
  Model m = testing::random_tied_model(rng, 5);
  Model back = model_from_json(model_to_json(m));
  REQUIRE(back.num_vars == m.num_vars);
  REQUIRE(back.num_features() == m.num_features());
  for (uint32_t bits = 0; bits < (1u << 5); ++bits)
    CHECK(back.score_bits(bits) == doctest::Approx(m.score_bits(bits)).epsilon(1e-12));
  CHECK(back.tie_cells == m.tie_cells);
}

TEST_CASE("model json rejects malformed input") {
  CHECK_THROWS_AS(model_from_json(nlohmann::json::parse(R"({"features": []})")),
                  ValidationError);
  CHECK_THROWS_AS(model_from_json(nlohmann::json::parse(
                      R"({"num_vars": 2, "features": [{"scope": [0], "table": [0, 1],
                          "weight": "x", "tie_cell": 0}]})")),
                  ValidationError);
  CHECK_THROWS_AS(model_from_json(nlohmann::json::parse(
                      R"({"num_vars": 2, "features": [{"scope": [0], "table": [0],
                          "weight": 1, "tie_cell": 0}]})")),
                  ValidationError);
}

TEST_CASE("ground model fixtures score as expected") {
  Model tri = testing::frustrated_triangle();
  CHECK(tri.score_bits(0b000) == doctest::Approx(-3));
  CHECK(tri.score_bits(0b001) == doctest::Approx(-1));
  Model anchored = testing::anchored_triangle();
  CHECK(anchored.score_bits(0b111) == doctest::Approx(2.5));
  CHECK(anchored.score_bits(0b000) == doctest::Approx(1.5));
}
