#include "attackbench/errors.hpp"
#include "attackbench/train.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace attackbench;

namespace {

Dataset two_clusters(std::size_t n, std::uint64_t seed) {
  testing::Gen g(seed);
  Dataset d;
  d.dim = 2;
  d.num_classes = 2;
  for (std::size_t i = 0; i < n; ++i) {
    const int label = static_cast<int>(i % 2);
    const double c = label == 0 ? 0.2 : 0.8;
    d.samples.push_back({{c + g.uniform(-0.1, 0.1), c + g.uniform(-0.1, 0.1)}, label});
  }
  return d;
}

}  // namespace

TEST_CASE("a linear classifier separates two separated clusters") {
  const Dataset d = two_clusters(60, 1);
  const auto m = train(d, Architecture{}, TrainParams{200, 16, 0.5}, std::nullopt, 3);
  CHECK(m.layers.size() == 1);
  CHECK(accuracy(m, d) == 1.0);
}

TEST_CASE("a hidden layer fits moons") {
  const Dataset d = generate_synthetic(SyntheticKind::Moons, 200, 2, 4);
  const auto m = train(d, Architecture{{32}}, TrainParams{300, 16, 0.2}, std::nullopt, 4);
  CHECK(accuracy(m, d) >= 0.95);
}

TEST_CASE("identical points with one label") {
  Dataset d;
  d.dim = 3;
  d.num_classes = 2;
  for (int i = 0; i < 8; ++i) d.samples.push_back({{0.3, 0.3, 0.3}, 1});
  const auto m = train(d, Architecture{{4}}, TrainParams{50, 4, 0.1}, std::nullopt, 9);
  CHECK(accuracy(m, d) == 1.0);
}

TEST_CASE("training is deterministic and float32-exact") {
  const Dataset d = two_clusters(40, 2);
  const auto a = train(d, Architecture{{6}}, TrainParams{20, 8, 0.1}, std::nullopt, 11);
  const auto b = train(d, Architecture{{6}}, TrainParams{20, 8, 0.1}, std::nullopt, 11);
  const auto c = train(d, Architecture{{6}}, TrainParams{20, 8, 0.1}, std::nullopt, 12);
  CHECK(a == b);
  CHECK_FALSE(a == c);
  CHECK(decode_model(encode_model(a)) == a);
}

TEST_CASE("adversarial training runs and stays accurate on easy data") {
  const Dataset d = two_clusters(40, 3);
  AttackConfig pgd = preset("PGD-Linf");
  pgd.search.reset();
  pgd.epsilon = 0.05;
  pgd.steps = 5;
  const auto m = train(d, Architecture{{8}}, TrainParams{60, 8, 0.2}, pgd, 5);
  CHECK(accuracy(m, d) == 1.0);
  AttackConfig no_eps = pgd;
  no_eps.epsilon.reset();
  CHECK_THROWS_AS(train(d, Architecture{}, TrainParams{1, 8, 0.1}, no_eps, 5), ConfigError);
}

TEST_CASE("empty datasets are rejected") {
  Dataset d;
  d.dim = 2;
  d.num_classes = 2;
  CHECK_THROWS_AS(train(d, Architecture{}, TrainParams{}, std::nullopt, 1), DataError);
}
