#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "walkbound/error.hpp"
#include "walkbound/words.hpp"

using namespace walkbound;

namespace {

ReducedWord W(const std::string& s, int rank = 2) { return ReducedWord::parse(rank, s); }

ReducedWord random_word(std::mt19937_64& gen, int rank, std::size_t max_len) {
  std::uniform_int_distribution<int> gen_pick(1, rank), sign_pick(0, 1);
  std::uniform_int_distribution<std::size_t> len_pick(0, max_len);
  std::vector<Letter> letters;
  const auto n = len_pick(gen);
  for (std::size_t i = 0; i < n; ++i) letters.emplace_back(gen_pick(gen), sign_pick(gen) ? 1 : -1);
  return ReducedWord(rank, letters);
}

bool is_reduced(const ReducedWord& w) {
  for (std::size_t i = 1; i < w.size(); ++i)
    if (w[i - 1].cancels(w[i])) return false;
  return true;
}

}  // namespace

TEST_CASE("text encoding") {
  CHECK(W("aBc", 3).str() == "aBc");
  CHECK(W("1").str() == "1");
  CHECK(W("1").empty());
  CHECK(W("aA").empty());
  CHECK(W("abBA").empty());
  CHECK_THROWS_AS(W("c"), ConfigError);
  CHECK_THROWS_AS(W("a-b"), ConfigError);
}

TEST_CASE("multiply") {
  CHECK(multiply(W("ab"), W("Ba")) == W("aa"));
  CHECK(multiply(W("a"), W("a")) == W("aa"));
  const auto w = W("abAbb");
  CHECK(multiply(w, invert(w)).empty());
  CHECK_THROWS_AS(multiply(W("a", 2), W("a", 3)), RankMismatch);
}

TEST_CASE("invert") {
  CHECK(invert(W("ab")) == W("BA"));
  CHECK(invert(W("1")).empty());
  CHECK(invert(W("A")) == W("a"));
}

TEST_CASE("cyclic_reduce") {
  auto r = cyclic_reduce(W("baB"));
  CHECK(r.core == W("a"));
  CHECK(r.conjugator == W("b"));
  r = cyclic_reduce(W("ab"));
  CHECK(r.core == W("ab"));
  CHECK(r.conjugator.empty());
  r = cyclic_reduce(W("baaB"));
  CHECK(r.core == W("aa"));
  CHECK(r.conjugator == W("b"));
}

TEST_CASE("common_prefix_length") {
  CHECK(common_prefix_length(W("aba"), W("abb")) == 2);
  CHECK(common_prefix_length(W("abAB"), W("abAB")) == 4);
  CHECK(common_prefix_length(W("a"), W("b")) == 0);
}

TEST_CASE("rays") {
  CHECK(ray_prefix(BoundaryRay(W("1"), W("ab")), 3) == W("aba"));
  CHECK(ray_prefix(BoundaryRay(W("a"), W("b")), 4) == W("abbb"));
  CHECK(ray_prefix(BoundaryRay(W("a"), W("b")), 0).empty());
  CHECK(BoundaryRay::parse(2, "B(a)").str() == "B(a)");
  CHECK(BoundaryRay::parse(2, "(b)").head().empty());
  // Not cyclically reduced, or cancelling at a junction.
  CHECK_THROWS_AS(BoundaryRay(W("1"), W("abA")), ConfigError);
  CHECK_THROWS_AS(BoundaryRay(W("A"), W("a")), ConfigError);
  CHECK_THROWS_AS(BoundaryRay(W("1"), W("1")), ConfigError);
  CHECK(ray_prefix(extend_to_ray(W("aB")), 4) == W("aBBB"));
  CHECK(ray_prefix(extend_to_ray(W("1")), 2) == W("aa"));
}

TEST_CASE("randomized word properties") {
  std::mt19937_64 gen(7);
  for (int trial = 0; trial < 2000; ++trial) {
    const auto u = random_word(gen, 3, 12), v = random_word(gen, 3, 12), w = random_word(gen, 3, 12);
    const auto uv = multiply(u, v);
    CHECK(is_reduced(uv));
    CHECK(uv.str() == oracle::show(oracle::mul(u.str() == "1" ? "" : u.str(), v.str() == "1" ? "" : v.str())));
    CHECK(multiply(uv, w) == multiply(u, multiply(v, w)));
    CHECK(uv.size() <= u.size() + v.size());
    CHECK((u.size() + v.size() - uv.size()) % 2 == 0);
    CHECK(uv.size() + std::min(u.size(), v.size()) >= std::max(u.size(), v.size()));
    const auto c = cyclic_reduce(u);
    CHECK(is_cyclically_reduced(c.core));
    CHECK(cyclic_reduce(c.core).core == c.core);
    CHECK(multiply(multiply(c.conjugator, c.core), invert(c.conjugator)) == u);
  }
  for (int trial = 0; trial < 200; ++trial) {
    auto head = random_word(gen, 2, 5);
    auto cycle = cyclic_reduce(random_word(gen, 2, 4)).core;
    if (cycle.empty()) continue;
    if (!head.empty() && (head.back().cancels(cycle.front()))) continue;
    const BoundaryRay r(head, cycle);
    for (std::size_t k = 0; k < 20; ++k) {
      const auto p = ray_prefix(r, k), q = ray_prefix(r, k + 1);
      CHECK(p.size() == k);
      CHECK(is_reduced(q));
      CHECK(common_prefix_length(p, q) == k);
    }
  }
}
