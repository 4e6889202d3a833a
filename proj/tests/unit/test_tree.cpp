#include <random>
#include <set>

#include "doctest.h"
#include "support.hpp"
#include "walkbound/tree.hpp"

using namespace walkbound;
using fixture::W;

namespace {

ReducedWord random_word(std::mt19937_64& gen, int rank, std::size_t max_len) {
  std::uniform_int_distribution<int> g(1, rank), s(0, 1);
  std::uniform_int_distribution<std::size_t> n(0, max_len);
  std::vector<Letter> letters;
  for (std::size_t i = 0, len = n(gen); i < len; ++i) letters.emplace_back(g(gen), s(gen) ? 1 : -1);
  return ReducedWord(rank, letters);
}

std::vector<ReducedWord> all_words(int rank, std::size_t max_len) {
  std::vector<ReducedWord> out{ReducedWord(rank)};
  std::vector<ReducedWord> layer{ReducedWord(rank)};
  for (std::size_t k = 0; k < max_len; ++k) {
    std::vector<ReducedWord> next;
    for (const auto& u : layer)
      for (int g = 1; g <= rank; ++g)
        for (int s : {1, -1}) {
          if (!u.empty() && u.back().cancels(Letter(g, s))) continue;
          auto v = u;
          v.push_back(Letter(g, s));
          next.push_back(v);
        }
    out.insert(out.end(), next.begin(), next.end());
    layer = std::move(next);
  }
  return out;
}

std::string plain(const ReducedWord& w) { return w.empty() ? "" : w.str(); }

// c^n in the text encoding ("1" when n = 0).
std::string rep(char c, std::size_t n) { return n == 0 ? "1" : std::string(n, c); }

}  // namespace

TEST_CASE("tree construction") {
  CHECK_THROWS_AS(InnerTree(1), ConfigError);
  const InnerTree T(3);
  const auto base = T.base();
  CHECK(T.act(W(3, "a"), base) == base);
  CHECK(T.act(W(3, "AAA"), base) == base);
  CHECK(T.adjacent(base, T.vertex(W(3, "b"))));
  CHECK(T.vertex(W(3, "baa")) == T.vertex(W(3, "b")));
  CHECK(T.vertex(W(3, "bA")).representative() == W(3, "b"));
  // No nonempty word of length <= 5 fixes the edge (V(1), V(b)).
  const auto vb = T.vertex(W(3, "b"));
  for (const auto& w : all_words(3, 5)) {
    if (w.empty()) continue;
    CHECK_FALSE((T.act(w, base) == base && T.act(w, vb) == vb));
  }
}

TEST_CASE("geodesics") {
  const InnerTree T(3);
  const auto base = T.base();
  CHECK(T.geodesic(base, base).length() == 0);
  CHECK(T.geodesic(base, base).vertices.size() == 1);
  const auto g1 = T.geodesic(base, T.vertex(W(3, "b")));
  CHECK(g1.length() == 1);
  const auto g2 = T.geodesic(T.vertex(W(3, "b")), T.vertex(W(3, "c")));
  CHECK(g2.length() == 2);
  CHECK(g2.vertices[1] == base);
  CHECK(oracle::tree_bfs_distance(3, "b", "c", 1, 4) == 2);

  std::mt19937_64 gen(1);
  for (int trial = 0; trial < 60; ++trial) {
    const auto u = T.vertex(random_word(gen, 3, 3)), v = T.vertex(random_word(gen, 3, 3));
    const auto g = T.geodesic(u, v);
    // Ball oracle with powers up to 3 covers every representative of length <= 3.
    CHECK(static_cast<int>(g.length()) ==
          oracle::tree_bfs_distance(3, plain(u.representative()), plain(v.representative()), 3, 8));
    for (std::size_t j = 0; j + 1 < g.vertices.size(); ++j) CHECK(T.adjacent(g.vertices[j], g.vertices[j + 1]));
    for (std::size_t j = 0; j + 2 < g.vertices.size(); ++j) CHECK(g.vertices[j] != g.vertices[j + 2]);
  }
}

TEST_CASE("equivariance and the H-relation") {
  const InnerTree T(3);
  std::mt19937_64 gen(2);
  for (int trial = 0; trial < 100; ++trial) {
    const auto g = random_word(gen, 3, 5);
    const auto u = T.vertex(random_word(gen, 3, 5)), v = T.vertex(random_word(gen, 3, 5));
    const auto path = T.geodesic(u, v);
    const auto moved = T.geodesic(T.act(g, u), T.act(g, v));
    REQUIRE(moved.vertices.size() == path.vertices.size());
    for (std::size_t j = 0; j < path.vertices.size(); ++j) CHECK(moved.vertices[j] == T.act(g, path.vertices[j]));
    CHECK(T.act_stable(T.act(g, u)) == T.act(apply(T.alpha(), g), T.act_stable(u)));
    CHECK(T.act_stable(T.act_stable(u, 3), -3) == u);
  }
}

TEST_CASE("the extension acts through w . H^p") {
  const InnerTree T(2);
  const auto A = T.group();
  std::mt19937_64 gen(3);
  const auto mu = fixture::standard_measure(A);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    ExtElement g = A.identity(), h = A.identity();
    for (int i = 0; i < 5; ++i) g = ext_multiply(A, g, mu.atoms()[mu.sample(unif(gen))].element);
    for (int i = 0; i < 5; ++i) h = ext_multiply(A, h, mu.atoms()[mu.sample(unif(gen))].element);
    const auto v = T.vertex(random_word(gen, 2, 4));
    CHECK(T.act(ext_multiply(A, g, h), v) == T.act(g, T.act(h, v)));
  }
}

TEST_CASE("liminf in the observers topology") {
  const InnerTree T(3);
  const auto base = T.base();

  const auto p = T.vertex(W(3, "bcB"));
  const auto c = T.liminf_observers(T.vertex(W(3, "c")), std::vector<CosetVertex>(40, p));
  CHECK(c.kind == LiminfKind::Vertex);
  CHECK(c.endpoint() == p);

  // P_n = V(a^n b) lie in pairwise distinct directions at V(1).
  std::vector<CosetVertex> turning;
  for (int n = 0; n < 40; ++n) turning.push_back(T.vertex(multiply(W(3, rep('a', static_cast<std::size_t>(n))), W(3, "b"))));
  const auto q = T.vertex(W(3, "c"));
  for (std::size_t i = 1; i < turning.size(); ++i) {
    // Oracle: every geodesic [Q, P_n] passes through V(1).
    const auto g = T.geodesic(q, turning[i]);
    CHECK(g.length() == 2);
    CHECK(g.vertices[1] == base);
    CHECK(turning[i] != turning[i - 1]);
  }
  const auto t = T.liminf_observers(q, turning);
  CHECK(t.kind == LiminfKind::Vertex);
  CHECK(t.endpoint() == base);

  std::vector<CosetVertex> march;
  for (int n = 0; n < 40; ++n) march.push_back(T.vertex(W(3, rep('b', static_cast<std::size_t>(n)))));
  const auto m = T.liminf_observers(base, march);
  CHECK(m.kind == LiminfKind::Ray);
  REQUIRE(m.stable_path.size() >= 2);
  for (std::size_t j = 0; j < m.stable_path.size(); ++j)
    CHECK(m.stable_path[j] == T.vertex(W(3, rep('b', j))));

  // Too short to decide.
  CHECK(T.liminf_observers(base, {base, base}).kind == LiminfKind::Inconclusive);
}

TEST_CASE("liminf does not depend on the base") {
  const InnerTree T(3);
  std::vector<CosetVertex> turning;
  for (int n = 1; n <= 40; ++n)
    turning.push_back(T.vertex(multiply(W(3, "bC" + std::string(static_cast<std::size_t>(n), 'a')), W(3, "c"))));
  const auto expected = T.vertex(W(3, "bC"));
  for (const char* q : {"1", "c", "bb", "CaB", "bCc"}) {
    const auto r = T.liminf_observers(T.vertex(W(3, q)), turning);
    CHECK(r.kind == LiminfKind::Vertex);
    CHECK(r.endpoint() == expected);
  }
  std::vector<CosetVertex> march;
  for (int n = 1; n <= 40; ++n) march.push_back(T.vertex(W(3, "c" + std::string(static_cast<std::size_t>(n), 'b'))));
  for (const char* q : {"1", "C", "bb"}) {
    const auto r = T.liminf_observers(T.vertex(W(3, q)), march);
    CHECK(r.kind == LiminfKind::Ray);
    CHECK(T.depth(r.endpoint()) >= 10);
    CHECK(common_prefix_length(r.endpoint().representative(), W(3, "cbbbbbbbbb")) >= 5);
  }
}

TEST_CASE("twisted powers") {
  const auto phi = fixture::make_auto(2, fixture::kLinear);
  const auto v = W(2, "abAAb");
  CHECK(twisted_power(v, 1, phi) == v);
  CHECK(twisted_power(W(2, "b"), 2, phi) == W(2, "bAb"));
  CHECK(twisted_power(W(2, "a"), 3, phi) == W(2, "aaa"));
  CHECK_THROWS_AS(twisted_power(v, 0, phi), ConfigError);

  std::mt19937_64 gen(4);
  for (const auto& [rank, t] : std::vector<std::pair<int, const std::vector<std::string>*>>{
           {2, fixture::kLinear}, {2, fixture::kFibonacci}, {3, fixture::kFreeAlpha}}) {
    const auto f = fixture::make_auto(rank, t[0], t[1]);
    const auto s = fixture::subst(t[0], t[1]);
    for (int trial = 0; trial < 20; ++trial) {
      const auto w = random_word(gen, rank, 4);
      for (int k = 1; k <= 10; ++k) {
        if (rank == 2 && t == fixture::kFibonacci && k > 7) break;
        const auto sk = twisted_power(w, k, f);
        CHECK(twisted_power(w, k + 1, f) == multiply(w, apply(f.inverse(), sk)));
        // Direct oracle: product of phi^{-i}(v), i = 0..k-1.
        std::string direct;
        for (int i = 0; i < k; ++i) direct = oracle::mul(direct, oracle::apply_power(s, -i, plain(w)));
        CHECK(plain(sk) == direct);
      }
    }
  }
}

TEST_CASE("twisted powers are powers of (v, 1)") {
  // (v,1)^k = (v alpha(v) ... alpha^{k-1}(v), k) = (twisted_power(v, k, alpha^-1), k).
  const auto A = fixture::linear_group();
  const auto ainv = A.theta()[0].inverse();
  std::mt19937_64 gen(5);
  for (int trial = 0; trial < 30; ++trial) {
    const ExtElement g{random_word(gen, 2, 4), LatticeVector{1}};
    ExtElement gk = g;
    for (int k = 1; k <= 6; ++k) {
      CHECK(gk == ExtElement{twisted_power(g.w, k, ainv), LatticeVector{k}});
      gk = ext_multiply(A, gk, g);
    }
  }
}

TEST_CASE("singular elements fixing an edge") {
  const InnerTree T(2);
  const auto A = T.group();
  const auto ainv = T.alpha().inverse();
  for (const char* u : {"1", "b", "aB", "bab"}) {
    const auto P = T.vertex(W(2, u));
    const auto Q = T.vertex(multiply(W(2, u), W(2, "b")));
    REQUIRE(T.adjacent(P, Q));
    // (v, 1) fixing the edge: only v = a^-1 among short words.
    std::vector<ReducedWord> fixing;
    for (const auto& v : all_words(2, 4)) {
      const ExtElement g{v, LatticeVector{1}};
      if (T.act(g, P) == P && T.act(g, Q) == Q) fixing.push_back(v);
    }
    REQUIRE(fixing.size() == 1);
    CHECK(fixing[0] == W(2, "A"));
    for (int k = 1; k <= 3; ++k) {
      for (const auto& w : all_words(2, 4)) {
        const ExtElement g{w, LatticeVector{k}};
        const bool fixes = T.act(g, P) == P && T.act(g, Q) == Q;
        CHECK(fixes == (w == twisted_power(fixing[0], k, ainv)));
      }
    }
  }
  (void)A;
}

TEST_CASE("strips") {
  const InnerTree T(3);
  const auto base = T.base();
  const auto vb = T.vertex(W(3, "b"));
  const auto vc = T.vertex(W(3, "c"));
  const auto adj = T.strip_exit_points(base, vb);
  REQUIRE(adj.size() == 2);
  CHECK(adj[0] == W(3, "b"));
  CHECK(adj[1] == W(3, "1"));
  CHECK(T.strip_exit_points(vb, vb).empty());
  const auto bc = T.strip_exit_points(vb, vc);
  REQUIRE(bc.size() == 3);
  CHECK(bc[0] == W(3, "1"));
  CHECK(bc[1] == W(3, "b"));
  CHECK(bc[2] == W(3, "c"));
  // Each exit names the adjacent vertex in its direction.
  const auto g = T.geodesic(T.vertex(W(3, "bAc")), T.vertex(W(3, "CaaB")));
  for (std::size_t j = 0; j + 1 < g.vertices.size(); ++j) {
    const auto e = T.exit_element(g.vertices[j], g.vertices[j + 1]);
    CHECK(T.vertex(e) == g.vertices[j + 1]);
  }
}

TEST_CASE("strip growth along the b-axis") {
  const InnerTree T(2);
  const std::size_t M = 15;
  const auto lo = T.vertex(W(2, std::string(M, 'B')));
  const auto hi = T.vertex(W(2, std::string(M, 'b')));
  const auto strip = T.strip_exit_points(lo, hi);
  // Oracle: the exit points are exactly b^j for |j| <= M.
  std::set<std::string> expect;
  for (int j = -static_cast<int>(M); j <= static_cast<int>(M); ++j)
    expect.insert(j == 0 ? "1" : std::string(static_cast<std::size_t>(std::abs(j)), j > 0 ? 'b' : 'B'));
  std::set<std::string> got;
  for (const auto& w : strip) got.insert(w.str());
  CHECK(got == expect);
  const auto prof = strip_growth_profile(strip, 12);
  REQUIRE(prof.counts.size() == 12);
  for (std::size_t k = 1; k <= 12; ++k) CHECK(prof.counts[k - 1] == 2 * k + 1);
  CHECK(prof.intercept == doctest::Approx(1.0));
  CHECK(prof.slope == doctest::Approx(2.0));
  CHECK(prof.max_residual == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(prof.bound_holds);

  const auto single = strip_growth_profile({W(2, "ab")}, 5);
  for (auto c : single.counts) CHECK(c <= 1);
  const auto none = strip_growth_profile({}, 5);
  for (auto c : none.counts) CHECK(c == 0);
}

TEST_CASE("horizon and export") {
  const InnerTree T(2, 4);
  CHECK_THROWS_AS(T.vertex(W(2, "bbbbb")), BudgetError);
  CHECK_NOTHROW(T.vertex(W(2, "bbbba")));
  CHECK(T.vertex_along(BoundaryRay::parse(2, "a(b)"), 3) == T.vertex(W(2, "abbb")));
  CHECK_THROWS_AS(T.vertex_along(BoundaryRay::parse(2, "b(a)"), 2), ConfigError);
  const std::string dot = InnerTree(2).dot_ball(1, 1);
  CHECK(dot.rfind("graph", 0) == 0);
  std::size_t edges = 0;
  for (std::size_t pos = 0; (pos = dot.find("--", pos)) != std::string::npos; pos += 2) ++edges;
  CHECK(edges == 6);
}
