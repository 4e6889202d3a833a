#include <cmath>
#include <map>

#include "doctest.h"
#include "support.hpp"
#include "walkbound/parallel.hpp"
#include "walkbound/walk.hpp"

using namespace walkbound;
using fixture::E;
using fixture::W;

namespace {

std::map<std::string, double> law(const ActingGroup& A, const std::vector<ExtElement>& xs) {
  std::map<std::string, double> out;
  for (const auto& x : xs) out[A.str(x)] += 1.0 / static_cast<double>(xs.size());
  return out;
}

std::map<std::string, double> exact_square(const ActingGroup& A, const StepMeasure& mu,
                                           const std::vector<oracle::Subst>& theta) {
  std::vector<std::pair<oracle::LatticeElement, double>> atoms;
  for (const auto& a : mu.atoms()) {
    oracle::LatticeElement e{a.element.w.empty() ? "" : a.element.w.str(), {}};
    for (auto x : std::get<LatticeVector>(a.element.p)) e.p.push_back(static_cast<long>(x));
    atoms.emplace_back(e, a.weight);
  }
  const auto conv = oracle::convolve(atoms, [&](const auto& g, const auto& h) { return oracle::lattice_mul(theta, g, h); });
  std::map<std::string, double> out;
  for (const auto& [e, p] : conv) {
    std::string s = oracle::show(e.w);
    if (!e.p.empty()) {
      s += '|';
      for (std::size_t i = 0; i < e.p.size(); ++i) s += (i ? "," : "") + std::to_string(e.p[i]);
    }
    out[s] += p;
  }
  (void)A;
  return out;
}

}  // namespace

TEST_CASE("step measure validation") {
  const auto A = fixture::linear_group();
  CHECK_THROWS_AS(StepMeasure(A, {{E(A, "a|0"), 0.5}, {E(A, "b|0"), 0.4}}), ConfigError);
  CHECK_THROWS_AS(StepMeasure(A, {{E(A, "a|0"), 0.5}, {E(A, "a|0"), 0.5}}), ConfigError);
  CHECK_THROWS_AS(StepMeasure(A, {{E(A, "a|0"), 1.5}, {E(A, "b|0"), -0.5}}), ConfigError);
  CHECK_THROWS_AS(StepMeasure(A, {}), ConfigError);
  CHECK_NOTHROW(StepMeasure(A, {{E(A, "a|0"), 0.5}, {E(A, "b|0"), 0.5 + 1e-12}}));
}

TEST_CASE("semigroup generation check") {
  const auto A = fixture::linear_group();
  CHECK_NOTHROW(check_semigroup_generation(A, fixture::standard_measure(A), 2, 6));
  const auto positive = StepMeasure::uniform(A, {E(A, "a|0"), E(A, "b|0"), E(A, "1|1")});
  CHECK_THROWS_AS(check_semigroup_generation(A, positive, 2, 6), ConfigError);
  CHECK(ball(fixture::srw_group(), 2).size() == 1 + 4 + 12);
}

TEST_CASE("deterministic path") {
  const auto A = fixture::linear_group();
  const auto mu = StepMeasure::point_mass(A, E(A, "a|0"));
  const auto batch = sample_paths(A, mu, 1, 3, 5, StorageMode::Full);
  REQUIRE(batch.trajectories.size() == 3);
  for (const auto& path : batch.trajectories) {
    REQUIRE(path.size() == 6);
    for (std::size_t n = 0; n <= 5; ++n) CHECK(path[n] == E(A, std::string(n, 'a') + (n ? "|0" : "1|0")));
  }
  CHECK(drift_estimate(A, batch).value == doctest::Approx(1.0));
}

TEST_CASE("law of x_1 and x_2") {
  const auto A = fixture::linear_group();
  const auto mu = fixture::standard_measure(A);
  const auto one = sample_paths(A, mu, 5, 100'000, 1);
  std::map<std::string, double> mu_law;
  for (const auto& a : mu.atoms()) mu_law[A.str(a.element)] = a.weight;
  CHECK(oracle::total_variation(law(A, one.final_positions), mu_law) < 0.01);

  const auto two = sample_paths(A, mu, 6, 100'000, 2);
  const auto exact = exact_square(A, mu, {fixture::subst(fixture::kLinear)});
  CHECK(oracle::total_variation(law(A, two.final_positions), exact) <= 0.02);
}

TEST_CASE("Markov property spot check") {
  const auto A = fixture::fibonacci_group();
  const auto mu = fixture::standard_measure(A);
  const std::size_t n = 200'000;
  const auto x4 = sample_paths(A, mu, 31, n, 4);
  const auto x2 = sample_paths(A, mu, 32, n, 2);
  const auto y2 = sample_paths(A, mu, 33, n, 2);
  std::vector<ExtElement> prod;
  for (std::size_t i = 0; i < n; ++i) prod.push_back(ext_multiply(A, x2.final_positions[i], y2.final_positions[i]));
  CHECK(oracle::total_variation(law(A, x4.final_positions), law(A, prod)) < 0.05);
}

TEST_CASE("parallel kernel matches the reference and is reproducible") {
  for (const auto& A : {fixture::linear_group(), fixture::fibonacci_group(), fixture::free_acting_group(),
                        fixture::lattice_group()}) {
    const auto mu = fixture::standard_measure(A);
    const auto fast = sample_paths(A, mu, 77, 40, 60, StorageMode::Full);
    const auto ref = reference::sample_paths(A, mu, 77, 40, 60, StorageMode::Full);
    CHECK(fast.final_positions == ref.final_positions);
    CHECK(fast.trajectories == ref.trajectories);
    CHECK(sample_paths(A, mu, 77, 40, 60).final_positions == fast.final_positions);
    CHECK(sample_paths(A, mu, 78, 40, 60).final_positions != fast.final_positions);
  }
  const auto A = fixture::srw_group();
  const auto mu = fixture::standard_measure(A);
  set_workers(1);
  const auto serial = sample_paths(A, mu, 5, 300, 100);
  set_workers(4);
  const auto parallel = sample_paths(A, mu, 5, 300, 100);
  set_workers(1);
  CHECK(serial.final_positions == parallel.final_positions);
}

TEST_CASE("moments") {
  const auto A = fixture::srw_group();
  const auto srw = fixture::standard_measure(A);
  CHECK(entropy(srw) == doctest::Approx(std::log(4.0)));
  CHECK(first_moment(A, srw) == doctest::Approx(1.0));
  CHECK(log_moment(A, srw) == doctest::Approx(std::log(2.0)));
  const auto point = StepMeasure::point_mass(A, E(A, "abA"));
  CHECK(entropy(point) == 0.0);
  CHECK(first_moment(A, point) == doctest::Approx(3.0));
  for (const auto& B : {fixture::linear_group(), fixture::free_acting_group(), fixture::lattice_group()}) {
    const auto mu = fixture::standard_measure(B);
    CHECK(entropy(mu) <= std::log(static_cast<double>(mu.size())) + 1e-12);
    CHECK(first_moment(B, mu) >= log_moment(B, mu));
  }
}

TEST_CASE("drift") {
  const auto A = fixture::srw_group();
  const auto mu = fixture::standard_measure(A);
  const std::size_t n = 2000;
  const auto batch = sample_paths(A, mu, 8, 1000, n);
  const auto d = drift_estimate(A, batch);
  const double exact = oracle::radial_mean(2, n) / static_cast<double>(n);
  CHECK(std::abs(d.value - exact) < 4.0 * d.std_error + 1e-3);
  CHECK(exact == doctest::Approx(0.5).epsilon(0.01));

  const auto Z = ActingGroup::trivial(1);
  const auto lazy = StepMeasure::uniform(Z, {E(Z, "a"), E(Z, "A")});
  const auto zb = sample_paths(Z, lazy, 9, 1000, 10'000);
  const auto zd = drift_estimate(Z, zb);
  const double zexact = oracle::radial_mean(1, 10'000) / 10'000.0;
  CHECK(zexact < 0.01);
  CHECK(std::abs(zd.value - zexact) < 4.0 * zd.std_error + 1e-3);
}

TEST_CASE("asymptotic entropy") {
  const auto A = fixture::srw_group();
  const auto point = StepMeasure::point_mass(A, E(A, "a"));
  CHECK(asymptotic_entropy_estimate(A, point, 1, 1000, {4, 8}).value == doctest::Approx(0.0).epsilon(1e-12));

  const auto mu = fixture::standard_measure(A);
  const auto est = asymptotic_entropy_estimate(A, mu, 3, 200'000, {4, 6});
  REQUIRE(est.depths.size() == 2);
  for (const auto& d : est.depths) {
    const double exact = oracle::srw_entropy(2, d.n);
    CHECK(d.corrected <= exact + 0.01);
    CHECK(d.corrected == doctest::Approx(exact).epsilon(0.02));
    CHECK(d.plugin <= d.corrected);
    CHECK(d.coverage > 0.9);
    CHECK_FALSE(d.bias_flagged);
  }

  const auto Z = ActingGroup::trivial(1);
  const auto lazy = StepMeasure::uniform(Z, {E(Z, "a"), E(Z, "A")});
  const auto z = asymptotic_entropy_estimate(Z, lazy, 4, 100'000, {100, 200, 400});
  CHECK(z.value < 0.02);
  CHECK_THROWS_AS(asymptotic_entropy_estimate(A, mu, 3, 1'000'000, {400}, 1000), BudgetError);
}
