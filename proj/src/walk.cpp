#include "walkbound/walk.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_map>
#include <unordered_set>

#include "walkbound/error.hpp"
#include "walkbound/parallel.hpp"

namespace walkbound {

StepMeasure::StepMeasure(const ActingGroup& A, std::vector<Atom> atoms) : atoms_(std::move(atoms)) {
  if (atoms_.empty()) throw ConfigError("step measure has no atoms");
  double total = 0.0;
  std::unordered_set<ExtElement, ExtElementHash> seen;
  for (const auto& a : atoms_) {
    A.validate(a.element);
    if (!(a.weight > 0.0) || !std::isfinite(a.weight)) throw ConfigError("atom weights must be positive");
    if (!seen.insert(a.element).second) throw ConfigError("duplicate atom " + A.str(a.element));
    total += a.weight;
  }
  if (std::abs(total - 1.0) > 1e-9) throw ConfigError("atom weights sum to " + std::to_string(total) + ", not 1");

  // Walker alias tables.
  const std::size_t n = atoms_.size();
  alias_prob_.assign(n, 0.0);
  alias_index_.assign(n, 0);
  std::vector<double> scaled(n);
  std::vector<std::size_t> small, large;
  for (std::size_t i = 0; i < n; ++i) {
    scaled[i] = atoms_[i].weight / total * static_cast<double>(n);
    (scaled[i] < 1.0 ? small : large).push_back(i);
  }
  while (!small.empty() && !large.empty()) {
    const std::size_t s = small.back();
    small.pop_back();
    const std::size_t l = large.back();
    alias_prob_[s] = scaled[s];
    alias_index_[s] = l;
    scaled[l] -= 1.0 - scaled[s];
    if (scaled[l] < 1.0) {
      large.pop_back();
      small.push_back(l);
    }
  }
  for (auto i : large) alias_prob_[i] = 1.0;
  for (auto i : small) alias_prob_[i] = 1.0;
}

StepMeasure StepMeasure::uniform(const ActingGroup& A, const std::vector<ExtElement>& support) {
  std::vector<Atom> atoms;
  for (const auto& g : support) atoms.push_back({g, 1.0 / static_cast<double>(support.size())});
  return StepMeasure(A, std::move(atoms));
}

StepMeasure StepMeasure::point_mass(const ActingGroup& A, const ExtElement& g) { return StepMeasure(A, {{g, 1.0}}); }

std::size_t StepMeasure::sample(double u) const {
  const double scaled = u * static_cast<double>(atoms_.size());
  const auto column = std::min(static_cast<std::size_t>(scaled), atoms_.size() - 1);
  const double coin = scaled - static_cast<double>(column);
  return coin < alias_prob_[column] ? column : alias_index_[column];
}

namespace {

void enumerate_words_upto(int rank, int max_len, std::vector<ReducedWord>& out) {
  out.push_back(ReducedWord(rank));
  std::size_t begin = 0;
  for (int len = 1; len <= max_len; ++len) {
    const std::size_t end = out.size();
    for (std::size_t i = begin; i < end; ++i) {
      for (int g = 1; g <= rank; ++g) {
        for (int s : {1, -1}) {
          const Letter l(g, s);
          if (!out[i].empty() && out[i].back().cancels(l)) continue;
          ReducedWord w = out[i];
          w.push_back(l);
          out.push_back(std::move(w));
        }
      }
    }
    begin = end;
  }
}

void enumerate_lattice(std::size_t k, std::int64_t budget, LatticeVector& cur, std::size_t i,
                       std::vector<LatticeVector>& out) {
  if (i == k) {
    out.push_back(cur);
    return;
  }
  for (std::int64_t x = -budget; x <= budget; ++x) {
    cur[i] = x;
    enumerate_lattice(k, budget - std::abs(x), cur, i + 1, out);
  }
  cur[i] = 0;
}

}  // namespace

std::vector<ExtElement> ball(const ActingGroup& A, int radius) {
  std::vector<ReducedWord> free_words;
  enumerate_words_upto(A.rank(), radius, free_words);
  std::vector<ExtElement> out;
  for (const auto& w : free_words) {
    const int rest = radius - static_cast<int>(w.size());
    if (A.kind() == ActingKind::IntLattice) {
      std::vector<LatticeVector> vs;
      LatticeVector cur(static_cast<std::size_t>(A.acting_rank()), 0);
      enumerate_lattice(cur.size(), rest, cur, 0, vs);
      for (auto& v : vs) out.push_back({w, std::move(v)});
    } else {
      std::vector<ReducedWord> ps;
      enumerate_words_upto(A.acting_rank(), rest, ps);
      for (auto& p : ps) out.push_back({w, std::move(p)});
    }
  }
  return out;
}

void check_semigroup_generation(const ActingGroup& A, const StepMeasure& mu, int radius, int max_product_length) {
  const auto targets = ball(A, radius);
  std::unordered_set<ExtElement, ExtElementHash> missing(targets.begin(), targets.end());
  std::unordered_set<ExtElement, ExtElementHash> seen;
  std::vector<ExtElement> frontier;
  for (const auto& a : mu.atoms()) {
    if (seen.insert(a.element).second) frontier.push_back(a.element);
    missing.erase(a.element);
  }
  // Products may leave the ball and come back, so the search keeps elements up
  // to gauge length radius * max_product_length.
  for (int len = 2; len <= max_product_length && !missing.empty(); ++len) {
    std::vector<ExtElement> next;
    for (const auto& g : frontier) {
      for (const auto& a : mu.atoms()) {
        ExtElement h = ext_multiply(A, g, a.element);
        if (seen.insert(h).second) {
          missing.erase(h);
          next.push_back(std::move(h));
        }
      }
    }
    frontier = std::move(next);
    if (seen.size() > 5'000'000) break;
  }
  if (!missing.empty())
    throw ConfigError("support of mu does not generate G as a semigroup: " + A.str(*missing.begin()) +
                      " is not a product of at most " + std::to_string(max_product_length) + " atoms");
}

PathKernel::PathKernel(const ActingGroup& A, const StepMeasure& mu, std::uint64_t seed, std::size_t max_image_length)
    : A_(&A), mu_(&mu), seed_(seed), max_image_length_(max_image_length) {
  for (const auto& atom : mu.atoms()) {
    const bool acts = !A.acting_is_identity(atom.element.p);
    atom_acts_.push_back(acts);
    atom_theta_.push_back(acts ? A.theta_of(atom.element.p).image() : std::vector<ReducedWord>{});
  }
}

PathState PathKernel::start() const { return PathState{A_->identity(), {}, true}; }

std::size_t PathKernel::draw(std::uint64_t path, std::uint64_t step) const {
  return mu_->sample(CounterRng(seed_, path).uniform(step));
}

void PathKernel::apply_atom(PathState& s, std::size_t j) const {
  const ExtElement& h = mu_->atoms()[j].element;
  if (!h.w.empty()) {
    if (s.theta_is_identity)
      s.x.w.append(h.w);
    else
      apply_table_into(s.theta, std::span<const Letter>(h.w.letters()), s.x.w);
  }
  if (!atom_acts_[j]) return;

  if (A_->kind() == ActingKind::IntLattice) {
    auto& v = std::get<LatticeVector>(s.x.p);
    const auto& q = std::get<LatticeVector>(h.p);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] += q[i];
  } else {
    std::get<ReducedWord>(s.x.p).append(std::get<ReducedWord>(h.p));
  }

  if (A_->acting_is_identity(s.x.p)) {
    s.theta.clear();
    s.theta_is_identity = true;
    return;
  }
  // Theta(p q) = Theta(p) o Theta(q).
  if (s.theta_is_identity) {
    s.theta = atom_theta_[j];
  } else {
    std::vector<ReducedWord> next;
    next.reserve(s.theta.size());
    for (const auto& img : atom_theta_[j]) {
      next.push_back(apply_table(s.theta, img));
      if (next.back().size() > max_image_length_)
        throw BudgetError("Theta(p) image exceeded " + std::to_string(max_image_length_) + " letters");
    }
    s.theta = std::move(next);
  }
  s.theta_is_identity = false;
}

namespace {

void check_storage(std::size_t n_paths, std::size_t n_steps, StorageMode mode) {
  if (mode == StorageMode::Full && static_cast<double>(n_paths) * static_cast<double>(n_steps + 1) > 5e7)
    throw BudgetError("full trajectory storage exceeds 5e7 positions; use summary mode");
}

}  // namespace

PathBatch sample_paths(const ActingGroup& A, const StepMeasure& mu, std::uint64_t seed, std::size_t n_paths,
                       std::size_t n_steps, StorageMode mode) {
  check_storage(n_paths, n_steps, mode);
  PathBatch batch{seed, n_paths, n_steps, mode, {}, {}};
  batch.final_positions.assign(n_paths, A.identity());
  if (mode == StorageMode::Full) batch.trajectories.assign(n_paths, {});
  const PathKernel kernel(A, mu, seed);

  parallel_for(n_paths, [&](std::size_t i) {
    PathState s = kernel.start();
    if (mode == StorageMode::Full) {
      auto& traj = batch.trajectories[i];
      traj.reserve(n_steps + 1);
      traj.push_back(s.x);
    }
    for (std::size_t n = 1; n <= n_steps; ++n) {
      kernel.advance(s, i, n);
      if (mode == StorageMode::Full) batch.trajectories[i].push_back(s.x);
    }
    batch.final_positions[i] = std::move(s.x);
  });
  return batch;
}

namespace reference {

PathBatch sample_paths(const ActingGroup& A, const StepMeasure& mu, std::uint64_t seed, std::size_t n_paths,
                       std::size_t n_steps, StorageMode mode) {
  check_storage(n_paths, n_steps, mode);
  PathBatch batch{seed, n_paths, n_steps, mode, {}, {}};
  for (std::size_t i = 0; i < n_paths; ++i) {
    const CounterRng rng(seed, i);
    ExtElement x = A.identity();
    std::vector<ExtElement> traj;
    if (mode == StorageMode::Full) traj.push_back(x);
    for (std::size_t n = 1; n <= n_steps; ++n) {
      x = ext_multiply(A, x, mu.atoms()[mu.sample(rng.uniform(n))].element);
      if (mode == StorageMode::Full) traj.push_back(x);
    }
    batch.final_positions.push_back(x);
    if (mode == StorageMode::Full) batch.trajectories.push_back(std::move(traj));
  }
  return batch;
}

}  // namespace reference

double first_moment(const ActingGroup& A, const StepMeasure& mu) {
  double s = 0.0;
  for (const auto& a : mu.atoms()) s += a.weight * static_cast<double>(gauge_length(A, a.element));
  return s;
}

double log_moment(const ActingGroup& A, const StepMeasure& mu) {
  double s = 0.0;
  for (const auto& a : mu.atoms()) s += a.weight * std::log1p(static_cast<double>(gauge_length(A, a.element)));
  return s;
}

double entropy(const StepMeasure& mu) {
  double s = 0.0;
  for (const auto& a : mu.atoms()) s -= a.weight * std::log(a.weight);
  return s;
}

Estimate drift_estimate(const ActingGroup& A, const PathBatch& batch) {
  if (batch.n_steps == 0 || batch.final_positions.empty()) throw ConfigError("drift needs at least one path and step");
  const double n = static_cast<double>(batch.n_steps);
  double sum = 0.0, sum_sq = 0.0;
  for (const auto& x : batch.final_positions) {
    const double r = static_cast<double>(gauge_length(A, x)) / n;
    sum += r;
    sum_sq += r * r;
  }
  const double m = static_cast<double>(batch.final_positions.size());
  Estimate e;
  e.value = sum / m;
  const double var = m > 1 ? std::max(0.0, (sum_sq - m * e.value * e.value) / (m - 1)) : 0.0;
  e.std_error = std::sqrt(var / m);
  return e;
}

EntropyRateEstimate asymptotic_entropy_estimate(const ActingGroup& A, const StepMeasure& mu, std::uint64_t seed,
                                                std::size_t n_paths, const std::vector<std::size_t>& depths,
                                                std::uint64_t step_budget) {
  if (depths.empty() || n_paths < 2) throw ConfigError("entropy rate needs depths and at least two samples");
  std::uint64_t total = 0;
  for (auto n : depths) {
    if (n == 0) throw ConfigError("entropy depths must be positive");
    total += static_cast<std::uint64_t>(n) * n_paths;
  }
  if (total > step_budget) throw BudgetError("entropy estimate needs " + std::to_string(total) + " steps, over budget");

  EntropyRateEstimate out;
  for (auto n : depths) {
    const auto batch = sample_paths(A, mu, derive_seed(seed, n), n_paths, n);
    std::unordered_map<ExtElement, std::size_t, ExtElementHash> counts;
    counts.reserve(n_paths);
    for (const auto& x : batch.final_positions) ++counts[x];

    EntropyAtDepth d;
    d.n = n;
    d.samples = n_paths;
    d.distinct = counts.size();
    const double N = static_cast<double>(n_paths);
    std::size_t singletons = 0;
    for (const auto& [g, c] : counts) {
      const double p = static_cast<double>(c) / N;
      d.plugin -= p * std::log(p);
      if (c == 1) ++singletons;
    }
    d.corrected = d.plugin + (static_cast<double>(d.distinct) - 1.0) / (2.0 * N);
    d.coverage = 1.0 - static_cast<double>(singletons) / N;
    d.bias_flagged = d.coverage < 0.9;
    out.depths.push_back(d);
  }

  if (out.depths.size() == 1) {
    out.value = out.depths.front().corrected / static_cast<double>(out.depths.front().n);
    return out;
  }
  // y = value + slope / n by least squares.
  double mx = 0, my = 0;
  for (const auto& d : out.depths) {
    mx += 1.0 / static_cast<double>(d.n);
    my += d.corrected / static_cast<double>(d.n);
  }
  const double k = static_cast<double>(out.depths.size());
  mx /= k;
  my /= k;
  double sxx = 0, sxy = 0;
  for (const auto& d : out.depths) {
    const double x = 1.0 / static_cast<double>(d.n) - mx;
    sxx += x * x;
    sxy += x * (d.corrected / static_cast<double>(d.n) - my);
  }
  out.slope = sxx > 0 ? sxy / sxx : 0.0;
  out.value = my - out.slope * mx;
  return out;
}

}  // namespace walkbound
