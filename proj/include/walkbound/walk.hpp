#pragma once

// Step measures and random-walk simulation x_n = x_0 h_1 ... h_n with i.i.d.
// right increments h_i ~ mu.

#include <cstdint>
#include <vector>

#include "walkbound/groups.hpp"
#include "walkbound/rng.hpp"

namespace walkbound {

struct Atom {
  ExtElement element;
  double weight = 0.0;
};

class StepMeasure {
 public:
  // Validates weights (positive, summing to 1 within 1e-9) and distinctness.
  StepMeasure(const ActingGroup& A, std::vector<Atom> atoms);
  static StepMeasure uniform(const ActingGroup& A, const std::vector<ExtElement>& support);
  static StepMeasure point_mass(const ActingGroup& A, const ExtElement& g);

  const std::vector<Atom>& atoms() const { return atoms_; }
  std::size_t size() const { return atoms_.size(); }
  // Alias-method draw from a uniform u in [0, 1).
  std::size_t sample(double u) const;

 private:
  std::vector<Atom> atoms_;
  std::vector<double> alias_prob_;
  std::vector<std::size_t> alias_index_;
};

// Verifies that every element of gauge length <= radius is a product of at
// most max_product_length support elements. Throws ConfigError otherwise.
void check_semigroup_generation(const ActingGroup& A, const StepMeasure& mu, int radius, int max_product_length);

// Elements of gauge length <= radius.
std::vector<ExtElement> ball(const ActingGroup& A, int radius);

// Per-path simulation state. theta caches the generator table of Theta(p) so a
// step costs O(|Theta(p)(v)|) instead of recomputing Theta(p).
struct PathState {
  ExtElement x;
  std::vector<ReducedWord> theta;
  bool theta_is_identity = true;
};

class PathKernel {
 public:
  PathKernel(const ActingGroup& A, const StepMeasure& mu, std::uint64_t seed,
             std::size_t max_image_length = 5'000'000);

  const ActingGroup& group() const { return *A_; }
  const StepMeasure& measure() const { return *mu_; }

  PathState start() const;
  std::size_t draw(std::uint64_t path, std::uint64_t step) const;
  void apply_atom(PathState& s, std::size_t atom) const;
  // Draws and applies the increment for (path, step); step counts from 1.
  void advance(PathState& s, std::uint64_t path, std::uint64_t step) const {
    apply_atom(s, draw(path, step));
  }

 private:
  const ActingGroup* A_;
  const StepMeasure* mu_;
  std::uint64_t seed_;
  std::size_t max_image_length_;
  std::vector<std::vector<ReducedWord>> atom_theta_;
  std::vector<bool> atom_acts_;
};

enum class StorageMode { Full, Summary };

struct PathBatch {
  std::uint64_t seed = 0;
  std::size_t n_paths = 0;
  std::size_t n_steps = 0;
  StorageMode mode = StorageMode::Summary;
  std::vector<ExtElement> final_positions;
  // Full mode only: trajectories[i][n] = x_n for path i, n = 0..n_steps.
  std::vector<std::vector<ExtElement>> trajectories;
};

PathBatch sample_paths(const ActingGroup& A, const StepMeasure& mu, std::uint64_t seed, std::size_t n_paths,
                       std::size_t n_steps, StorageMode mode = StorageMode::Summary);

namespace reference {
// Serial simulation that multiplies with ext_multiply at every step. Uses the
// same random draws as the parallel kernel.
PathBatch sample_paths(const ActingGroup& A, const StepMeasure& mu, std::uint64_t seed, std::size_t n_paths,
                       std::size_t n_steps, StorageMode mode = StorageMode::Summary);
}  // namespace reference

double first_moment(const ActingGroup& A, const StepMeasure& mu);
double log_moment(const ActingGroup& A, const StepMeasure& mu);
double entropy(const StepMeasure& mu);

struct Estimate {
  double value = 0.0;
  double std_error = 0.0;
};

Estimate drift_estimate(const ActingGroup& A, const PathBatch& batch);

struct EntropyAtDepth {
  std::size_t n = 0;
  std::size_t samples = 0;
  std::size_t distinct = 0;
  double plugin = 0.0;
  // Miller-Madow corrected: plugin + (distinct - 1) / (2 samples).
  double corrected = 0.0;
  // Good-Turing coverage 1 - singletons / samples.
  double coverage = 0.0;
  bool bias_flagged = false;
};

struct EntropyRateEstimate {
  double value = 0.0;
  double slope = 0.0;
  std::vector<EntropyAtDepth> depths;
};

// Plug-in estimate of H(mu^{*n}) / n at each n, extrapolated linearly in 1/n.
EntropyRateEstimate asymptotic_entropy_estimate(const ActingGroup& A, const StepMeasure& mu, std::uint64_t seed,
                                                std::size_t n_paths, const std::vector<std::size_t>& depths,
                                                std::uint64_t step_budget = 200'000'000);

}  // namespace walkbound
