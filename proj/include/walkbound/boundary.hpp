#pragma once

// The G-action on the boundary of F_d, empirical hitting measures on
// cylinders, stationarity residuals, convergence tracking and first-return
// sub-sampling.

#include <cstdint>
#include <map>
#include <optional>
#include <unordered_map>
#include <vector>

#include "walkbound/groups.hpp"
#include "walkbound/walk.hpp"

namespace walkbound {

// Margin policy |p| * (max theta image length) * 2 for the acting part p.
std::size_t default_margin(const ActingGroup& A, const ActingPart& p);

// First `depth` letters of g . r = w . Theta(p)(r).
ReducedWord act_on_ray(const ActingGroup& A, const ExtElement& g, const BoundaryRay& r, std::size_t depth,
                       std::optional<std::size_t> margin = std::nullopt);

// Translates a fixed set of rays by many group elements, caching Theta(p)(ray)
// prefixes per acting part. Not thread-safe; use one instance per worker.
class RayTranslator {
 public:
  RayTranslator(const ActingGroup& A, std::vector<BoundaryRay> rays, std::optional<std::size_t> margin = std::nullopt);

  const std::vector<BoundaryRay>& rays() const { return rays_; }
  ReducedWord translate(const ExtElement& g, std::size_t ray, std::size_t depth);
  // Length of the common prefix of {g . ray}, capped at depth.
  std::size_t common_prefix(const ExtElement& g, std::size_t depth);
  // The depth-letter prefix shared by all translated rays, if they agree that far.
  std::optional<ReducedWord> agreed_prefix(const ExtElement& g, std::size_t depth);

 private:
  struct Translated {
    std::size_t kept = 0;       // letters of w that survive
    std::size_t cancelled = 0;  // letters of the image consumed by w
    const ReducedWord* image = nullptr;
  };
  Translated translated(const ExtElement& g, std::size_t ray, std::size_t depth);
  const ReducedWord& image_prefix(const ActingPart& p, std::size_t ray, std::size_t need);

  const ActingGroup* A_;
  std::vector<BoundaryRay> rays_;
  std::optional<std::size_t> margin_;
  struct CacheEntry {
    std::vector<ReducedWord> images;
    std::vector<std::size_t> valid;
  };
  std::map<std::string, CacheEntry> cache_;
  std::vector<ReducedWord> identity_images_;
};

std::vector<BoundaryRay> default_probes(int rank);

class CylinderDistribution {
 public:
  CylinderDistribution(int rank, std::size_t depth) : rank_(rank), depth_(depth) {}
  // Normalizes the table; every key must be a reduced word of length depth.
  CylinderDistribution(int rank, std::size_t depth, std::map<ReducedWord, double> weights, std::size_t sample_count);
  static CylinderDistribution from_counts(int rank, std::size_t depth, const std::vector<ReducedWord>& prefixes);

  int rank() const { return rank_; }
  std::size_t depth() const { return depth_; }
  std::size_t sample_count() const { return sample_count_; }
  const std::map<ReducedWord, double>& table() const { return table_; }
  double mass(const ReducedWord& cylinder) const;
  // Mass of every cylinder of length k <= depth.
  CylinderDistribution marginal(std::size_t k) const;
  double max_mass() const;
  // Draws a cylinder from u in [0,1).
  const ReducedWord& sample(double u) const;
  // Throws if frequencies do not sum to 1 within 1e-9.
  void check_invariants() const;

 private:
  int rank_;
  std::size_t depth_;
  std::map<ReducedWord, double> table_;
  std::size_t sample_count_ = 0;
  std::vector<const ReducedWord*> keys_;
  std::vector<double> cumulative_;
  void build_sampler();
};

double total_variation(const CylinderDistribution& a, const CylinderDistribution& b);

struct HittingOptions {
  std::size_t depth = 2;
  std::vector<BoundaryRay> probes;
  std::optional<std::size_t> margin;
  std::optional<Sublattice> return_lattice;
  double unresolved_ceiling = 0.05;
};

struct HittingResult {
  CylinderDistribution distribution;
  std::size_t resolved = 0;
  std::size_t unresolved = 0;
  double unresolved_fraction = 0.0;
  // Resolved prefixes in path order (boundary samples for the Poisson formula).
  std::vector<ReducedWord> prefixes;
};

HittingResult empirical_hitting_measure(const ActingGroup& A, const StepMeasure& mu, std::uint64_t seed,
                                        std::size_t n_paths, std::size_t n_steps, const HittingOptions& opts);

// TV distance between lambda (marginal at compare_depth) and the law of g . xi,
// g ~ mu, xi ~ lambda extended to a ray. compare_depth 0 means lambda's depth.
double stationarity_residual(const ActingGroup& A, const CylinderDistribution& lambda, const StepMeasure& mu,
                             std::uint64_t seed, std::size_t n_resample, std::size_t compare_depth = 0,
                             std::optional<std::size_t> margin = std::nullopt);

struct TrackOptions {
  std::size_t depth = 64;
  std::vector<BoundaryRay> probes;
  std::optional<std::size_t> margin;
  std::size_t burn_in = 0;
  std::optional<Sublattice> return_lattice;
};

struct ConvergenceTrace {
  std::vector<BoundaryRay> probes;
  std::size_t depth = 0;
  // lengths[i][j] at steps[i][j]; with a return lattice only return times are recorded.
  std::vector<std::vector<std::uint32_t>> lengths;
  std::vector<std::vector<std::uint32_t>> steps;
  std::size_t overflow_steps = 0;
  double monotone_fraction = 0.0;
  double median_final = 0.0;
  double unresolved_fraction = 0.0;
};

ConvergenceTrace track_convergence(const ActingGroup& A, const StepMeasure& mu, std::uint64_t seed,
                                   std::size_t n_paths, std::size_t n_steps, const TrackOptions& opts);

struct FirstReturnResult {
  std::vector<ExtElement> samples;
  std::vector<std::size_t> return_times;
  std::size_t exhausted = 0;
  double exhausted_fraction = 0.0;
  double mean_return_time = 0.0;
  double mean_gauge_length = 0.0;
};

FirstReturnResult first_return_sampler(const ActingGroup& A, const StepMeasure& mu, const Sublattice& L,
                                       std::uint64_t seed, std::size_t n_samples, std::size_t step_budget,
                                       double exhausted_ceiling = 0.05);

}  // namespace walkbound
