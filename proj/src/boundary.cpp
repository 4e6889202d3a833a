#include "walkbound/boundary.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "walkbound/error.hpp"
#include "walkbound/parallel.hpp"

namespace walkbound {

std::size_t default_margin(const ActingGroup& A, const ActingPart& p) {
  std::size_t longest = 0;
  for (const auto& phi : A.theta()) longest = std::max(longest, phi.max_image_length());
  return A.acting_length(p) * longest * 2;
}

RayTranslator::RayTranslator(const ActingGroup& A, std::vector<BoundaryRay> rays, std::optional<std::size_t> margin)
    : A_(&A), rays_(std::move(rays)), margin_(margin) {
  if (rays_.empty()) throw ConfigError("no rays to translate");
  for (const auto& r : rays_) {
    if (r.rank() != A.rank()) throw RankMismatch("probe ray over F_" + std::to_string(r.rank()));
  }
  identity_images_.assign(rays_.size(), ReducedWord(A.rank()));
}

const ReducedWord& RayTranslator::image_prefix(const ActingPart& p, std::size_t ray, std::size_t need) {
  const auto& r = rays_[ray];
  if (A_->acting_is_identity(p)) {
    auto& img = identity_images_[ray];
    if (img.size() < need) img = ray_prefix(r, std::max(need, 2 * img.size()));
    return img;
  }
  const std::string key = A_->acting_str(p);
  auto it = cache_.find(key);
  if (it == cache_.end()) {
    if (cache_.size() >= 4096) cache_.clear();
    it = cache_.emplace(key, CacheEntry{std::vector<ReducedWord>(rays_.size(), ReducedWord(A_->rank())),
                                        std::vector<std::size_t>(rays_.size(), 0)})
             .first;
  }
  auto& entry = it->second;
  if (entry.valid[ray] < need) {
    const std::size_t target = std::max(need, 2 * entry.valid[ray]);
    const std::size_t margin = margin_ ? *margin_ : default_margin(*A_, p);
    const Automorphism theta = A_->theta_of(p);
    entry.images[ray] = boundary_apply_prefix(theta.image(), ray_prefix(r, target + margin), target);
    entry.valid[ray] = target;
  }
  return entry.images[ray];
}

RayTranslator::Translated RayTranslator::translated(const ExtElement& g, std::size_t ray, std::size_t depth) {
  const auto& w = g.w.letters();
  std::size_t need = depth + 8;
  for (;;) {
    const ReducedWord& img = image_prefix(g.p, ray, need);
    std::size_t c = 0;
    while (c < w.size() && c < img.size() && w[w.size() - 1 - c].cancels(img[c])) ++c;
    const bool consumed = c == img.size();
    if (!consumed && (w.size() - c) + (img.size() - c) >= depth) return {w.size() - c, c, &img};
    need = 2 * std::max(need, img.size()) + depth;
  }
}

ReducedWord RayTranslator::translate(const ExtElement& g, std::size_t ray, std::size_t depth) {
  const auto t = translated(g, ray, depth);
  ReducedWord out = g.w.prefix(std::min(t.kept, depth));
  if (out.size() < depth) {
    const auto& img = t.image->letters();
    const auto from = img.begin() + static_cast<std::ptrdiff_t>(t.cancelled);
    out.append(std::span<const Letter>(&*from, depth - out.size()));
  }
  return out;
}

std::size_t RayTranslator::common_prefix(const ExtElement& g, std::size_t depth) {
  std::vector<Translated> ts;
  ts.reserve(rays_.size());
  std::size_t agreed = depth;
  for (std::size_t j = 0; j < rays_.size(); ++j) {
    ts.push_back(translated(g, j, depth));
    agreed = std::min(agreed, ts.back().kept);
  }
  // image_prefix may have reallocated earlier entries only for the same key and
  // ray, so pointers held in ts remain valid here.
  const auto letter = [&](const Translated& t, std::size_t i) {
    return i < t.kept ? g.w[i] : (*t.image)[t.cancelled + (i - t.kept)];
  };
  for (std::size_t i = agreed; i < depth; ++i) {
    const Letter first = letter(ts[0], i);
    for (std::size_t j = 1; j < ts.size(); ++j) {
      if (letter(ts[j], i) != first) return i;
    }
  }
  return depth;
}

std::optional<ReducedWord> RayTranslator::agreed_prefix(const ExtElement& g, std::size_t depth) {
  if (common_prefix(g, depth) < depth) return std::nullopt;
  return translate(g, 0, depth);
}

ReducedWord act_on_ray(const ActingGroup& A, const ExtElement& g, const BoundaryRay& r, std::size_t depth,
                       std::optional<std::size_t> margin) {
  A.validate(g);
  RayTranslator t(A, {r}, margin);
  return t.translate(g, 0, depth);
}

std::vector<BoundaryRay> default_probes(int rank) {
  const int g = rank >= 2 ? 2 : 1;
  return {BoundaryRay(ReducedWord(rank), ReducedWord::generator(rank, g, 1)),
          BoundaryRay(ReducedWord(rank), ReducedWord::generator(rank, g, -1))};
}

// ---------------------------------------------------------------------------
// CylinderDistribution

CylinderDistribution::CylinderDistribution(int rank, std::size_t depth, std::map<ReducedWord, double> weights,
                                           std::size_t sample_count)
    : rank_(rank), depth_(depth), sample_count_(sample_count) {
  double total = 0.0;
  for (const auto& [w, x] : weights) {
    if (w.rank() != rank || w.size() != depth) throw ConfigError("cylinder " + w.str() + " has the wrong length or rank");
    if (x < 0.0) throw ConfigError("negative cylinder weight");
    total += x;
  }
  if (total <= 0.0) throw ConfigError("cylinder distribution has no mass");
  for (auto& [w, x] : weights) {
    if (x > 0.0) table_.emplace(w, x / total);
  }
  build_sampler();
}

CylinderDistribution CylinderDistribution::from_counts(int rank, std::size_t depth,
                                                       const std::vector<ReducedWord>& prefixes) {
  std::map<ReducedWord, double> counts;
  for (const auto& w : prefixes) counts[w] += 1.0;
  return CylinderDistribution(rank, depth, std::move(counts), prefixes.size());
}

void CylinderDistribution::build_sampler() {
  keys_.clear();
  cumulative_.clear();
  double acc = 0.0;
  for (const auto& [w, x] : table_) {
    acc += x;
    keys_.push_back(&w);
    cumulative_.push_back(acc);
  }
}

double CylinderDistribution::mass(const ReducedWord& cylinder) const {
  if (cylinder.size() == depth_) {
    auto it = table_.find(cylinder);
    return it == table_.end() ? 0.0 : it->second;
  }
  if (cylinder.size() > depth_) throw ConfigError("cylinder deeper than the distribution");
  double m = 0.0;
  for (const auto& [w, x] : table_) {
    if (common_prefix_length(w, cylinder) == cylinder.size()) m += x;
  }
  return m;
}

CylinderDistribution CylinderDistribution::marginal(std::size_t k) const {
  if (k > depth_) throw ConfigError("marginal deeper than the distribution");
  std::map<ReducedWord, double> out;
  for (const auto& [w, x] : table_) out[w.prefix(k)] += x;
  return CylinderDistribution(rank_, k, std::move(out), sample_count_);
}

double CylinderDistribution::max_mass() const {
  double m = 0.0;
  for (const auto& [w, x] : table_) m = std::max(m, x);
  return m;
}

const ReducedWord& CylinderDistribution::sample(double u) const {
  if (keys_.empty()) throw ConfigError("sampling from an empty cylinder distribution");
  const double target = u * cumulative_.back();
  auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), target);
  if (it == cumulative_.end()) --it;
  return *keys_[static_cast<std::size_t>(it - cumulative_.begin())];
}

void CylinderDistribution::check_invariants() const {
  double total = 0.0;
  for (const auto& [w, x] : table_) {
    if (w.size() != depth_) throw ConfigError("cylinder of the wrong depth");
    total += x;
  }
  if (std::abs(total - 1.0) > 1e-9) throw ConfigError("cylinder frequencies sum to " + std::to_string(total));
}

double total_variation(const CylinderDistribution& a, const CylinderDistribution& b) {
  if (a.depth() != b.depth()) throw ConfigError("total variation between different depths");
  double s = 0.0;
  for (const auto& [w, x] : a.table()) s += std::abs(x - b.mass(w));
  for (const auto& [w, y] : b.table()) {
    if (a.table().find(w) == a.table().end()) s += y;
  }
  return 0.5 * s;
}

// ---------------------------------------------------------------------------
// Hitting measure

namespace {

std::vector<BoundaryRay> probes_or_default(const ActingGroup& A, const std::vector<BoundaryRay>& probes) {
  auto out = probes.empty() ? default_probes(A.rank()) : probes;
  if (out.size() < 2) throw ConfigError("need at least two probe rays");
  for (std::size_t i = 0; i < out.size(); ++i) {
    for (std::size_t j = i + 1; j < out.size(); ++j) {
      if (ray_prefix(out[i], 64) == ray_prefix(out[j], 64)) throw ConfigError("probe rays must be pairwise distinct");
    }
  }
  return out;
}

// Last step in [0, n_steps] whose acting part lies in L. Only the acting part
// is simulated; the free part does not influence it.
std::size_t last_return_time(const ActingGroup& A, const StepMeasure& mu, const PathKernel& kernel, std::size_t path,
                             std::size_t n_steps, const Sublattice& L) {
  ActingPart p = A.identity().p;
  std::size_t last = 0;
  for (std::size_t n = 1; n <= n_steps; ++n) {
    const auto& q = mu.atoms()[kernel.draw(path, n)].element.p;
    if (!A.acting_is_identity(q)) p = A.acting_multiply(p, q);
    if (acting_in_sublattice(A, p, L)) last = n;
  }
  return last;
}

}  // namespace

HittingResult empirical_hitting_measure(const ActingGroup& A, const StepMeasure& mu, std::uint64_t seed,
                                        std::size_t n_paths, std::size_t n_steps, const HittingOptions& opts) {
  if (opts.depth < 1) throw ConfigError("hitting depth must be at least 1");
  if (n_paths == 0) throw ConfigError("hitting measure needs at least one path");
  const auto probes = probes_or_default(A, opts.probes);
  if (opts.return_lattice) validate_sublattice(A, *opts.return_lattice);

  const PathKernel kernel(A, mu, seed);
  std::vector<std::optional<ReducedWord>> per_path(n_paths);
  parallel_for(n_paths, [&](std::size_t i) {
    const std::size_t stop =
        opts.return_lattice ? last_return_time(A, mu, kernel, i, n_steps, *opts.return_lattice) : n_steps;
    PathState s = kernel.start();
    for (std::size_t n = 1; n <= stop; ++n) kernel.advance(s, i, n);
    RayTranslator translator(A, probes, opts.margin);
    per_path[i] = translator.agreed_prefix(s.x, opts.depth);
  });

  std::vector<ReducedWord> prefixes;
  for (auto& p : per_path) {
    if (p) prefixes.push_back(std::move(*p));
  }
  const std::size_t unresolved = n_paths - prefixes.size();
  const double fraction = static_cast<double>(unresolved) / static_cast<double>(n_paths);
  if (fraction > opts.unresolved_ceiling || prefixes.empty())
    throw ConvergenceError("unresolved fraction " + std::to_string(fraction) + " exceeds ceiling " +
                           std::to_string(opts.unresolved_ceiling) + "; simulate more steps");

  HittingResult out{CylinderDistribution::from_counts(A.rank(), opts.depth, prefixes), prefixes.size(), unresolved,
                    fraction, std::move(prefixes)};
  out.distribution.check_invariants();
  return out;
}

double stationarity_residual(const ActingGroup& A, const CylinderDistribution& lambda, const StepMeasure& mu,
                             std::uint64_t seed, std::size_t n_resample, std::size_t compare_depth,
                             std::optional<std::size_t> margin) {
  if (compare_depth == 0) compare_depth = lambda.depth();
  if (compare_depth > lambda.depth()) throw ConfigError("compare depth exceeds the distribution depth");
  if (n_resample == 0) throw ConfigError("stationarity residual needs resamples");

  struct AtomAction {
    std::vector<ReducedWord> theta;
    std::size_t margin = 0;
  };
  std::vector<AtomAction> actions;
  for (const auto& a : mu.atoms()) {
    actions.push_back({A.theta_of(a.element.p).image(), margin ? *margin : default_margin(A, a.element.p)});
  }

  std::vector<ReducedWord> pushed(n_resample, ReducedWord(A.rank()));
  parallel_for(n_resample, [&](std::size_t i) {
    const CounterRng rng(seed, i);
    const ReducedWord& cyl = lambda.sample(rng.uniform(1));
    const std::size_t j = mu.sample(rng.uniform(2));
    const auto& g = mu.atoms()[j].element;
    const BoundaryRay xi = extend_to_ray(cyl);
    const std::size_t need = compare_depth + g.w.size();
    ReducedWord image = boundary_apply_prefix(actions[j].theta, ray_prefix(xi, need + actions[j].margin), need);
    ReducedWord out = g.w;
    out.append(image);
    out.truncate(compare_depth);
    pushed[i] = std::move(out);
  });

  const auto pushed_dist = CylinderDistribution::from_counts(A.rank(), compare_depth, pushed);
  return total_variation(lambda.marginal(compare_depth), pushed_dist);
}

// ---------------------------------------------------------------------------
// Convergence tracking

ConvergenceTrace track_convergence(const ActingGroup& A, const StepMeasure& mu, std::uint64_t seed,
                                   std::size_t n_paths, std::size_t n_steps, const TrackOptions& opts) {
  if (opts.depth < 1) throw ConfigError("tracking depth must be at least 1");
  ConvergenceTrace trace;
  trace.probes = probes_or_default(A, opts.probes);
  trace.depth = opts.depth;
  trace.lengths.assign(n_paths, {});
  trace.steps.assign(n_paths, {});
  if (opts.return_lattice) validate_sublattice(A, *opts.return_lattice);

  const PathKernel kernel(A, mu, seed);
  std::vector<std::size_t> overflows(n_paths, 0);
  parallel_for(n_paths, [&](std::size_t i) {
    RayTranslator translator(A, trace.probes, opts.margin);
    PathState s = kernel.start();
    auto& lengths = trace.lengths[i];
    auto& steps = trace.steps[i];
    for (std::size_t n = 1; n <= n_steps; ++n) {
      kernel.advance(s, i, n);
      if (opts.return_lattice && !acting_in_sublattice(A, s.x.p, *opts.return_lattice)) continue;
      std::uint32_t len = 0;
      try {
        len = static_cast<std::uint32_t>(translator.common_prefix(s.x, opts.depth));
      } catch (const TruncationOverflow&) {
        ++overflows[i];
      }
      lengths.push_back(len);
      steps.push_back(static_cast<std::uint32_t>(n));
    }
  });

  std::size_t monotone = 0;
  std::size_t unresolved = 0;
  std::vector<double> finals;
  for (std::size_t i = 0; i < n_paths; ++i) {
    trace.overflow_steps += overflows[i];
    const auto& lengths = trace.lengths[i];
    const auto& steps = trace.steps[i];
    bool ok = true;
    std::optional<std::uint32_t> prev;
    for (std::size_t j = 0; j < lengths.size(); ++j) {
      if (steps[j] < opts.burn_in) continue;
      if (prev && lengths[j] < *prev) {
        ok = false;
        break;
      }
      prev = lengths[j];
    }
    if (ok) ++monotone;
    const double last = lengths.empty() ? 0.0 : lengths.back();
    finals.push_back(last);
    if (last < static_cast<double>(opts.depth)) ++unresolved;
  }
  if (n_paths > 0) {
    trace.monotone_fraction = static_cast<double>(monotone) / static_cast<double>(n_paths);
    trace.unresolved_fraction = static_cast<double>(unresolved) / static_cast<double>(n_paths);
    std::sort(finals.begin(), finals.end());
    const std::size_t mid = finals.size() / 2;
    trace.median_final = finals.size() % 2 == 1 ? finals[mid] : 0.5 * (finals[mid - 1] + finals[mid]);
  }
  return trace;
}

// ---------------------------------------------------------------------------
// First return

FirstReturnResult first_return_sampler(const ActingGroup& A, const StepMeasure& mu, const Sublattice& L,
                                       std::uint64_t seed, std::size_t n_samples, std::size_t step_budget,
                                       double exhausted_ceiling) {
  validate_sublattice(A, L);
  if (n_samples == 0) throw ConfigError("first-return sampler needs samples");
  const PathKernel kernel(A, mu, seed);
  std::vector<std::optional<ExtElement>> found(n_samples);
  std::vector<std::size_t> times(n_samples, 0);
  parallel_for(n_samples, [&](std::size_t i) {
    PathState s = kernel.start();
    for (std::size_t n = 1; n <= step_budget; ++n) {
      kernel.advance(s, i, n);
      if (acting_in_sublattice(A, s.x.p, L)) {
        found[i] = std::move(s.x);
        times[i] = n;
        return;
      }
    }
  });

  FirstReturnResult out;
  double t_sum = 0.0, len_sum = 0.0;
  for (std::size_t i = 0; i < n_samples; ++i) {
    if (!found[i]) {
      ++out.exhausted;
      continue;
    }
    t_sum += static_cast<double>(times[i]);
    len_sum += static_cast<double>(gauge_length(A, *found[i]));
    out.samples.push_back(std::move(*found[i]));
    out.return_times.push_back(times[i]);
  }
  out.exhausted_fraction = static_cast<double>(out.exhausted) / static_cast<double>(n_samples);
  if (out.exhausted_fraction > exhausted_ceiling || out.samples.empty())
    throw BudgetError("step budget exhausted before return in " + std::to_string(out.exhausted) + " of " +
                      std::to_string(n_samples) + " samples");
  const double m = static_cast<double>(out.samples.size());
  out.mean_return_time = t_sum / m;
  out.mean_gauge_length = len_sum / m;
  return out;
}

}  // namespace walkbound
