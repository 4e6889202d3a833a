#include "walkbound/harmonic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>
#include <string>

#include "walkbound/error.hpp"
#include "walkbound/parallel.hpp"

namespace walkbound {

CylinderFunction::CylinderFunction(int rank, std::size_t depth, std::map<ReducedWord, double> values)
    : rank_(rank), depth_(depth), values_(std::move(values)) {
  for (const auto& [w, v] : values_) {
    if (w.rank() != rank_ || w.size() != depth_)
      throw ConfigError("cylinder function key " + w.str() + " does not have length " + std::to_string(depth_));
    if (!std::isfinite(v)) throw ConfigError("cylinder function values must be finite");
    sup_ = std::max(sup_, std::abs(v));
  }
}

CylinderFunction CylinderFunction::constant(int rank, double c) {
  return CylinderFunction(rank, 0, {{ReducedWord(rank), c}});
}

CylinderFunction CylinderFunction::indicator(const ReducedWord& cylinder) {
  return CylinderFunction(cylinder.rank(), cylinder.size(), {{cylinder, 1.0}});
}

CylinderFunction CylinderFunction::from_csv(int rank, std::istream& in) {
  std::map<ReducedWord, double> values;
  std::optional<std::size_t> depth;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw ConfigError("line " + std::to_string(line_no) + ": expected cylinder,value");
    const std::string key = line.substr(0, comma);
    const std::string val = line.substr(comma + 1);
    if (line_no == 1 && key == "cylinder") continue;
    ReducedWord w = ReducedWord::parse(rank, key);
    if (w.str() != key) throw ConfigError("line " + std::to_string(line_no) + ": cylinder " + key + " is not reduced");
    if (depth && *depth != w.size()) throw ConfigError("line " + std::to_string(line_no) + ": mixed cylinder lengths");
    depth = w.size();
    char* end = nullptr;
    const double v = std::strtod(val.c_str(), &end);
    if (val.empty() || end != val.c_str() + val.size())
      throw ConfigError("line " + std::to_string(line_no) + ": bad value '" + val + "'");
    values[w] = v;
  }
  if (!depth) throw ConfigError("cylinder function CSV has no rows");
  return CylinderFunction(rank, *depth, std::move(values));
}

double CylinderFunction::operator()(const ReducedWord& prefix) const {
  if (prefix.size() < depth_) throw ConfigError("prefix shorter than the cylinder function depth");
  auto it = values_.find(prefix.size() == depth_ ? prefix : prefix.prefix(depth_));
  return it == values_.end() ? 0.0 : it->second;
}

namespace {

std::map<ReducedWord, double> refine(const CylinderFunction& f, std::size_t depth) {
  std::map<ReducedWord, double> out;
  for (const auto& [w, v] : f.values()) {
    std::vector<ReducedWord> layer{w};
    for (std::size_t len = w.size(); len < depth; ++len) {
      std::vector<ReducedWord> next;
      for (const auto& u : layer) {
        for (int g = 1; g <= f.rank(); ++g) {
          for (int s : {1, -1}) {
            const Letter l(g, s);
            if (!u.empty() && u.back().cancels(l)) continue;
            ReducedWord x = u;
            x.push_back(l);
            next.push_back(std::move(x));
          }
        }
      }
      layer = std::move(next);
    }
    for (auto& u : layer) out[u] += v;
  }
  return out;
}

}  // namespace

CylinderFunction operator+(const CylinderFunction& a, const CylinderFunction& b) {
  if (a.rank() != b.rank()) throw RankMismatch("adding cylinder functions over different ranks");
  const std::size_t depth = std::max(a.depth(), b.depth());
  auto values = refine(a, depth);
  for (const auto& [w, v] : refine(b, depth)) values[w] += v;
  return CylinderFunction(a.rank(), depth, std::move(values));
}

BoundarySamples boundary_samples_from(const HittingResult& hitting) {
  return {hitting.distribution.rank(), hitting.distribution.depth(), hitting.prefixes};
}

namespace {

// Evaluates F(g . xi) for every sample, reusing Theta(p) across samples.
class TranslatedEvaluator {
 public:
  TranslatedEvaluator(const ActingGroup& A, const CylinderFunction& F, const ExtElement& g,
                      const BoundarySamples& samples)
      : F_(F), g_(g), need_(F.depth() + g.w.size()) {
    A.validate(g);
    if (samples.rank != A.rank()) throw RankMismatch("boundary samples over the wrong rank");
    if (samples.prefixes.empty()) throw ConfigError("no boundary samples");
    acts_ = !A.acting_is_identity(g.p);
    margin_ = acts_ ? default_margin(A, g.p) : 0;
    if (F.depth() > 0 && samples.depth < need_ + margin_)
      throw TruncationOverflow("boundary samples of depth " + std::to_string(samples.depth) + " cannot resolve " +
                               A.str(g) + " at depth " + std::to_string(F.depth()) + "; need " +
                               std::to_string(need_ + margin_));
    if (acts_) theta_ = A.theta_of(g.p).image();
  }

  double operator()(const ReducedWord& prefix) const {
    if (F_.depth() == 0) return F_(ReducedWord(F_.rank()));
    ReducedWord out = g_.w;
    if (acts_) {
      out.append(boundary_apply_prefix(theta_, prefix.prefix(need_ + margin_), need_));
    } else {
      out.append(prefix.prefix(need_));
    }
    out.truncate(F_.depth());
    return F_(out);
  }

 private:
  const CylinderFunction& F_;
  const ExtElement& g_;
  std::size_t need_;
  std::size_t margin_ = 0;
  bool acts_ = false;
  std::vector<ReducedWord> theta_;
};

Estimate mean_and_error(const std::vector<double>& xs) {
  const double n = static_cast<double>(xs.size());
  double sum = 0.0;
  for (double x : xs) sum += x;
  const double mean = sum / n;
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  Estimate e;
  e.value = mean;
  e.std_error = xs.size() > 1 ? std::sqrt(ss / (n - 1) / n) : 0.0;
  return e;
}

}  // namespace

Estimate poisson_eval(const ActingGroup& A, const CylinderFunction& F, const ExtElement& g,
                      const BoundarySamples& samples) {
  if (F.rank() != A.rank()) throw RankMismatch("cylinder function over the wrong rank");
  const TranslatedEvaluator eval(A, F, g, samples);
  std::vector<double> values;
  values.reserve(samples.prefixes.size());
  for (const auto& s : samples.prefixes) values.push_back(eval(s));
  return mean_and_error(values);
}

HarmonicityResidual harmonicity_residual(const ActingGroup& A, const StepMeasure& mu, const CylinderFunction& F,
                                         const BoundarySamples& samples, const std::vector<ExtElement>& test_set) {
  if (F.rank() != A.rank()) throw RankMismatch("cylinder function over the wrong rank");
  HarmonicityResidual out;
  out.per_element.resize(test_set.size());
  parallel_for(test_set.size(), [&](std::size_t t) {
    const ExtElement& g = test_set[t];
    const TranslatedEvaluator at_g(A, F, g, samples);
    std::vector<ExtElement> translates;
    for (const auto& a : mu.atoms()) translates.push_back(ext_multiply(A, g, a.element));
    std::vector<TranslatedEvaluator> at_gh;
    for (const auto& gh : translates) at_gh.emplace_back(A, F, gh, samples);

    std::vector<double> diffs;
    diffs.reserve(samples.prefixes.size());
    for (const auto& s : samples.prefixes) {
      double d = at_g(s);
      for (std::size_t j = 0; j < at_gh.size(); ++j) d -= mu.atoms()[j].weight * at_gh[j](s);
      diffs.push_back(d);
    }
    const Estimate e = mean_and_error(diffs);
    out.per_element[t] = {g, std::abs(e.value), e.std_error};
  });
  for (const auto& r : out.per_element) {
    out.max_residual = std::max(out.max_residual, r.residual);
    double z = 0.0;
    if (r.std_error > 0.0)
      z = r.residual / r.std_error;
    else if (r.residual > 1e-15)
      z = std::numeric_limits<double>::infinity();
    out.max_in_std_errors = std::max(out.max_in_std_errors, z);
  }
  return out;
}

}  // namespace walkbound
