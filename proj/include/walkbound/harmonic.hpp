#pragma once

// Harmonic functions through the Poisson formula f(g) = E[F(g . xi)], xi ~ lambda,
// for boundary functions F that depend on finitely many letters.

#include <istream>
#include <map>
#include <vector>

#include "walkbound/boundary.hpp"
#include "walkbound/groups.hpp"
#include "walkbound/walk.hpp"

namespace walkbound {

class CylinderFunction {
 public:
  // Cylinders missing from the table evaluate to 0.
  CylinderFunction(int rank, std::size_t depth, std::map<ReducedWord, double> values);

  static CylinderFunction constant(int rank, double c);
  static CylinderFunction indicator(const ReducedWord& cylinder);
  // Reads "cylinder,value" rows (header optional); all cylinders must share one length.
  static CylinderFunction from_csv(int rank, std::istream& in);

  int rank() const { return rank_; }
  std::size_t depth() const { return depth_; }
  double sup_bound() const { return sup_; }
  const std::map<ReducedWord, double>& values() const { return values_; }
  // Value on the cylinder given by the first depth() letters of prefix.
  double operator()(const ReducedWord& prefix) const;

  friend CylinderFunction operator+(const CylinderFunction& a, const CylinderFunction& b);

 private:
  int rank_;
  std::size_t depth_;
  std::map<ReducedWord, double> values_;
  double sup_ = 0.0;
};

// Boundary samples: depth-K prefixes of draws from lambda.
struct BoundarySamples {
  int rank = 0;
  std::size_t depth = 0;
  std::vector<ReducedWord> prefixes;
};

BoundarySamples boundary_samples_from(const HittingResult& hitting);

Estimate poisson_eval(const ActingGroup& A, const CylinderFunction& F, const ExtElement& g,
                      const BoundarySamples& samples);

struct ResidualAt {
  ExtElement g;
  double residual = 0.0;
  double std_error = 0.0;
};

struct HarmonicityResidual {
  double max_residual = 0.0;
  // Largest |f(g) - sum_h mu(h) f(gh)| / stderr over the test set.
  double max_in_std_errors = 0.0;
  std::vector<ResidualAt> per_element;
};

// Shared-sample residual of the mean-value property on test_set.
HarmonicityResidual harmonicity_residual(const ActingGroup& A, const StepMeasure& mu, const CylinderFunction& F,
                                         const BoundarySamples& samples, const std::vector<ExtElement>& test_set);

}  // namespace walkbound
