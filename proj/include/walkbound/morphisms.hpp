#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "walkbound/error.hpp"
#include "walkbound/words.hpp"

namespace walkbound {

// An automorphism of F_d given by generator images, carrying an inverse table
// whose correctness is checked on construction.
class Automorphism {
 public:
  Automorphism(std::vector<ReducedWord> image, std::vector<ReducedWord> inverse_image);

  static Automorphism identity(int rank);
  // Conjugation x -> g x g^-1.
  static Automorphism inner(const ReducedWord& g);

  int rank() const { return rank_; }
  const std::vector<ReducedWord>& image() const { return image_; }
  const std::vector<ReducedWord>& inverse_image() const { return inverse_image_; }
  const ReducedWord& image_of(int generator) const { return image_[static_cast<std::size_t>(generator - 1)]; }

  Automorphism inverse() const;
  bool is_identity() const;
  std::size_t max_image_length() const;

  friend bool operator==(const Automorphism&, const Automorphism&) = default;

 private:
  struct Unchecked {};
  Automorphism(Unchecked, std::vector<ReducedWord> image, std::vector<ReducedWord> inverse_image);
  friend Automorphism compose(const Automorphism&, const Automorphism&);

  int rank_;
  std::vector<ReducedWord> image_;
  std::vector<ReducedWord> inverse_image_;
};

// Image of a word under a generator table (no inverse needed).
ReducedWord apply_table(const std::vector<ReducedWord>& table, const ReducedWord& w);
// Right-multiplies `out` by the image of `letters`, reducing as it goes.
void apply_table_into(const std::vector<ReducedWord>& table, std::span<const Letter> letters, ReducedWord& out);

ReducedWord apply(const Automorphism& phi, const ReducedWord& w);
// (phi o psi)(x) = phi(psi(x)).
Automorphism compose(const Automorphism& phi, const Automorphism& psi);
Automorphism power(const Automorphism& phi, std::int64_t k);

enum class GrowthKind { Polynomial, Exponential };

struct GrowthReport {
  GrowthKind kind = GrowthKind::Polynomial;
  int degree_estimate = 0;
  double rate_estimate = 0.0;
  int iterations_used = 0;
  // per_generator_lengths[i][m] = |core(phi^m(x_{i+1}))|.
  std::vector<std::vector<std::size_t>> per_generator_lengths;
  double r2_polynomial = 0.0;
  double r2_exponential = 0.0;
};

struct GrowthOptions {
  double fit_gap = 0.15;
  // Iteration stops early once an image would exceed this many letters.
  std::size_t max_word_length = 20'000'000;
};

class InconclusiveGrowth : public Error {
 public:
  InconclusiveGrowth(double r2_poly, double r2_exp);
  double r2_polynomial;
  double r2_exponential;
};

GrowthReport classify_growth(const Automorphism& phi, int max_iter, const GrowthOptions& opts = {});

struct CancellationBound {
  std::size_t value = 0;
  int search_length = 0;
};

// Exhaustive over reduced u*v with |u|,|v| <= L. Throws BudgetError when the
// number of pairs exceeds max_pairs.
CancellationBound cancellation_bound(const Automorphism& phi, int L, std::uint64_t max_pairs = 50'000'000);

// First `depth` letters of phi(r), computed from the first depth+margin letters of r.
ReducedWord boundary_apply(const Automorphism& phi, const BoundaryRay& r, std::size_t depth, std::size_t margin);
// Same, with the ray prefix already materialized (must hold depth+margin letters).
ReducedWord boundary_apply_prefix(const std::vector<ReducedWord>& table, const ReducedWord& ray_head,
                                  std::size_t depth);

// Margin policy for a k-th power: |k| * (max image length) * 2.
std::size_t default_margin(const Automorphism& phi, std::int64_t k);

}  // namespace walkbound
