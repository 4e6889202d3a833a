#pragma once

// Semi-direct products G = F_d x|_theta P with P = Z^k or a free group F_k.
//
// Multiplication convention:
//   (w1, p1)(w2, p2) = (w1 * Theta(p1)(w2), p1 p2),
// where Theta(p) composes the theta-images along p. Equivalently (w, p) is
// w t^p with t w t^-1 = Theta(t)(w).

#include <cstdint>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "walkbound/morphisms.hpp"
#include "walkbound/words.hpp"

namespace walkbound {

using LatticeVector = std::vector<std::int64_t>;
using ActingPart = std::variant<LatticeVector, ReducedWord>;

struct ExtElement {
  ReducedWord w;
  ActingPart p;

  friend bool operator==(const ExtElement&, const ExtElement&) = default;
};

struct ExtElementHash {
  std::size_t operator()(const ExtElement& g) const noexcept;
};

enum class ActingKind { IntLattice, Free };

// Finite-index subgroup of the acting part.
//   IntLattice: p in L iff p_i = 0 mod moduli[i].
//   Free: p in L iff the permutation image of p (right action, generator i
//         acting by permutations[i]) is the identity.
struct Sublattice {
  std::vector<std::int64_t> moduli;
  std::vector<std::vector<int>> permutations;
};

class ActingGroup {
 public:
  ActingGroup(ActingKind kind, int rank, std::vector<Automorphism> theta);

  // F_d with trivial acting part (Z^0).
  static ActingGroup trivial(int rank);

  ActingKind kind() const { return kind_; }
  int rank() const { return rank_; }
  int acting_rank() const { return static_cast<int>(theta_.size()); }
  const std::vector<Automorphism>& theta() const { return theta_; }

  ExtElement identity() const;
  ExtElement embed(const ReducedWord& w) const;
  // The i-th acting generator (1-based) raised to sign +-1, with trivial free part.
  ExtElement acting_generator(int i, int sign = 1) const;

  // Theta(p) as an automorphism of F_d.
  Automorphism theta_of(const ActingPart& p) const;
  bool acting_is_identity(const ActingPart& p) const;

  ActingPart acting_multiply(const ActingPart& a, const ActingPart& b) const;
  ActingPart acting_inverse(const ActingPart& a) const;
  std::size_t acting_length(const ActingPart& p) const;

  void validate(const ExtElement& g) const;

  ExtElement parse(std::string_view text) const;
  std::string str(const ExtElement& g) const;
  std::string acting_str(const ActingPart& p) const;

 private:
  ActingKind kind_;
  int rank_;
  std::vector<Automorphism> theta_;
};

ExtElement ext_multiply(const ActingGroup& A, const ExtElement& g1, const ExtElement& g2);
ExtElement ext_inverse(const ActingGroup& A, const ExtElement& g);
std::size_t gauge_length(const ActingGroup& A, const ExtElement& g);

void validate_sublattice(const ActingGroup& A, const Sublattice& L);
bool acting_in_sublattice(const ActingGroup& A, const ActingPart& p, const Sublattice& L);
bool in_sublattice(const ActingGroup& A, const ExtElement& g, const Sublattice& L);

}  // namespace walkbound
