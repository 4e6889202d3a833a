#pragma once

// Fixture groups and measures shared by the test binaries.

#include <string>
#include <vector>

#include "oracles.hpp"
#include "walkbound/boundary.hpp"
#include "walkbound/groups.hpp"
#include "walkbound/walk.hpp"

namespace fixture {

using namespace walkbound;

inline ReducedWord W(int rank, const std::string& s) { return ReducedWord::parse(rank, s); }

inline Automorphism make_auto(int rank, const std::vector<std::string>& image, const std::vector<std::string>& inverse) {
  std::vector<ReducedWord> im, iv;
  for (const auto& s : image) im.push_back(W(rank, s));
  for (const auto& s : inverse) iv.push_back(W(rank, s));
  return Automorphism(std::move(im), std::move(iv));
}

inline oracle::Subst subst(const std::vector<std::string>& image, const std::vector<std::string>& inverse) {
  auto strip = [](std::vector<std::string> v) {
    for (auto& s : v)
      if (s == "1") s.clear();
    return v;
  };
  return {strip(image), strip(inverse)};
}

// a -> a, b -> ab.
inline const std::vector<std::string> kLinear[2] = {{"a", "ab"}, {"a", "Ab"}};
// Conjugation by a.
inline const std::vector<std::string> kInnerA[2] = {{"a", "abA"}, {"a", "Aba"}};
// a -> ab, b -> a.
inline const std::vector<std::string> kFibonacci[2] = {{"ab", "a"}, {"b", "Ba"}};
// F_3 = <a,b,c>: alpha(c) = ca, beta(c) = cb.
inline const std::vector<std::string> kFreeAlpha[2] = {{"a", "b", "ca"}, {"a", "b", "cA"}};
inline const std::vector<std::string> kFreeBeta[2] = {{"a", "b", "cb"}, {"a", "b", "cB"}};
// F_4 = <a1,b1,a2,b2> = <a,b,c,d>: alpha_i(b_i) = b_i a_i.
inline const std::vector<std::string> kLattice1[2] = {{"a", "ba", "c", "d"}, {"a", "bA", "c", "d"}};
inline const std::vector<std::string> kLattice2[2] = {{"a", "b", "c", "dc"}, {"a", "b", "c", "dC"}};

inline Automorphism make_auto(int rank, const std::vector<std::string> (&t)[2]) { return make_auto(rank, t[0], t[1]); }
inline oracle::Subst subst(const std::vector<std::string> (&t)[2]) { return subst(t[0], t[1]); }

inline ActingGroup cyclic(const std::vector<std::string> (&t)[2]) {
  return ActingGroup(ActingKind::IntLattice, 2, {make_auto(2, t)});
}

inline ActingGroup srw_group() { return ActingGroup::trivial(2); }
inline ActingGroup linear_group() { return cyclic(kLinear); }
inline ActingGroup direct_group() { return cyclic(kInnerA); }
inline ActingGroup fibonacci_group() { return cyclic(kFibonacci); }
inline ActingGroup free_acting_group() {
  return ActingGroup(ActingKind::Free, 3, {make_auto(3, kFreeAlpha), make_auto(3, kFreeBeta)});
}
inline ActingGroup lattice_group() {
  return ActingGroup(ActingKind::IntLattice, 4, {make_auto(4, kLattice1), make_auto(4, kLattice2)});
}

// Uniform measure on the free generators, their inverses and the acting
// generators with their inverses.
inline StepMeasure standard_measure(const ActingGroup& A) {
  std::vector<ExtElement> support;
  for (int i = 1; i <= A.rank(); ++i)
    for (int s : {1, -1}) support.push_back(A.embed(ReducedWord::generator(A.rank(), i, s)));
  for (int i = 1; i <= A.acting_rank(); ++i)
    for (int s : {1, -1}) support.push_back(A.acting_generator(i, s));
  return StepMeasure::uniform(A, support);
}

inline ExtElement E(const ActingGroup& A, const std::string& text) { return A.parse(text); }

}  // namespace fixture
