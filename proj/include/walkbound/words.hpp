#pragma once

// Reduced words in the free group F_d on generators x_1..x_d.
//
// Text encoding: 'a'..'z' are x_1..x_26, 'A'..'Z' their inverses, and the
// empty word is written "1".

#include <cstdint>
#include <functional>
#include <initializer_list>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace walkbound {

// A generator or its inverse, stored as +i / -i.
class Letter {
 public:
  constexpr Letter() = default;
  constexpr Letter(int generator, int sign)
      : code_(static_cast<std::int16_t>(sign < 0 ? -generator : generator)) {}
  static constexpr Letter from_code(int code) {
    Letter l;
    l.code_ = static_cast<std::int16_t>(code);
    return l;
  }

  constexpr int generator() const { return code_ < 0 ? -code_ : code_; }
  constexpr int sign() const { return code_ < 0 ? -1 : 1; }
  constexpr int code() const { return code_; }
  constexpr Letter inverse() const { return from_code(-code_); }
  constexpr bool cancels(Letter other) const { return code_ == -other.code_; }

  constexpr friend bool operator==(Letter, Letter) = default;
  constexpr friend auto operator<=>(Letter, Letter) = default;

  char to_char() const;
  static Letter from_char(char c);

 private:
  std::int16_t code_ = 0;
};

class ReducedWord {
 public:
  explicit ReducedWord(int rank = 0) : rank_(rank) {}
  // Reduces the supplied letters; throws ConfigError on out-of-range generators.
  ReducedWord(int rank, std::span<const Letter> letters);
  ReducedWord(int rank, std::initializer_list<int> codes);

  static ReducedWord parse(int rank, std::string_view text);
  static ReducedWord generator(int rank, int index, int sign = 1);

  int rank() const { return rank_; }
  std::size_t size() const { return letters_.size(); }
  bool empty() const { return letters_.empty(); }
  const std::vector<Letter>& letters() const { return letters_; }
  Letter operator[](std::size_t i) const { return letters_[i]; }
  Letter front() const { return letters_.front(); }
  Letter back() const { return letters_.back(); }

  // In-place right multiplication; the word stays reduced.
  void push_back(Letter l);
  void append(const ReducedWord& v);
  void append(std::span<const Letter> letters);
  // Drops letters beyond the first n.
  void truncate(std::size_t n);

  ReducedWord prefix(std::size_t n) const;
  ReducedWord suffix_from(std::size_t start) const;

  std::string str() const;

  friend bool operator==(const ReducedWord&, const ReducedWord&) = default;
  friend auto operator<=>(const ReducedWord& a, const ReducedWord& b) {
    if (auto c = a.letters_.size() <=> b.letters_.size(); c != 0) return c;
    return a.letters_ <=> b.letters_;
  }

 private:
  int rank_;
  std::vector<Letter> letters_;
};

void check_same_rank(const ReducedWord& u, const ReducedWord& v);

ReducedWord multiply(const ReducedWord& u, const ReducedWord& v);
ReducedWord invert(const ReducedWord& w);

// Number of letters cancelled when forming u*v.
std::size_t cancellation(const ReducedWord& u, const ReducedWord& v);

struct CyclicReduction {
  ReducedWord core;
  ReducedWord conjugator;
};

// w = conjugator * core * conjugator^-1 with core cyclically reduced.
CyclicReduction cyclic_reduce(const ReducedWord& w);
bool is_cyclically_reduced(const ReducedWord& w);

std::size_t common_prefix_length(const ReducedWord& u, const ReducedWord& v);
std::size_t common_prefix_length(std::span<const Letter> u, std::span<const Letter> v);

// Eventually periodic boundary point head * cycle * cycle * ...
class BoundaryRay {
 public:
  BoundaryRay(ReducedWord head, ReducedWord cycle);

  // Text form "head(cycle)", e.g. "B(a)" or "(ab)".
  static BoundaryRay parse(int rank, std::string_view text);

  const ReducedWord& head() const { return head_; }
  const ReducedWord& cycle() const { return cycle_; }
  int rank() const { return head_.rank(); }
  std::string str() const;

  friend bool operator==(const BoundaryRay&, const BoundaryRay&) = default;

 private:
  ReducedWord head_;
  ReducedWord cycle_;
};

ReducedWord ray_prefix(const BoundaryRay& r, std::size_t k);

// Extends a finite word to a ray inside its cylinder by repeating the last
// letter. The empty word extends along x_1.
BoundaryRay extend_to_ray(const ReducedWord& prefix);

struct WordHash {
  std::size_t operator()(const ReducedWord& w) const noexcept;
};

}  // namespace walkbound
