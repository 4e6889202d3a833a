#include "walkbound/words.hpp"

#include <algorithm>

#include "walkbound/error.hpp"

namespace walkbound {

char Letter::to_char() const {
  const int g = generator();
  if (g < 1 || g > 26) throw ConfigError("generator index " + std::to_string(g) + " has no letter encoding");
  return static_cast<char>(sign() > 0 ? 'a' + g - 1 : 'A' + g - 1);
}

Letter Letter::from_char(char c) {
  if (c >= 'a' && c <= 'z') return Letter(c - 'a' + 1, 1);
  if (c >= 'A' && c <= 'Z') return Letter(c - 'A' + 1, -1);
  throw ConfigError(std::string("invalid letter '") + c + "'");
}

namespace {

void check_letter(int rank, Letter l) {
  if (l.code() == 0 || l.generator() > rank)
    throw ConfigError("letter out of range for rank " + std::to_string(rank));
}

}  // namespace

ReducedWord::ReducedWord(int rank, std::span<const Letter> letters) : rank_(rank) {
  letters_.reserve(letters.size());
  for (Letter l : letters) {
    check_letter(rank_, l);
    push_back(l);
  }
}

ReducedWord::ReducedWord(int rank, std::initializer_list<int> codes) : rank_(rank) {
  for (int c : codes) {
    Letter l = Letter::from_code(c);
    check_letter(rank_, l);
    push_back(l);
  }
}

ReducedWord ReducedWord::parse(int rank, std::string_view text) {
  ReducedWord w(rank);
  if (text == "1") return w;
  if (text.empty()) throw ConfigError("empty word literal; the identity is written \"1\"");
  for (char c : text) {
    Letter l = Letter::from_char(c);
    check_letter(rank, l);
    w.push_back(l);
  }
  return w;
}

ReducedWord ReducedWord::generator(int rank, int index, int sign) {
  ReducedWord w(rank);
  Letter l(index, sign);
  check_letter(rank, l);
  w.letters_.push_back(l);
  return w;
}

void ReducedWord::push_back(Letter l) {
  if (!letters_.empty() && letters_.back().cancels(l))
    letters_.pop_back();
  else
    letters_.push_back(l);
}

void ReducedWord::append(const ReducedWord& v) {
  check_same_rank(*this, v);
  append(std::span<const Letter>(v.letters_));
}

void ReducedWord::append(std::span<const Letter> letters) {
  std::size_t i = 0;
  while (i < letters.size() && !letters_.empty() && letters_.back().cancels(letters[i])) {
    letters_.pop_back();
    ++i;
  }
  letters_.insert(letters_.end(), letters.begin() + static_cast<std::ptrdiff_t>(i), letters.end());
}

void ReducedWord::truncate(std::size_t n) {
  if (n < letters_.size()) letters_.resize(n);
}

ReducedWord ReducedWord::prefix(std::size_t n) const {
  ReducedWord w(rank_);
  n = std::min(n, letters_.size());
  w.letters_.assign(letters_.begin(), letters_.begin() + static_cast<std::ptrdiff_t>(n));
  return w;
}

ReducedWord ReducedWord::suffix_from(std::size_t start) const {
  ReducedWord w(rank_);
  if (start < letters_.size())
    w.letters_.assign(letters_.begin() + static_cast<std::ptrdiff_t>(start), letters_.end());
  return w;
}

std::string ReducedWord::str() const {
  if (letters_.empty()) return "1";
  std::string s;
  s.reserve(letters_.size());
  for (Letter l : letters_) s.push_back(l.to_char());
  return s;
}

void check_same_rank(const ReducedWord& u, const ReducedWord& v) {
  if (u.rank() != v.rank())
    throw RankMismatch("words over F_" + std::to_string(u.rank()) + " and F_" + std::to_string(v.rank()));
}

ReducedWord multiply(const ReducedWord& u, const ReducedWord& v) {
  ReducedWord r = u;
  r.append(v);
  return r;
}

ReducedWord invert(const ReducedWord& w) {
  std::vector<Letter> out;
  out.reserve(w.size());
  for (auto it = w.letters().rbegin(); it != w.letters().rend(); ++it) out.push_back(it->inverse());
  return ReducedWord(w.rank(), out);
}

std::size_t cancellation(const ReducedWord& u, const ReducedWord& v) {
  check_same_rank(u, v);
  std::size_t c = 0;
  const auto& a = u.letters();
  const auto& b = v.letters();
  while (c < a.size() && c < b.size() && a[a.size() - 1 - c].cancels(b[c])) ++c;
  return c;
}

CyclicReduction cyclic_reduce(const ReducedWord& w) {
  const auto& l = w.letters();
  std::size_t i = 0;
  std::size_t j = l.size();
  while (j - i >= 2 && l[i].cancels(l[j - 1])) {
    ++i;
    --j;
  }
  CyclicReduction out{ReducedWord(w.rank()), w.prefix(i)};
  out.core = w.prefix(j).suffix_from(i);
  return out;
}

bool is_cyclically_reduced(const ReducedWord& w) {
  return w.size() < 2 || !w.front().cancels(w.back());
}

std::size_t common_prefix_length(std::span<const Letter> u, std::span<const Letter> v) {
  auto [iu, iv] = std::mismatch(u.begin(), u.end(), v.begin(), v.end());
  return static_cast<std::size_t>(iu - u.begin());
}

std::size_t common_prefix_length(const ReducedWord& u, const ReducedWord& v) {
  check_same_rank(u, v);
  return common_prefix_length(std::span<const Letter>(u.letters()), std::span<const Letter>(v.letters()));
}

BoundaryRay::BoundaryRay(ReducedWord head, ReducedWord cycle)
    : head_(std::move(head)), cycle_(std::move(cycle)) {
  check_same_rank(head_, cycle_);
  if (cycle_.empty()) throw ConfigError("boundary ray needs a nonempty cycle");
  if (!is_cyclically_reduced(cycle_)) throw ConfigError("ray cycle " + cycle_.str() + " is not cyclically reduced");
  if (!head_.empty() && head_.back().cancels(cycle_.front()))
    throw ConfigError("ray " + head_.str() + "(" + cycle_.str() + ") is not reduced at the junction");
}

BoundaryRay BoundaryRay::parse(int rank, std::string_view text) {
  const auto open = text.find('(');
  if (open == std::string_view::npos || text.back() != ')')
    throw ConfigError("ray literal must look like head(cycle): " + std::string(text));
  const auto head_text = text.substr(0, open);
  const auto cycle_text = text.substr(open + 1, text.size() - open - 2);
  ReducedWord head = head_text.empty() ? ReducedWord(rank) : ReducedWord::parse(rank, head_text);
  return BoundaryRay(std::move(head), ReducedWord::parse(rank, cycle_text));
}

std::string BoundaryRay::str() const {
  return (head_.empty() ? std::string() : head_.str()) + "(" + cycle_.str() + ")";
}

ReducedWord ray_prefix(const BoundaryRay& r, std::size_t k) {
  ReducedWord out = r.head().prefix(k);
  std::vector<Letter> tail;
  tail.reserve(k - out.size());
  const auto& cyc = r.cycle().letters();
  for (std::size_t i = out.size(); i < k; ++i) tail.push_back(cyc[(i - r.head().size()) % cyc.size()]);
  // Head and cycle junctions never cancel, so plain insertion keeps the word reduced.
  out.append(std::span<const Letter>(tail));
  return out;
}

BoundaryRay extend_to_ray(const ReducedWord& prefix) {
  if (prefix.empty()) return BoundaryRay(prefix, ReducedWord::generator(prefix.rank(), 1));
  ReducedWord cycle(prefix.rank());
  cycle.push_back(prefix.back());
  return BoundaryRay(prefix, cycle);
}

std::size_t WordHash::operator()(const ReducedWord& w) const noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL ^ static_cast<std::uint64_t>(w.rank());
  for (Letter l : w.letters()) {
    h ^= static_cast<std::uint16_t>(l.code());
    h *= 0x100000001b3ULL;
  }
  return static_cast<std::size_t>(h);
}

}  // namespace walkbound
