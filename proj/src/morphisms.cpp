#include "walkbound/morphisms.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <sstream>

namespace walkbound {

namespace {

void check_table(int rank, const std::vector<ReducedWord>& table, const char* what) {
  if (table.size() != static_cast<std::size_t>(rank))
    throw ConfigError(std::string(what) + " table has " + std::to_string(table.size()) + " entries, expected " +
                      std::to_string(rank));
  for (const auto& w : table) {
    if (w.rank() != rank) throw RankMismatch(std::string(what) + " image over the wrong rank");
  }
}

bool fixes_generators(int rank, const std::vector<ReducedWord>& outer, const std::vector<ReducedWord>& inner) {
  for (int i = 1; i <= rank; ++i) {
    if (apply_table(outer, inner[static_cast<std::size_t>(i - 1)]) != ReducedWord::generator(rank, i)) return false;
  }
  return true;
}

}  // namespace

Automorphism::Automorphism(std::vector<ReducedWord> image, std::vector<ReducedWord> inverse_image)
    : rank_(image.empty() ? 0 : image.front().rank()),
      image_(std::move(image)),
      inverse_image_(std::move(inverse_image)) {
  check_table(rank_, image_, "image");
  check_table(rank_, inverse_image_, "inverse");
  if (!fixes_generators(rank_, image_, inverse_image_) || !fixes_generators(rank_, inverse_image_, image_))
    throw ConfigError("declared inverse does not invert the automorphism");
}

Automorphism::Automorphism(Unchecked, std::vector<ReducedWord> image, std::vector<ReducedWord> inverse_image)
    : rank_(image.empty() ? 0 : image.front().rank()),
      image_(std::move(image)),
      inverse_image_(std::move(inverse_image)) {}

Automorphism Automorphism::identity(int rank) {
  std::vector<ReducedWord> id;
  for (int i = 1; i <= rank; ++i) id.push_back(ReducedWord::generator(rank, i));
  return Automorphism(Unchecked{}, id, id);
}

Automorphism Automorphism::inner(const ReducedWord& g) {
  const int d = g.rank();
  const ReducedWord gi = invert(g);
  std::vector<ReducedWord> img, inv;
  for (int i = 1; i <= d; ++i) {
    const auto x = ReducedWord::generator(d, i);
    img.push_back(multiply(multiply(g, x), gi));
    inv.push_back(multiply(multiply(gi, x), g));
  }
  return Automorphism(Unchecked{}, std::move(img), std::move(inv));
}

Automorphism Automorphism::inverse() const { return Automorphism(Unchecked{}, inverse_image_, image_); }

bool Automorphism::is_identity() const {
  for (int i = 1; i <= rank_; ++i) {
    const auto& w = image_of(i);
    if (w.size() != 1 || w.front() != Letter(i, 1)) return false;
  }
  return true;
}

std::size_t Automorphism::max_image_length() const {
  std::size_t m = 0;
  for (const auto& w : image_) m = std::max(m, w.size());
  for (const auto& w : inverse_image_) m = std::max(m, w.size());
  return m;
}

void apply_table_into(const std::vector<ReducedWord>& table, std::span<const Letter> letters, ReducedWord& out) {
  for (Letter l : letters) {
    const auto& img = table[static_cast<std::size_t>(l.generator() - 1)].letters();
    if (l.sign() > 0) {
      out.append(std::span<const Letter>(img));
    } else {
      for (auto it = img.rbegin(); it != img.rend(); ++it) out.push_back(it->inverse());
    }
  }
}

ReducedWord apply_table(const std::vector<ReducedWord>& table, const ReducedWord& w) {
  const int rank = table.empty() ? w.rank() : table.front().rank();
  ReducedWord out(rank);
  apply_table_into(table, std::span<const Letter>(w.letters()), out);
  return out;
}

ReducedWord apply(const Automorphism& phi, const ReducedWord& w) {
  if (phi.rank() != w.rank()) throw RankMismatch("automorphism of F_" + std::to_string(phi.rank()) + " applied to a word over F_" + std::to_string(w.rank()));
  return apply_table(phi.image(), w);
}

Automorphism compose(const Automorphism& phi, const Automorphism& psi) {
  if (phi.rank() != psi.rank()) throw RankMismatch("composing automorphisms of different ranks");
  std::vector<ReducedWord> img, inv;
  img.reserve(static_cast<std::size_t>(phi.rank()));
  inv.reserve(static_cast<std::size_t>(phi.rank()));
  for (const auto& w : psi.image()) img.push_back(apply_table(phi.image(), w));
  for (const auto& w : phi.inverse_image()) inv.push_back(apply_table(psi.inverse_image(), w));
  return Automorphism(Automorphism::Unchecked{}, std::move(img), std::move(inv));
}

Automorphism power(const Automorphism& phi, std::int64_t k) {
  Automorphism base = k < 0 ? phi.inverse() : phi;
  std::uint64_t n = static_cast<std::uint64_t>(k < 0 ? -k : k);
  Automorphism result = Automorphism::identity(phi.rank());
  // Square-and-multiply; powers of one automorphism commute.
  while (n > 0) {
    if (n & 1U) result = compose(result, base);
    n >>= 1U;
    if (n > 0) base = compose(base, base);
  }
  return result;
}

InconclusiveGrowth::InconclusiveGrowth(double r2_poly, double r2_exp)
    : Error(ErrorKind::Convergence, [&] {
        std::ostringstream os;
        os << "growth classification inconclusive: R^2 polynomial " << r2_poly << ", exponential " << r2_exp;
        return os.str();
      }()),
      r2_polynomial(r2_poly),
      r2_exponential(r2_exp) {}

namespace {

struct LineFit {
  double slope = 0.0;
  double r2 = 0.0;
};

LineFit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  LineFit f;
  f.slope = sxy / sxx;
  f.r2 = syy == 0.0 ? 1.0 : (sxy * sxy) / (sxx * syy);
  return f;
}

}  // namespace

GrowthReport classify_growth(const Automorphism& phi, int max_iter, const GrowthOptions& opts) {
  if (max_iter < 8) throw ConfigError("classify_growth needs at least 8 iterations");
  const int d = phi.rank();
  GrowthReport report;
  report.per_generator_lengths.assign(static_cast<std::size_t>(d), {});

  std::vector<ReducedWord> current;
  for (int i = 1; i <= d; ++i) current.push_back(ReducedWord::generator(d, i));

  std::vector<double> lengths;
  int m = 0;
  for (;; ++m) {
    std::size_t worst = 0;
    for (int i = 0; i < d; ++i) {
      const auto len = cyclic_reduce(current[static_cast<std::size_t>(i)]).core.size();
      report.per_generator_lengths[static_cast<std::size_t>(i)].push_back(len);
      worst = std::max(worst, len);
    }
    lengths.push_back(static_cast<double>(worst));
    if (m == max_iter) break;

    std::size_t next_total = 0;
    for (const auto& w : current) {
      for (Letter l : w.letters()) next_total += phi.image_of(l.generator()).size();
    }
    if (next_total > opts.max_word_length) break;
    for (auto& w : current) w = apply(phi, w);
  }
  report.iterations_used = m;
  if (m < 8) throw BudgetError("iterates outgrew the word-length budget after " + std::to_string(m) + " steps");

  // Bounded orbit: nothing in the second half exceeds the first half.
  const auto half = lengths.begin() + static_cast<std::ptrdiff_t>(lengths.size() / 2);
  if (*std::max_element(half, lengths.end()) <= *std::max_element(lengths.begin(), half)) {
    report.kind = GrowthKind::Polynomial;
    report.degree_estimate = 0;
    report.r2_polynomial = report.r2_exponential = 1.0;
    return report;
  }

  std::vector<double> log_len, log_m, lin_m;
  for (std::size_t i = 0; i < lengths.size(); ++i) {
    log_len.push_back(std::log(lengths[i]));
    log_m.push_back(std::log(static_cast<double>(i) + 1.0));
    lin_m.push_back(static_cast<double>(i));
  }
  const LineFit poly = least_squares(log_m, log_len);
  const LineFit expo = least_squares(lin_m, log_len);
  report.r2_polynomial = poly.r2;
  report.r2_exponential = expo.r2;
  if (std::abs(poly.r2 - expo.r2) < opts.fit_gap) throw InconclusiveGrowth(poly.r2, expo.r2);
  if (poly.r2 > expo.r2) {
    report.kind = GrowthKind::Polynomial;
    report.degree_estimate = std::max(0, static_cast<int>(std::lround(poly.slope)));
  } else {
    report.kind = GrowthKind::Exponential;
    report.rate_estimate = expo.slope;
  }
  return report;
}

namespace {

void enumerate_words(int d, int max_len, std::vector<ReducedWord>& out) {
  std::vector<ReducedWord> frontier{ReducedWord(d)};
  for (int len = 1; len <= max_len; ++len) {
    std::vector<ReducedWord> next;
    for (const auto& w : frontier) {
      for (int g = 1; g <= d; ++g) {
        for (int s : {1, -1}) {
          Letter l(g, s);
          if (!w.empty() && w.back().cancels(l)) continue;
          ReducedWord x = w;
          x.push_back(l);
          next.push_back(std::move(x));
        }
      }
    }
    out.insert(out.end(), next.begin(), next.end());
    frontier = std::move(next);
  }
}

}  // namespace

CancellationBound cancellation_bound(const Automorphism& phi, int L, std::uint64_t max_pairs) {
  if (L < 1) throw ConfigError("cancellation_bound needs L >= 1");
  const int d = phi.rank();
  // Count before materializing anything.
  long double count = 0, layer = 2.0L * d;
  for (int len = 1; len <= L; ++len) {
    count += layer;
    layer *= (2.0L * d - 1);
  }
  if (count * count > static_cast<long double>(max_pairs))
    throw BudgetError("cancellation search at L=" + std::to_string(L) + " exceeds the pair budget");

  std::vector<ReducedWord> words;
  enumerate_words(d, L, words);
  std::vector<ReducedWord> images;
  std::vector<ReducedWord> inv_images;
  images.reserve(words.size());
  for (const auto& w : words) {
    images.push_back(apply(phi, w));
    inv_images.push_back(invert(images.back()));
  }

  CancellationBound out;
  out.search_length = L;
  for (std::size_t i = 0; i < words.size(); ++i) {
    const Letter last = words[i].back();
    for (std::size_t j = 0; j < words.size(); ++j) {
      if (last.cancels(words[j].front())) continue;
      const auto c = common_prefix_length(inv_images[i], images[j]);
      out.value = std::max(out.value, c);
    }
  }
  return out;
}

ReducedWord boundary_apply_prefix(const std::vector<ReducedWord>& table, const ReducedWord& ray_head,
                                  std::size_t depth) {
  ReducedWord image = apply_table(table, ray_head);
  if (image.size() < depth)
    throw TruncationOverflow("only " + std::to_string(image.size()) + " of " + std::to_string(depth) +
                             " letters survived cancellation; increase the margin");
  image.truncate(depth);
  return image;
}

ReducedWord boundary_apply(const Automorphism& phi, const BoundaryRay& r, std::size_t depth, std::size_t margin) {
  if (depth < 1) throw ConfigError("boundary_apply needs depth >= 1");
  if (r.rank() != phi.rank()) throw RankMismatch("ray and automorphism ranks differ");
  return boundary_apply_prefix(phi.image(), ray_prefix(r, depth + margin), depth);
}

std::size_t default_margin(const Automorphism& phi, std::int64_t k) {
  return static_cast<std::size_t>(std::llabs(k)) * phi.max_image_length() * 2;
}

}  // namespace walkbound
