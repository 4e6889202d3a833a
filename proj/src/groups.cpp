#include "walkbound/groups.hpp"

#include <cstdlib>
#include <numeric>

#include "walkbound/error.hpp"

namespace walkbound {

ActingGroup::ActingGroup(ActingKind kind, int rank, std::vector<Automorphism> theta)
    : kind_(kind), rank_(rank), theta_(std::move(theta)) {
  if (rank_ < 1) throw ConfigError("free rank must be at least 1");
  for (const auto& phi : theta_) {
    if (phi.rank() != rank_) throw RankMismatch("theta image over F_" + std::to_string(phi.rank()));
  }
  if (kind_ == ActingKind::IntLattice) {
    // Equality of automorphisms is decided on generator images.
    for (std::size_t i = 0; i < theta_.size(); ++i) {
      for (std::size_t j = i + 1; j < theta_.size(); ++j) {
        if (compose(theta_[i], theta_[j]).image() != compose(theta_[j], theta_[i]).image())
          throw ConfigError("theta images " + std::to_string(i + 1) + " and " + std::to_string(j + 1) +
                            " do not commute; Z^k action is not well defined");
      }
    }
  } else if (theta_.empty()) {
    throw ConfigError("free acting group needs rank >= 1");
  }
}

ActingGroup ActingGroup::trivial(int rank) { return ActingGroup(ActingKind::IntLattice, rank, {}); }

ExtElement ActingGroup::identity() const {
  if (kind_ == ActingKind::IntLattice) return {ReducedWord(rank_), LatticeVector(theta_.size(), 0)};
  return {ReducedWord(rank_), ReducedWord(acting_rank())};
}

ExtElement ActingGroup::embed(const ReducedWord& w) const {
  if (w.rank() != rank_) throw RankMismatch("embedding a word over F_" + std::to_string(w.rank()));
  ExtElement g = identity();
  g.w = w;
  return g;
}

ExtElement ActingGroup::acting_generator(int i, int sign) const {
  if (i < 1 || i > acting_rank()) throw ConfigError("acting generator index out of range");
  ExtElement g = identity();
  if (kind_ == ActingKind::IntLattice)
    std::get<LatticeVector>(g.p)[static_cast<std::size_t>(i - 1)] = sign;
  else
    g.p = ReducedWord::generator(acting_rank(), i, sign);
  return g;
}

Automorphism ActingGroup::theta_of(const ActingPart& p) const {
  Automorphism out = Automorphism::identity(rank_);
  if (kind_ == ActingKind::IntLattice) {
    const auto& v = std::get<LatticeVector>(p);
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (v[i] != 0) out = compose(out, power(theta_[i], v[i]));
    }
  } else {
    for (Letter l : std::get<ReducedWord>(p).letters()) {
      const auto& phi = theta_[static_cast<std::size_t>(l.generator() - 1)];
      out = compose(out, l.sign() > 0 ? phi : phi.inverse());
    }
  }
  return out;
}

bool ActingGroup::acting_is_identity(const ActingPart& p) const {
  if (kind_ == ActingKind::IntLattice) {
    const auto& v = std::get<LatticeVector>(p);
    return std::all_of(v.begin(), v.end(), [](std::int64_t x) { return x == 0; });
  }
  return std::get<ReducedWord>(p).empty();
}

ActingPart ActingGroup::acting_multiply(const ActingPart& a, const ActingPart& b) const {
  if (a.index() != b.index()) throw RankMismatch("acting parts of different kinds");
  if (kind_ == ActingKind::IntLattice) {
    const auto& x = std::get<LatticeVector>(a);
    const auto& y = std::get<LatticeVector>(b);
    if (x.size() != y.size()) throw RankMismatch("lattice vectors of different lengths");
    LatticeVector z(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) z[i] = x[i] + y[i];
    return z;
  }
  return multiply(std::get<ReducedWord>(a), std::get<ReducedWord>(b));
}

ActingPart ActingGroup::acting_inverse(const ActingPart& a) const {
  if (kind_ == ActingKind::IntLattice) {
    LatticeVector z = std::get<LatticeVector>(a);
    for (auto& x : z) x = -x;
    return z;
  }
  return invert(std::get<ReducedWord>(a));
}

std::size_t ActingGroup::acting_length(const ActingPart& p) const {
  if (kind_ == ActingKind::IntLattice) {
    std::size_t n = 0;
    for (auto x : std::get<LatticeVector>(p)) n += static_cast<std::size_t>(std::llabs(x));
    return n;
  }
  return std::get<ReducedWord>(p).size();
}

void ActingGroup::validate(const ExtElement& g) const {
  if (g.w.rank() != rank_) throw RankMismatch("free part over F_" + std::to_string(g.w.rank()));
  if (kind_ == ActingKind::IntLattice) {
    const auto* v = std::get_if<LatticeVector>(&g.p);
    if (v == nullptr || v->size() != theta_.size()) throw RankMismatch("acting part is not a Z^k vector of the right length");
  } else {
    const auto* v = std::get_if<ReducedWord>(&g.p);
    if (v == nullptr || v->rank() != acting_rank()) throw RankMismatch("acting part is not a word over the acting free group");
  }
}

ExtElement ActingGroup::parse(std::string_view text) const {
  const auto bar = text.find('|');
  ExtElement g = identity();
  g.w = ReducedWord::parse(rank_, text.substr(0, bar));
  if (bar == std::string_view::npos) return g;
  std::string_view rest = text.substr(bar + 1);
  if (kind_ == ActingKind::Free) {
    g.p = ReducedWord::parse(acting_rank(), rest);
    return g;
  }
  LatticeVector v;
  std::size_t start = 0;
  while (start <= rest.size()) {
    const auto comma = rest.find(',', start);
    const std::string part(rest.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
    char* end = nullptr;
    const long long x = std::strtoll(part.c_str(), &end, 10);
    if (part.empty() || end != part.c_str() + part.size())
      throw ConfigError("bad lattice coordinate '" + part + "' in " + std::string(text));
    v.push_back(x);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  if (v.size() != theta_.size())
    throw ConfigError("element " + std::string(text) + " has " + std::to_string(v.size()) + " acting coordinates, expected " +
                      std::to_string(theta_.size()));
  g.p = std::move(v);
  return g;
}

std::string ActingGroup::acting_str(const ActingPart& p) const {
  if (kind_ == ActingKind::Free) return std::get<ReducedWord>(p).str();
  std::string s;
  for (auto x : std::get<LatticeVector>(p)) {
    if (!s.empty()) s += ',';
    s += std::to_string(x);
  }
  return s;
}

std::string ActingGroup::str(const ExtElement& g) const {
  if (kind_ == ActingKind::IntLattice && theta_.empty()) return g.w.str();
  return g.w.str() + "|" + acting_str(g.p);
}

ExtElement ext_multiply(const ActingGroup& A, const ExtElement& g1, const ExtElement& g2) {
  A.validate(g1);
  A.validate(g2);
  ExtElement out;
  out.w = g1.w;
  if (A.acting_is_identity(g1.p))
    out.w.append(g2.w);
  else
    out.w.append(apply(A.theta_of(g1.p), g2.w));
  out.p = A.acting_multiply(g1.p, g2.p);
  return out;
}

ExtElement ext_inverse(const ActingGroup& A, const ExtElement& g) {
  A.validate(g);
  ExtElement out;
  out.p = A.acting_inverse(g.p);
  out.w = apply(A.theta_of(out.p), invert(g.w));
  return out;
}

std::size_t gauge_length(const ActingGroup& A, const ExtElement& g) { return g.w.size() + A.acting_length(g.p); }

void validate_sublattice(const ActingGroup& A, const Sublattice& L) {
  if (A.kind() == ActingKind::IntLattice) {
    if (L.moduli.size() != static_cast<std::size_t>(A.acting_rank()))
      throw ConfigError("sublattice needs one modulus per acting generator");
    for (auto m : L.moduli) {
      if (m < 1) throw ConfigError("sublattice moduli must be positive");
    }
    return;
  }
  if (L.permutations.size() != static_cast<std::size_t>(A.acting_rank()))
    throw ConfigError("sublattice needs one permutation per acting generator");
  const std::size_t n = L.permutations.front().size();
  for (const auto& perm : L.permutations) {
    if (perm.size() != n || n == 0) throw ConfigError("sublattice permutations must share a nonzero degree");
    std::vector<bool> seen(n, false);
    for (int x : perm) {
      if (x < 0 || static_cast<std::size_t>(x) >= n || seen[static_cast<std::size_t>(x)])
        throw ConfigError("sublattice generator image is not a permutation");
      seen[static_cast<std::size_t>(x)] = true;
    }
  }
}

bool acting_in_sublattice(const ActingGroup& A, const ActingPart& p, const Sublattice& L) {
  if (A.kind() == ActingKind::IntLattice) {
    const auto& v = std::get<LatticeVector>(p);
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (v[i] % L.moduli[i] != 0) return false;
    }
    return true;
  }
  const std::size_t n = L.permutations.front().size();
  std::vector<int> point(n);
  std::iota(point.begin(), point.end(), 0);
  for (Letter l : std::get<ReducedWord>(p).letters()) {
    const auto& perm = L.permutations[static_cast<std::size_t>(l.generator() - 1)];
    std::vector<int> next(n);
    for (std::size_t x = 0; x < n; ++x) {
      if (l.sign() > 0) {
        next[x] = perm[static_cast<std::size_t>(point[x])];
      } else {
        // inverse permutation
        for (std::size_t y = 0; y < n; ++y) {
          if (perm[y] == point[x]) next[x] = static_cast<int>(y);
        }
      }
    }
    point = std::move(next);
  }
  for (std::size_t x = 0; x < n; ++x) {
    if (point[x] != static_cast<int>(x)) return false;
  }
  return true;
}

bool in_sublattice(const ActingGroup& A, const ExtElement& g, const Sublattice& L) {
  A.validate(g);
  validate_sublattice(A, L);
  return acting_in_sublattice(A, g.p, L);
}

std::size_t ExtElementHash::operator()(const ExtElement& g) const noexcept {
  std::size_t h = WordHash{}(g.w);
  if (const auto* v = std::get_if<LatticeVector>(&g.p)) {
    for (auto x : *v) h = h * 0x9E3779B97F4A7C15ULL + static_cast<std::size_t>(x) + 0x7f4a7c15ULL;
  } else {
    h ^= WordHash{}(std::get<ReducedWord>(g.p)) * 0x9E3779B97F4A7C15ULL;
  }
  return h;
}

}  // namespace walkbound
