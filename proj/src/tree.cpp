#include "walkbound/tree.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <set>
#include <sstream>

#include "walkbound/error.hpp"

namespace walkbound {

namespace {

bool is_x1(Letter l) { return l.generator() == 1; }

Automorphism conjugation_by_x1(int rank) { return Automorphism::inner(ReducedWord::generator(rank, 1)); }

}  // namespace

CosetVertex CosetVertex::of(const ReducedWord& w) {
  std::size_t n = w.size();
  while (n > 0 && is_x1(w[n - 1])) --n;
  return CosetVertex(w.prefix(n));
}

InnerTree::InnerTree(int rank, std::size_t horizon)
    : rank_(rank), horizon_(horizon), alpha_(rank >= 2 ? conjugation_by_x1(rank) : Automorphism::identity(1)) {
  if (rank < 2) throw ConfigError("the inner-automorphism tree needs rank >= 2");
}

ActingGroup InnerTree::group() const { return ActingGroup(ActingKind::IntLattice, rank_, {alpha_}); }

CosetVertex InnerTree::vertex(const ReducedWord& w) const {
  if (w.rank() != rank_) throw RankMismatch("vertex word over F_" + std::to_string(w.rank()));
  auto v = CosetVertex::of(w);
  check_horizon(v);
  return v;
}

std::size_t InnerTree::depth(const CosetVertex& v) const {
  const auto& l = v.representative().letters();
  return static_cast<std::size_t>(std::count_if(l.begin(), l.end(), [](Letter x) { return !is_x1(x); }));
}

void InnerTree::check_horizon(const CosetVertex& v) const {
  if (depth(v) > horizon_)
    throw BudgetError(v.str() + " lies beyond the tree horizon " + std::to_string(horizon_));
}

std::vector<CosetVertex> InnerTree::ancestors(const CosetVertex& v) const {
  const auto& rep = v.representative();
  std::vector<CosetVertex> out{base()};
  for (std::size_t i = 0; i < rep.size(); ++i) {
    if (!is_x1(rep[i])) out.push_back(CosetVertex::of(rep.prefix(i + 1)));
  }
  return out;
}

bool InnerTree::adjacent(const CosetVertex& u, const CosetVertex& v) const { return distance(u, v) == 1; }

std::size_t InnerTree::distance(const CosetVertex& u, const CosetVertex& v) const { return geodesic(u, v).length(); }

TreeGeodesic InnerTree::geodesic(const CosetVertex& u, const CosetVertex& v) const {
  check_horizon(u);
  check_horizon(v);
  const auto au = ancestors(u);
  const auto av = ancestors(v);
  std::size_t common = 0;
  while (common < au.size() && common < av.size() && au[common] == av[common]) ++common;
  TreeGeodesic g;
  for (std::size_t i = au.size(); i-- > common - 1;) g.vertices.push_back(au[i]);
  for (std::size_t i = common; i < av.size(); ++i) g.vertices.push_back(av[i]);
  for (std::size_t j = 0; j + 1 < g.vertices.size(); ++j)
    g.edge_labels.push_back(exit_element(g.vertices[j], g.vertices[j + 1]));
  return g;
}

std::vector<CosetVertex> InnerTree::neighbors(const CosetVertex& v, int max_power) const {
  std::set<CosetVertex> out;
  for (int m = -max_power; m <= max_power; ++m) {
    for (int i = 2; i <= rank_; ++i) {
      for (int s : {1, -1}) {
        ReducedWord w = v.representative();
        for (int k = 0; k < std::abs(m); ++k) w.push_back(Letter(1, m < 0 ? -1 : 1));
        w.push_back(Letter(i, s));
        out.insert(CosetVertex::of(w));
      }
    }
  }
  return {out.begin(), out.end()};
}

ReducedWord InnerTree::exit_element(const CosetVertex& at, const CosetVertex& toward) const {
  if (at == toward) throw ConfigError("no direction from a vertex to itself");
  const auto a_at = ancestors(at);
  const auto a_to = ancestors(toward);
  std::size_t common = 0;
  while (common < a_at.size() && common < a_to.size() && a_at[common] == a_to[common]) ++common;
  if (common == a_at.size()) {
    // toward lies below `at`: the direction is the child on the way down, whose
    // representative is at . x_1^m . x_i^{+-1}.
    return a_to[common].representative();
  }
  // Direction toward the parent: drop the last (non-x_1) letter of at.
  const auto& rep = at.representative();
  return rep.prefix(rep.size() - 1);
}

CosetVertex InnerTree::act(const ReducedWord& w, const CosetVertex& v) const {
  return CosetVertex::of(multiply(w, v.representative()));
}

CosetVertex InnerTree::act_stable(const CosetVertex& v, std::int64_t k) const {
  ReducedWord x1k(rank_);
  for (std::int64_t i = 0; i < std::llabs(k); ++i) x1k.push_back(Letter(1, k < 0 ? -1 : 1));
  return act(x1k, v);
}

CosetVertex InnerTree::act(const ExtElement& g, const CosetVertex& v) const {
  const auto* p = std::get_if<LatticeVector>(&g.p);
  if (p == nullptr || p->size() != 1) throw ConfigError("tree action expects an element of F_d x| Z");
  return act(g.w, act_stable(v, p->front()));
}

CosetVertex InnerTree::vertex_along(const BoundaryRay& ray, std::size_t distance) const {
  if (distance > horizon_) throw BudgetError("distance beyond the tree horizon");
  if (distance == 0) return base();
  const auto& cyc = ray.cycle().letters();
  const bool cycle_moves = std::any_of(cyc.begin(), cyc.end(), [](Letter l) { return !is_x1(l); });
  const std::size_t max_letters = ray.head().size() + cyc.size() * (distance + 1);
  const ReducedWord prefix = ray_prefix(ray, max_letters);
  std::size_t seen = 0;
  for (std::size_t i = 0; i < prefix.size(); ++i) {
    if (!is_x1(prefix[i]) && ++seen == distance) return CosetVertex::of(prefix.prefix(i + 1));
  }
  (void)cycle_moves;
  throw ConfigError("ray " + ray.str() + " does not leave the vertex " + base().str() +
                    " far enough; it converges to a vertex stabilizer end");
}

LiminfResult InnerTree::liminf_observers(const CosetVertex& q, const std::vector<CosetVertex>& sequence) const {
  LiminfResult out;
  const std::size_t n = sequence.size();
  if (n < 4) return out;
  // stable[m] = common initial segment of [q, P_j] for all j >= m.
  std::vector<std::size_t> stable(n);
  std::vector<std::vector<CosetVertex>> paths;
  paths.reserve(n);
  for (const auto& p : sequence) paths.push_back(geodesic(q, p).vertices);
  std::size_t len = paths[n - 1].size();
  stable[n - 1] = len;
  for (std::size_t m = n - 1; m-- > 0;) {
    std::size_t c = 0;
    while (c < len && c < paths[m].size() && paths[m][c] == paths[n - 1][c]) ++c;
    len = c;
    stable[m] = len;
  }
  const std::size_t a = n / 4;
  const std::size_t b = n / 2;
  const std::size_t mid = (a + b) / 2;
  const auto& witness = paths[n - 1];
  if (stable[a] == stable[b]) {
    out.kind = LiminfKind::Vertex;
    out.stable_path.assign(witness.begin(), witness.begin() + static_cast<std::ptrdiff_t>(stable[b]));
  } else if (stable[a] < stable[mid] && stable[mid] < stable[b]) {
    out.kind = LiminfKind::Ray;
    out.stable_path.assign(witness.begin(), witness.begin() + static_cast<std::ptrdiff_t>(stable[b]));
  }
  return out;
}

std::vector<ReducedWord> InnerTree::strip_exit_points(const CosetVertex& b1, const CosetVertex& b2) const {
  std::vector<ReducedWord> out;
  if (b1 == b2) return out;
  const auto g = geodesic(b1, b2);
  std::set<ReducedWord> seen;
  auto add = [&](ReducedWord w) {
    if (seen.insert(w).second) out.push_back(std::move(w));
  };
  for (std::size_t j = 0; j < g.vertices.size(); ++j) {
    if (j > 0) add(exit_element(g.vertices[j], g.vertices[j - 1]));
    if (j + 1 < g.vertices.size()) add(g.edge_labels[j]);
  }
  return out;
}

std::string InnerTree::dot_ball(std::size_t radius, int max_power) const {
  std::ostringstream os;
  os << "graph inner_tree {\n";
  std::set<CosetVertex> seen{base()};
  std::deque<std::pair<CosetVertex, std::size_t>> queue{{base(), 0}};
  os << "  \"" << base().str() << "\";\n";
  while (!queue.empty()) {
    auto [v, d] = queue.front();
    queue.pop_front();
    if (d == radius) continue;
    for (const auto& u : neighbors(v, max_power)) {
      if (depth(u) < depth(v)) continue;  // parent edge already emitted
      if (!seen.insert(u).second) continue;
      os << "  \"" << v.str() << "\" -- \"" << u.str() << "\" [label=\"" << exit_element(v, u).str() << "\"];\n";
      queue.emplace_back(u, d + 1);
    }
  }
  os << "}\n";
  return os.str();
}

ReducedWord twisted_power(const ReducedWord& v, int k, const Automorphism& phi) {
  if (k < 1) throw ConfigError("twisted power needs k >= 1");
  const Automorphism inv = phi.inverse();
  ReducedWord out = v;
  for (int i = 1; i < k; ++i) out = multiply(v, apply(inv, out));
  return out;
}

StripProfile strip_growth_profile(const std::vector<ReducedWord>& strip, std::size_t k_max) {
  StripProfile out;
  std::set<ReducedWord> unique(strip.begin(), strip.end());
  for (std::size_t k = 1; k <= k_max; ++k) {
    out.counts.push_back(static_cast<std::size_t>(
        std::count_if(unique.begin(), unique.end(), [k](const ReducedWord& w) { return w.size() <= k; })));
  }
  if (k_max == 0) return out;
  double mx = 0, my = 0;
  for (std::size_t k = 1; k <= k_max; ++k) {
    mx += static_cast<double>(k);
    my += static_cast<double>(out.counts[k - 1]);
  }
  mx /= static_cast<double>(k_max);
  my /= static_cast<double>(k_max);
  double sxx = 0, sxy = 0;
  for (std::size_t k = 1; k <= k_max; ++k) {
    sxx += (static_cast<double>(k) - mx) * (static_cast<double>(k) - mx);
    sxy += (static_cast<double>(k) - mx) * (static_cast<double>(out.counts[k - 1]) - my);
  }
  out.slope = sxx > 0 ? sxy / sxx : 0.0;
  out.intercept = my - out.slope * mx;
  double worst_above = 0.0;
  for (std::size_t k = 1; k <= k_max; ++k) {
    const double r = static_cast<double>(out.counts[k - 1]) - (out.intercept + out.slope * static_cast<double>(k));
    out.max_residual = std::max(out.max_residual, std::abs(r));
    worst_above = std::max(worst_above, r);
  }
  // Shift the intercept so that counts <= A + B k everywhere.
  out.intercept += worst_above;
  for (std::size_t k = 1; k <= k_max; ++k) {
    if (static_cast<double>(out.counts[k - 1]) > out.intercept + out.slope * static_cast<double>(k) + 1e-9)
      out.bound_holds = false;
  }
  return out;
}

}  // namespace walkbound
