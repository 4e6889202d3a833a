#pragma once

// The simplicial F_d-tree of the inner automorphism alpha(x_i) = x_1 x_i x_1^-1.
//
// Vertices are cosets w<x_1>, named by the reduced representative with no
// trailing x_1^{+-1}. Each coset element w x_1^m and generator x_i (i >= 2,
// either sign) gives an edge to w x_1^m x_i^{+-1}<x_1>, so the tree is locally
// infinite. F_d acts on the left; the stable letter t acts by H with
// H(V(u)) = V(x_1 u), which satisfies H(w P) = alpha(w) H(P).

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "walkbound/groups.hpp"
#include "walkbound/words.hpp"

namespace walkbound {

class CosetVertex {
 public:
  // Canonical vertex of the coset w<x_1>.
  static CosetVertex of(const ReducedWord& w);

  const ReducedWord& representative() const { return rep_; }
  std::string str() const { return "V(" + (rep_.empty() ? std::string("1") : rep_.str()) + ")"; }

  friend bool operator==(const CosetVertex&, const CosetVertex&) = default;
  friend auto operator<=>(const CosetVertex& a, const CosetVertex& b) { return a.rep_ <=> b.rep_; }

 private:
  explicit CosetVertex(ReducedWord rep) : rep_(std::move(rep)) {}
  ReducedWord rep_;
};

struct TreeGeodesic {
  std::vector<CosetVertex> vertices;
  // edge_labels[j]: exit element at vertices[j] toward vertices[j + 1].
  std::vector<ReducedWord> edge_labels;
  std::size_t length() const { return edge_labels.size(); }
};

enum class LiminfKind { Vertex, Ray, Inconclusive };

struct LiminfResult {
  LiminfKind kind = LiminfKind::Inconclusive;
  // Vertex: the limit point. Ray: the stable path from Q so far.
  std::vector<CosetVertex> stable_path;
  const CosetVertex& endpoint() const { return stable_path.back(); }
};

struct StripProfile {
  std::vector<std::size_t> counts;  // counts[k-1] = |S intersect B_k|
  double intercept = 0.0;
  double slope = 0.0;
  double max_residual = 0.0;
  bool bound_holds = true;
};

class InnerTree {
 public:
  // horizon bounds the distance from the base vertex that operations accept.
  explicit InnerTree(int rank, std::size_t horizon = 64);

  int rank() const { return rank_; }
  std::size_t horizon() const { return horizon_; }
  const Automorphism& alpha() const { return alpha_; }
  // F_d x| Z with theta(t) = alpha.
  ActingGroup group() const;

  CosetVertex base() const { return CosetVertex::of(ReducedWord(rank_)); }
  CosetVertex vertex(const ReducedWord& w) const;
  std::size_t depth(const CosetVertex& v) const;
  bool adjacent(const CosetVertex& u, const CosetVertex& v) const;
  std::size_t distance(const CosetVertex& u, const CosetVertex& v) const;
  TreeGeodesic geodesic(const CosetVertex& u, const CosetVertex& v) const;
  // Neighbours u x_1^m x_i^{+-1}<x_1> with |m| <= max_power.
  std::vector<CosetVertex> neighbors(const CosetVertex& v, int max_power) const;

  // Exit element at `at` of the direction containing `toward` (at != toward).
  ReducedWord exit_element(const CosetVertex& at, const CosetVertex& toward) const;

  CosetVertex act(const ReducedWord& w, const CosetVertex& v) const;
  CosetVertex act_stable(const CosetVertex& v, std::int64_t k = 1) const;
  // (w, p) . V = w . H^p(V).
  CosetVertex act(const ExtElement& g, const CosetVertex& v) const;

  // Vertex at the given distance from the base along the ray; throws when the
  // ray has fewer non-x_1 letters in the materialized prefix.
  CosetVertex vertex_along(const BoundaryRay& ray, std::size_t distance) const;

  LiminfResult liminf_observers(const CosetVertex& q, const std::vector<CosetVertex>& sequence) const;
  std::vector<ReducedWord> strip_exit_points(const CosetVertex& b1, const CosetVertex& b2) const;

  // DOT graph of the ball of the given radius around the base, powers |m| <= max_power.
  std::string dot_ball(std::size_t radius, int max_power) const;

 private:
  void check_horizon(const CosetVertex& v) const;
  std::vector<CosetVertex> ancestors(const CosetVertex& v) const;  // base ... v

  int rank_;
  std::size_t horizon_;
  Automorphism alpha_;
};

// v * phi^-1(v) * ... * phi^{1-k}(v).
ReducedWord twisted_power(const ReducedWord& v, int k, const Automorphism& phi);

StripProfile strip_growth_profile(const std::vector<ReducedWord>& strip, std::size_t k_max);

}  // namespace walkbound
