#pragma once

// Run configuration: a line-based text format of dotted keys.
//
//   # comment
//   group.rank = 2
//   group.acting = "Z"              # none | Z | Z^k | free:k
//   group.theta = ["alpha"]
//   auto.alpha.b = "ab"             # missing generators map to themselves
//   auto.alpha.inv.b = "Ab"
//   measure.atoms = ["a|0", "A|0", "b|0", "B|0", "1|1", "1|-1"]
//   measure.weights = uniform       # or a list of numbers
//   run.seed = 7
//
// Values are bare tokens, double-quoted strings, or bracketed lists of either.
// Unknown and repeated keys are errors. See README for the full key list.

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "walkbound/boundary.hpp"
#include "walkbound/groups.hpp"
#include "walkbound/walk.hpp"

namespace walkbound {

struct AutomorphismSpec {
  // Word text per generator, normalized.
  std::vector<std::string> image;
  std::vector<std::string> inverse;
  friend bool operator==(const AutomorphismSpec&, const AutomorphismSpec&) = default;
};

struct RunConfig {
  int rank = 2;
  std::string acting = "none";
  std::vector<std::string> theta;
  std::map<std::string, AutomorphismSpec> automorphisms;

  std::vector<std::string> atoms;
  std::vector<double> weights;  // empty means uniform
  // Ball radius for the semigroup-generation check; 0 waives it.
  int generation_radius = 2;

  std::uint64_t seed = 1;
  std::size_t n_paths = 1000;
  std::size_t n_steps = 1000;
  std::size_t depth = 2;
  std::optional<std::size_t> margin;
  std::size_t burn_in = 0;
  std::size_t n_resample = 20000;
  std::size_t compare_depth = 0;
  int max_iter = 30;
  std::size_t step_budget = 100000;
  std::vector<std::size_t> depths{8, 12, 16};
  double unresolved_ceiling = 0.05;
  std::vector<std::string> probes;
  std::vector<std::int64_t> sublattice_moduli;
  std::vector<std::vector<int>> sublattice_perms;
  std::string growth_target;

  std::size_t horizon = 64;
  std::string tree_base = "1";
  // P_n = V(prefix step^n suffix), n = 1..horizon.
  std::string tree_prefix = "1";
  std::string tree_step = "b";
  std::string tree_suffix = "1";
  std::string tree_from = "1";
  std::string tree_to = "b";
  std::size_t tree_k_max = 12;
  int tree_max_power = 1;

  std::string harmonic_cylinder = "a";
  std::string harmonic_csv;
  int harmonic_radius = 2;
  std::vector<std::string> harmonic_eval;

  std::string output_path;
  std::string format = "json";

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

RunConfig parse_config(std::istream& in);
RunConfig parse_config_text(const std::string& text);
RunConfig load_config(const std::string& path);
// Every key in canonical order; reparses to an equal RunConfig.
std::string emit_config(const RunConfig& cfg);

// Group, measure and options built from a validated config. Kept on the heap
// so references handed to kernels stay valid.
struct Model {
  ActingGroup group;
  StepMeasure measure;
  std::optional<Sublattice> sublattice;
  std::vector<BoundaryRay> probes;
};

ActingGroup build_group(const RunConfig& cfg);
// Validates everything: automorphism inverses, commutation, weights, generation.
Model build_model(const RunConfig& cfg);
std::map<std::string, Automorphism> build_automorphisms(const RunConfig& cfg);

}  // namespace walkbound
