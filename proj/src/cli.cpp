#include "walkbound/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include <json.hpp>

#include "walkbound/boundary.hpp"
#include "walkbound/error.hpp"
#include "walkbound/harmonic.hpp"
#include "walkbound/morphisms.hpp"
#include "walkbound/tree.hpp"
#include "walkbound/walk.hpp"

namespace walkbound {

namespace {

using nlohmann::ordered_json;

// Resampling stream kept apart from the path stream.
constexpr std::uint64_t kResampleSalt = 0x5eed5eed5eed5eedULL;

std::string dump(const ordered_json& j) { return j.dump(2) + "\n"; }

void require_format(const RunConfig& cfg, std::initializer_list<const char*> allowed) {
  for (const char* f : allowed)
    if (cfg.format == f) return;
  throw ConfigError("format '" + cfg.format + "' is not available for this command");
}

HittingOptions hitting_options(const RunConfig& cfg, const Model& m) {
  HittingOptions o;
  o.depth = cfg.depth;
  o.probes = m.probes;
  o.margin = cfg.margin;
  o.return_lattice = m.sublattice;
  o.unresolved_ceiling = cfg.unresolved_ceiling;
  return o;
}

std::string cmd_walk(const RunConfig& cfg) {
  require_format(cfg, {"json", "csv"});
  const Model m = build_model(cfg);
  const auto mode = cfg.format == "csv" ? StorageMode::Full : StorageMode::Summary;
  const auto batch = sample_paths(m.group, m.measure, cfg.seed, cfg.n_paths, cfg.n_steps, mode);
  if (cfg.format == "csv") {
    std::ostringstream os;
    os << "path_id,step,w,p,gauge_length\n";
    for (std::size_t i = 0; i < batch.trajectories.size(); ++i) {
      const auto& path = batch.trajectories[i];
      for (std::size_t n = 0; n < path.size(); ++n) {
        os << i << ',' << n << ',' << path[n].w.str() << ',' << m.group.acting_str(path[n].p) << ','
           << gauge_length(m.group, path[n]) << '\n';
      }
    }
    return os.str();
  }
  const auto drift = drift_estimate(m.group, batch);
  ordered_json j;
  j["n_paths"] = cfg.n_paths;
  j["n_steps"] = cfg.n_steps;
  j["seed"] = cfg.seed;
  j["drift"] = drift.value;
  j["drift_stderr"] = drift.std_error;
  j["entropy"] = entropy(m.measure);
  j["log_moment"] = log_moment(m.group, m.measure);
  j["first_moment"] = first_moment(m.group, m.measure);
  return dump(j);
}

std::string cmd_hitting(const RunConfig& cfg) {
  require_format(cfg, {"json", "csv"});
  const Model m = build_model(cfg);
  const auto h = empirical_hitting_measure(m.group, m.measure, cfg.seed, cfg.n_paths, cfg.n_steps, hitting_options(cfg, m));
  if (cfg.format == "csv") {
    std::ostringstream os;
    os.precision(17);
    os << "cylinder,frequency\n";
    for (const auto& [w, f] : h.distribution.table()) os << w.str() << ',' << f << '\n';
    return os.str();
  }
  ordered_json j;
  j["depth"] = cfg.depth;
  j["resolved"] = h.resolved;
  j["unresolved"] = h.unresolved;
  j["unresolved_fraction"] = h.unresolved_fraction;
  ordered_json table = ordered_json::object();
  for (const auto& [w, f] : h.distribution.table()) table[w.str()] = f;
  j["distribution"] = table;
  return dump(j);
}

std::string cmd_stationarity(const RunConfig& cfg) {
  require_format(cfg, {"json"});
  const Model m = build_model(cfg);
  const auto h = empirical_hitting_measure(m.group, m.measure, cfg.seed, cfg.n_paths, cfg.n_steps, hitting_options(cfg, m));
  const double tv = stationarity_residual(m.group, h.distribution, m.measure, cfg.seed ^ kResampleSalt, cfg.n_resample,
                                          cfg.compare_depth, cfg.margin);
  ordered_json j;
  j["depth"] = cfg.depth;
  j["compare_depth"] = cfg.compare_depth == 0 ? cfg.depth : cfg.compare_depth;
  j["n_resample"] = cfg.n_resample;
  j["tv_residual"] = tv;
  j["unresolved_fraction"] = h.unresolved_fraction;
  return dump(j);
}

std::string cmd_track(const RunConfig& cfg) {
  require_format(cfg, {"json", "csv"});
  const Model m = build_model(cfg);
  TrackOptions o;
  o.depth = cfg.depth;
  o.probes = m.probes;
  o.margin = cfg.margin;
  o.burn_in = cfg.burn_in;
  o.return_lattice = m.sublattice;
  const auto t = track_convergence(m.group, m.measure, cfg.seed, cfg.n_paths, cfg.n_steps, o);
  if (cfg.format == "csv") {
    std::ostringstream os;
    os << "path_id,step,length\n";
    for (std::size_t i = 0; i < t.lengths.size(); ++i)
      for (std::size_t k = 0; k < t.lengths[i].size(); ++k) os << i << ',' << t.steps[i][k] << ',' << t.lengths[i][k] << '\n';
    return os.str();
  }
  ordered_json j;
  j["depth"] = t.depth;
  j["burn_in"] = cfg.burn_in;
  j["monotone_fraction"] = t.monotone_fraction;
  j["median_final"] = t.median_final;
  j["unresolved_fraction"] = t.unresolved_fraction;
  j["overflow_steps"] = t.overflow_steps;
  return dump(j);
}

std::string cmd_growth(const RunConfig& cfg) {
  require_format(cfg, {"json", "csv"});
  const auto autos = build_automorphisms(cfg);
  std::string name = cfg.growth_target;
  if (name.empty()) {
    if (!cfg.theta.empty())
      name = cfg.theta.front();
    else if (!autos.empty())
      name = autos.begin()->first;
    else
      throw ConfigError("growth needs an automorphism (auto.<name>.* keys)");
  }
  const auto it = autos.find(name);
  if (it == autos.end()) throw ConfigError("growth.target names an undefined automorphism '" + name + "'");
  const auto r = classify_growth(it->second, cfg.max_iter);
  if (cfg.format == "csv") {
    std::ostringstream os;
    os << "m";
    for (int g = 0; g < cfg.rank; ++g) os << ',' << static_cast<char>('a' + g);
    os << '\n';
    for (int k = 0; k <= r.iterations_used; ++k) {
      os << k;
      for (const auto& row : r.per_generator_lengths) os << ',' << row[static_cast<std::size_t>(k)];
      os << '\n';
    }
    return os.str();
  }
  ordered_json j;
  j["automorphism"] = name;
  j["kind"] = r.kind == GrowthKind::Polynomial ? "Polynomial" : "Exponential";
  if (r.kind == GrowthKind::Polynomial)
    j["degree"] = r.degree_estimate;
  else
    j["rate"] = r.rate_estimate;
  j["iterations_used"] = r.iterations_used;
  j["r2_polynomial"] = r.r2_polynomial;
  j["r2_exponential"] = r.r2_exponential;
  j["per_generator_lengths"] = r.per_generator_lengths;
  return dump(j);
}

std::string cmd_moments(const RunConfig& cfg) {
  require_format(cfg, {"json"});
  const Model m = build_model(cfg);
  ordered_json j;
  j["first_moment"] = first_moment(m.group, m.measure);
  j["log_moment"] = log_moment(m.group, m.measure);
  j["entropy"] = entropy(m.measure);
  return dump(j);
}

std::string cmd_entropy_rate(const RunConfig& cfg) {
  require_format(cfg, {"json", "csv"});
  const Model m = build_model(cfg);
  const auto e = asymptotic_entropy_estimate(m.group, m.measure, cfg.seed, cfg.n_paths, cfg.depths);
  if (cfg.format == "csv") {
    std::ostringstream os;
    os.precision(17);
    os << "n,samples,distinct,plugin,corrected,coverage\n";
    for (const auto& d : e.depths)
      os << d.n << ',' << d.samples << ',' << d.distinct << ',' << d.plugin << ',' << d.corrected << ',' << d.coverage
         << '\n';
    return os.str();
  }
  ordered_json j;
  j["entropy_rate"] = e.value;
  j["slope"] = e.slope;
  ordered_json rows = ordered_json::array();
  for (const auto& d : e.depths) {
    rows.push_back({{"n", d.n},
                    {"samples", d.samples},
                    {"distinct", d.distinct},
                    {"plugin", d.plugin},
                    {"corrected", d.corrected},
                    {"coverage", d.coverage},
                    {"bias_flagged", d.bias_flagged}});
  }
  j["depths"] = rows;
  return dump(j);
}

std::string cmd_first_return(const RunConfig& cfg) {
  require_format(cfg, {"json", "csv"});
  const Model m = build_model(cfg);
  if (!m.sublattice) throw ConfigError("first-return needs a sublattice (sublattice.moduli or sublattice.perm.*)");
  const auto r = first_return_sampler(m.group, m.measure, *m.sublattice, cfg.seed, cfg.n_paths, cfg.step_budget,
                                      cfg.unresolved_ceiling);
  if (cfg.format == "csv") {
    std::ostringstream os;
    os << "sample_id,tau,w,p\n";
    for (std::size_t i = 0; i < r.samples.size(); ++i)
      os << i << ',' << r.return_times[i] << ',' << r.samples[i].w.str() << ',' << m.group.acting_str(r.samples[i].p)
         << '\n';
    return os.str();
  }
  const auto ones = std::count(r.return_times.begin(), r.return_times.end(), std::size_t{1});
  ordered_json j;
  j["samples"] = r.samples.size();
  j["mean_return_time"] = r.mean_return_time;
  j["mean_gauge_length"] = r.mean_gauge_length;
  j["p_tau_1"] = r.samples.empty() ? 0.0 : static_cast<double>(ones) / static_cast<double>(r.samples.size());
  j["exhausted_fraction"] = r.exhausted_fraction;
  return dump(j);
}

ReducedWord word(const RunConfig& cfg, const std::string& s) { return ReducedWord::parse(cfg.rank, s); }

ReducedWord power_of(const ReducedWord& w, std::size_t n) {
  ReducedWord out(w.rank());
  for (std::size_t i = 0; i < n; ++i) out = multiply(out, w);
  return out;
}

std::string cmd_tree_liminf(const RunConfig& cfg) {
  require_format(cfg, {"json", "dot"});
  const std::size_t n_terms = cfg.horizon;
  const InnerTree probe(cfg.rank, 1);
  const auto prefix = word(cfg, cfg.tree_prefix), step = word(cfg, cfg.tree_step), suffix = word(cfg, cfg.tree_suffix);
  const auto base = word(cfg, cfg.tree_base);
  // The horizon bounds vertex depth; leave room for the prefix and suffix.
  const std::size_t reach = probe.depth(CosetVertex::of(prefix)) + probe.depth(CosetVertex::of(suffix)) +
                            probe.depth(CosetVertex::of(base)) + n_terms * std::max<std::size_t>(1, step.size());
  const InnerTree tree(cfg.rank, reach);
  std::vector<CosetVertex> seq;
  for (std::size_t n = 1; n <= n_terms; ++n) seq.push_back(tree.vertex(multiply(multiply(prefix, power_of(step, n)), suffix)));
  const auto q = tree.vertex(base);
  const auto r = tree.liminf_observers(q, seq);
  if (cfg.format == "dot") return tree.dot_ball(cfg.depth, cfg.tree_max_power);
  ordered_json j;
  j["base"] = q.str();
  j["kind"] = r.kind == LiminfKind::Vertex ? "Vertex" : r.kind == LiminfKind::Ray ? "Ray" : "Inconclusive";
  j["endpoint"] = r.stable_path.empty() ? ordered_json(nullptr) : ordered_json(r.endpoint().str());
  ordered_json path = ordered_json::array();
  for (const auto& v : r.stable_path) path.push_back(v.str());
  j["stable_path"] = path;
  return dump(j);
}

std::string cmd_tree_strips(const RunConfig& cfg) {
  require_format(cfg, {"json", "csv", "dot"});
  const InnerTree tree(cfg.rank, cfg.horizon);
  if (cfg.format == "dot") return tree.dot_ball(cfg.depth, cfg.tree_max_power);
  const auto from = tree.vertex(word(cfg, cfg.tree_from));
  const auto to = tree.vertex(word(cfg, cfg.tree_to));
  const auto strip = tree.strip_exit_points(from, to);
  const auto prof = strip_growth_profile(strip, cfg.tree_k_max);
  if (cfg.format == "csv") {
    std::ostringstream os;
    os << "k,count\n";
    for (std::size_t k = 1; k <= prof.counts.size(); ++k) os << k << ',' << prof.counts[k - 1] << '\n';
    return os.str();
  }
  ordered_json j;
  j["from"] = from.str();
  j["to"] = to.str();
  ordered_json exits = ordered_json::array();
  for (const auto& w : strip) exits.push_back(w.str());
  j["exits"] = exits;
  j["counts"] = prof.counts;
  j["intercept"] = prof.intercept;
  j["slope"] = prof.slope;
  j["max_residual"] = prof.max_residual;
  j["bound_holds"] = prof.bound_holds;
  return dump(j);
}

std::string cmd_poisson(const RunConfig& cfg) {
  require_format(cfg, {"json", "csv"});
  const Model m = build_model(cfg);
  const CylinderFunction F = [&] {
    if (!cfg.harmonic_csv.empty()) {
      std::ifstream in(cfg.harmonic_csv);
      if (!in) throw ConfigError("cannot open " + cfg.harmonic_csv);
      return CylinderFunction::from_csv(cfg.rank, in);
    }
    return CylinderFunction::indicator(word(cfg, cfg.harmonic_cylinder));
  }();
  const auto h = empirical_hitting_measure(m.group, m.measure, cfg.seed, cfg.n_paths, cfg.n_steps, hitting_options(cfg, m));
  const auto samples = boundary_samples_from(h);
  std::vector<std::string> points = cfg.harmonic_eval.empty() ? std::vector<std::string>{"1"} : cfg.harmonic_eval;
  std::vector<std::pair<std::string, Estimate>> values;
  for (const auto& s : points) {
    const auto g = m.group.parse(s);
    values.emplace_back(m.group.str(g), poisson_eval(m.group, F, g, samples));
  }
  if (cfg.format == "csv") {
    std::ostringstream os;
    os.precision(17);
    os << "g,value,std_error\n";
    for (const auto& [g, e] : values) os << g << ',' << e.value << ',' << e.std_error << '\n';
    return os.str();
  }
  const auto res = harmonicity_residual(m.group, m.measure, F, samples, ball(m.group, cfg.harmonic_radius));
  ordered_json j;
  ordered_json vals = ordered_json::array();
  for (const auto& [g, e] : values) vals.push_back({{"g", g}, {"value", e.value}, {"std_error", e.std_error}});
  j["values"] = vals;
  j["test_radius"] = cfg.harmonic_radius;
  j["max_residual"] = res.max_residual;
  j["max_residual_in_std_errors"] = res.max_in_std_errors;
  j["unresolved_fraction"] = h.unresolved_fraction;
  return dump(j);
}

const std::map<std::string, std::function<std::string(const RunConfig&)>>& commands() {
  static const std::map<std::string, std::function<std::string(const RunConfig&)>> table{
      {"walk", cmd_walk},
      {"hitting", cmd_hitting},
      {"stationarity", cmd_stationarity},
      {"track", cmd_track},
      {"growth", cmd_growth},
      {"moments", cmd_moments},
      {"entropy-rate", cmd_entropy_rate},
      {"first-return", cmd_first_return},
      {"tree-liminf", cmd_tree_liminf},
      {"tree-strips", cmd_tree_strips},
      {"poisson", cmd_poisson},
  };
  return table;
}

}  // namespace

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const auto& [k, v] : commands()) out.push_back(k);
    return out;
  }();
  return names;
}

std::string run_command(const std::string& command, const RunConfig& cfg) {
  const auto it = commands().find(command);
  if (it == commands().end()) throw ConfigError("unknown command '" + command + "'");
  return it->second(cfg);
}

void write_atomically(const std::string& path, const std::string& text) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot write " + tmp.string());
    out << text;
    out.flush();
    if (!out) {
      out.close();
      std::error_code ec;
      fs::remove(tmp, ec);
      throw ConfigError("write to " + tmp.string() + " failed");
    }
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw ConfigError("cannot move output into place at " + path);
  }
}

}  // namespace walkbound
