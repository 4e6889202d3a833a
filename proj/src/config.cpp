#include "walkbound/config.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include "walkbound/error.hpp"

namespace walkbound {

namespace {

struct Value {
  bool is_list = false;
  std::vector<std::string> items;  // a scalar is a one-item list
  int line = 0;
};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void fail(int line, const std::string& msg) {
  throw ConfigError("config line " + std::to_string(line) + ": " + msg);
}

// Splits a value into tokens, honoring quotes. Returns scalar or list items.
Value parse_value(const std::string& raw, int line) {
  Value v;
  v.line = line;
  std::string s = trim(raw);
  if (s.empty()) fail(line, "missing value");
  std::string body = s;
  if (s.front() == '[') {
    if (s.back() != ']') fail(line, "unterminated list");
    v.is_list = true;
    body = s.substr(1, s.size() - 2);
  }
  std::size_t i = 0;
  auto skip_ws = [&] {
    while (i < body.size() && (body[i] == ' ' || body[i] == '\t')) ++i;
  };
  skip_ws();
  while (i < body.size()) {
    std::string item;
    if (body[i] == '"') {
      const auto close = body.find('"', i + 1);
      if (close == std::string::npos) fail(line, "unterminated string");
      item = body.substr(i + 1, close - i - 1);
      i = close + 1;
    } else if (body[i] == '[') {
      // Nested list (sublattice permutations) kept verbatim.
      const auto close = body.find(']', i);
      if (close == std::string::npos) fail(line, "unterminated list");
      item = body.substr(i, close - i + 1);
      i = close + 1;
    } else {
      const auto stop = v.is_list ? body.find(',', i) : std::string::npos;
      item = trim(body.substr(i, stop == std::string::npos ? std::string::npos : stop - i));
      i = stop == std::string::npos ? body.size() : stop;
      if (item.empty()) fail(line, "empty list item");
    }
    v.items.push_back(item);
    skip_ws();
    if (i < body.size()) {
      if (!v.is_list || body[i] != ',') fail(line, "unexpected text after value");
      ++i;
      skip_ws();
      if (i >= body.size()) fail(line, "trailing comma");
    }
  }
  if (!v.is_list && v.items.size() != 1) fail(line, "expected a single value");
  return v;
}

std::string strip_comment(const std::string& line) {
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') quoted = !quoted;
    if (line[i] == '#' && !quoted) return line.substr(0, i);
  }
  return line;
}

template <class T>
T parse_number(const std::string& s, int line, const std::string& key) {
  T x{};
  const auto* end = s.data() + s.size();
  auto [p, ec] = std::from_chars(s.data(), end, x);
  if (ec != std::errc() || p != end) fail(line, "'" + s + "' is not a valid number for " + key);
  return x;
}

double parse_double(const std::string& s, int line, const std::string& key) {
  char* end = nullptr;
  const double x = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size() || !std::isfinite(x))
    fail(line, "'" + s + "' is not a valid number for " + key);
  return x;
}

std::string normalize_word(int rank, const std::string& text, int line) {
  try {
    return ReducedWord::parse(rank, text).str();
  } catch (const ConfigError& e) {
    fail(line, e.what());
  }
}

std::string quote(const std::string& s) { return "\"" + s + "\""; }

template <class T>
std::string join(const std::vector<T>& xs, const std::function<std::string(const T&)>& f) {
  std::string out = "[";
  for (std::size_t i = 0; i < xs.size(); ++i) out += (i ? ", " : "") + f(xs[i]);
  return out + "]";
}

std::string format_double(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

int acting_rank_of(const std::string& acting, int line) {
  if (acting == "none") return 0;
  if (acting == "Z") return 1;
  if (acting.rfind("Z^", 0) == 0) return parse_number<int>(acting.substr(2), line, "group.acting");
  if (acting.rfind("free:", 0) == 0) return parse_number<int>(acting.substr(5), line, "group.acting");
  fail(line, "group.acting must be none, Z, Z^k or free:k");
}

}  // namespace

RunConfig parse_config(std::istream& in) {
  std::map<std::string, Value> kv;
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const std::string s = trim(strip_comment(raw));
    if (s.empty()) continue;
    const auto eq = s.find('=');
    if (eq == std::string::npos) fail(line, "expected key = value");
    const std::string key = trim(s.substr(0, eq));
    if (key.empty()) fail(line, "empty key");
    if (kv.count(key)) fail(line, "key " + key + " given twice");
    kv.emplace(key, parse_value(s.substr(eq + 1), line));
  }

  RunConfig cfg;
  std::set<std::string> used;
  auto take = [&](const std::string& key) -> const Value* {
    auto it = kv.find(key);
    if (it == kv.end()) return nullptr;
    used.insert(key);
    return &it->second;
  };
  auto scalar = [&](const Value& v, const std::string& key) -> const std::string& {
    if (v.is_list) fail(v.line, key + " expects a single value");
    return v.items.front();
  };
  auto list = [&](const Value& v, const std::string& key) -> const std::vector<std::string>& {
    if (!v.is_list) fail(v.line, key + " expects a list");
    return v.items;
  };
  auto get_size = [&](const std::string& key, std::size_t& out) {
    if (const auto* v = take(key)) out = parse_number<std::size_t>(scalar(*v, key), v->line, key);
  };
  auto get_int = [&](const std::string& key, int& out) {
    if (const auto* v = take(key)) out = parse_number<int>(scalar(*v, key), v->line, key);
  };
  auto get_string = [&](const std::string& key, std::string& out) {
    if (const auto* v = take(key)) out = scalar(*v, key);
  };

  if (const auto* v = take("group.rank")) cfg.rank = parse_number<int>(scalar(*v, "group.rank"), v->line, "group.rank");
  if (cfg.rank < 1 || cfg.rank > 26) throw ConfigError("group.rank must lie in 1..26");
  int acting_line = 0;
  if (const auto* v = take("group.acting")) {
    cfg.acting = scalar(*v, "group.acting");
    acting_line = v->line;
  }
  const int k = acting_rank_of(cfg.acting, acting_line);
  if (k < 0 || k > 26) fail(acting_line, "acting rank out of range");
  // Normalize spelling.
  if (cfg.acting.rfind("free:", 0) == 0)
    cfg.acting = "free:" + std::to_string(k);
  else
    cfg.acting = k == 0 ? "none" : k == 1 ? "Z" : "Z^" + std::to_string(k);
  if (const auto* v = take("group.theta")) cfg.theta = list(*v, "group.theta");
  if (static_cast<int>(cfg.theta.size()) != k)
    throw ConfigError("group.theta names " + std::to_string(cfg.theta.size()) + " automorphisms, acting rank is " +
                      std::to_string(k));

  // Automorphism tables: auto.<name>.<gen> and auto.<name>.inv.<gen>.
  std::map<std::string, std::map<char, std::pair<std::string, int>>> images, inverses;
  for (const auto& [key, v] : kv) {
    if (key.rfind("auto.", 0) != 0) continue;
    used.insert(key);
    const auto rest = key.substr(5);
    const auto dot = rest.find('.');
    if (dot == std::string::npos) fail(v.line, "automorphism keys look like auto.<name>.<generator>");
    const std::string name = rest.substr(0, dot);
    std::string gen = rest.substr(dot + 1);
    bool inv = false;
    if (gen.rfind("inv.", 0) == 0) {
      inv = true;
      gen = gen.substr(4);
    }
    if (gen.size() != 1 || !std::islower(static_cast<unsigned char>(gen[0])) || gen[0] - 'a' >= cfg.rank)
      fail(v.line, "'" + gen + "' is not a generator of F_" + std::to_string(cfg.rank));
    (inv ? inverses : images)[name][gen[0]] = {scalar(v, key), v.line};
  }
  std::set<std::string> names;
  for (const auto& [n, m] : images) names.insert(n);
  for (const auto& [n, m] : inverses) names.insert(n);
  for (const auto& name : names) {
    AutomorphismSpec spec;
    for (int g = 0; g < cfg.rank; ++g) {
      const char c = static_cast<char>('a' + g);
      const std::string self(1, c);
      auto pick = [&](auto& table) {
        auto it = table[name].find(c);
        return it == table[name].end() ? self : normalize_word(cfg.rank, it->second.first, it->second.second);
      };
      spec.image.push_back(pick(images));
      spec.inverse.push_back(pick(inverses));
    }
    cfg.automorphisms[name] = std::move(spec);
  }
  for (const auto& t : cfg.theta)
    if (!cfg.automorphisms.count(t)) throw ConfigError("group.theta names an undefined automorphism '" + t + "'");

  if (const auto* v = take("measure.atoms")) cfg.atoms = list(*v, "measure.atoms");
  if (const auto* v = take("measure.weights")) {
    if (!v->is_list) {
      if (v->items.front() != "uniform") fail(v->line, "measure.weights must be a list or 'uniform'");
    } else {
      for (const auto& w : v->items) cfg.weights.push_back(parse_double(w, v->line, "measure.weights"));
    }
  }
  get_int("measure.check_radius", cfg.generation_radius);

  if (const auto* v = take("run.seed")) cfg.seed = parse_number<std::uint64_t>(scalar(*v, "run.seed"), v->line, "run.seed");
  get_size("run.n_paths", cfg.n_paths);
  get_size("run.n_steps", cfg.n_steps);
  get_size("run.depth", cfg.depth);
  if (const auto* v = take("run.margin")) {
    const auto& s = scalar(*v, "run.margin");
    if (s != "auto") cfg.margin = parse_number<std::size_t>(s, v->line, "run.margin");
  }
  get_size("run.burn_in", cfg.burn_in);
  get_size("run.n_resample", cfg.n_resample);
  get_size("run.compare_depth", cfg.compare_depth);
  get_int("run.max_iter", cfg.max_iter);
  get_size("run.step_budget", cfg.step_budget);
  if (const auto* v = take("run.depths")) {
    cfg.depths.clear();
    for (const auto& s : list(*v, "run.depths")) cfg.depths.push_back(parse_number<std::size_t>(s, v->line, "run.depths"));
  }
  if (const auto* v = take("run.unresolved_ceiling"))
    cfg.unresolved_ceiling = parse_double(scalar(*v, "run.unresolved_ceiling"), v->line, "run.unresolved_ceiling");
  if (const auto* v = take("run.probes")) cfg.probes = list(*v, "run.probes");
  if (const auto* v = take("sublattice.moduli")) {
    for (const auto& s : list(*v, "sublattice.moduli"))
      cfg.sublattice_moduli.push_back(parse_number<std::int64_t>(s, v->line, "sublattice.moduli"));
  }
  for (int i = 1; i <= 26; ++i) {
    const auto key = "sublattice.perm." + std::to_string(i);
    const auto* v = take(key);
    if (!v) break;
    std::vector<int> perm;
    for (const auto& s : list(*v, key)) perm.push_back(parse_number<int>(s, v->line, key));
    cfg.sublattice_perms.push_back(std::move(perm));
  }
  get_string("growth.target", cfg.growth_target);

  get_size("tree.horizon", cfg.horizon);
  get_string("tree.base", cfg.tree_base);
  get_string("tree.prefix", cfg.tree_prefix);
  get_string("tree.step", cfg.tree_step);
  get_string("tree.suffix", cfg.tree_suffix);
  get_string("tree.from", cfg.tree_from);
  get_string("tree.to", cfg.tree_to);
  get_size("tree.k_max", cfg.tree_k_max);
  get_int("tree.max_power", cfg.tree_max_power);

  get_string("harmonic.cylinder", cfg.harmonic_cylinder);
  get_string("harmonic.csv", cfg.harmonic_csv);
  get_int("harmonic.radius", cfg.harmonic_radius);
  if (const auto* v = take("harmonic.eval")) cfg.harmonic_eval = list(*v, "harmonic.eval");

  get_string("output.path", cfg.output_path);
  get_string("output.format", cfg.format);

  for (const auto& [key, v] : kv)
    if (!used.count(key)) fail(v.line, "unknown key " + key);

  // Light normalization of words so that emitted configs compare equal.
  for (auto* w : {&cfg.tree_base, &cfg.tree_prefix, &cfg.tree_step, &cfg.tree_suffix, &cfg.tree_from, &cfg.tree_to})
    *w = normalize_word(cfg.rank, *w, 0);
  if (cfg.format != "json" && cfg.format != "csv" && cfg.format != "dot")
    throw ConfigError("output.format must be json, csv or dot");
  return cfg;
}

RunConfig parse_config_text(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  return parse_config(in);
}

std::string emit_config(const RunConfig& c) {
  std::ostringstream os;
  const std::function<std::string(const std::string&)> q = quote;
  os << "group.rank = " << c.rank << "\n";
  os << "group.acting = " << quote(c.acting) << "\n";
  os << "group.theta = " << join(c.theta, q) << "\n";
  for (const auto& [name, spec] : c.automorphisms) {
    for (int g = 0; g < c.rank; ++g) {
      const char gen = static_cast<char>('a' + g);
      os << "auto." << name << "." << gen << " = " << quote(spec.image[static_cast<std::size_t>(g)]) << "\n";
      os << "auto." << name << ".inv." << gen << " = " << quote(spec.inverse[static_cast<std::size_t>(g)]) << "\n";
    }
  }
  os << "measure.atoms = " << join(c.atoms, q) << "\n";
  if (c.weights.empty())
    os << "measure.weights = uniform\n";
  else
    os << "measure.weights = " << join<double>(c.weights, format_double) << "\n";
  os << "measure.check_radius = " << c.generation_radius << "\n";
  os << "run.seed = " << c.seed << "\n";
  os << "run.n_paths = " << c.n_paths << "\n";
  os << "run.n_steps = " << c.n_steps << "\n";
  os << "run.depth = " << c.depth << "\n";
  os << "run.margin = " << (c.margin ? std::to_string(*c.margin) : std::string("auto")) << "\n";
  os << "run.burn_in = " << c.burn_in << "\n";
  os << "run.n_resample = " << c.n_resample << "\n";
  os << "run.compare_depth = " << c.compare_depth << "\n";
  os << "run.max_iter = " << c.max_iter << "\n";
  os << "run.step_budget = " << c.step_budget << "\n";
  os << "run.depths = " << join<std::size_t>(c.depths, [](const std::size_t& x) { return std::to_string(x); }) << "\n";
  os << "run.unresolved_ceiling = " << format_double(c.unresolved_ceiling) << "\n";
  os << "run.probes = " << join(c.probes, q) << "\n";
  os << "sublattice.moduli = "
     << join<std::int64_t>(c.sublattice_moduli, [](const std::int64_t& x) { return std::to_string(x); }) << "\n";
  for (std::size_t i = 0; i < c.sublattice_perms.size(); ++i)
    os << "sublattice.perm." << i + 1 << " = "
       << join<int>(c.sublattice_perms[i], [](const int& x) { return std::to_string(x); }) << "\n";
  os << "growth.target = " << quote(c.growth_target) << "\n";
  os << "tree.horizon = " << c.horizon << "\n";
  os << "tree.base = " << quote(c.tree_base) << "\n";
  os << "tree.prefix = " << quote(c.tree_prefix) << "\n";
  os << "tree.step = " << quote(c.tree_step) << "\n";
  os << "tree.suffix = " << quote(c.tree_suffix) << "\n";
  os << "tree.from = " << quote(c.tree_from) << "\n";
  os << "tree.to = " << quote(c.tree_to) << "\n";
  os << "tree.k_max = " << c.tree_k_max << "\n";
  os << "tree.max_power = " << c.tree_max_power << "\n";
  os << "harmonic.cylinder = " << quote(c.harmonic_cylinder) << "\n";
  os << "harmonic.csv = " << quote(c.harmonic_csv) << "\n";
  os << "harmonic.radius = " << c.harmonic_radius << "\n";
  os << "harmonic.eval = " << join(c.harmonic_eval, q) << "\n";
  os << "output.path = " << quote(c.output_path) << "\n";
  os << "output.format = " << quote(c.format) << "\n";
  return os.str();
}

std::map<std::string, Automorphism> build_automorphisms(const RunConfig& cfg) {
  std::map<std::string, Automorphism> out;
  for (const auto& [name, spec] : cfg.automorphisms) {
    std::vector<ReducedWord> im, inv;
    for (const auto& s : spec.image) im.push_back(ReducedWord::parse(cfg.rank, s));
    for (const auto& s : spec.inverse) inv.push_back(ReducedWord::parse(cfg.rank, s));
    try {
      out.emplace(name, Automorphism(std::move(im), std::move(inv)));
    } catch (const ConfigError& e) {
      throw ConfigError("automorphism '" + name + "': " + e.what());
    }
  }
  return out;
}

ActingGroup build_group(const RunConfig& cfg) {
  const auto autos = build_automorphisms(cfg);
  std::vector<Automorphism> theta;
  for (const auto& t : cfg.theta) theta.push_back(autos.at(t));
  const ActingKind kind = cfg.acting.rfind("free:", 0) == 0 ? ActingKind::Free : ActingKind::IntLattice;
  return ActingGroup(kind, cfg.rank, std::move(theta));
}

Model build_model(const RunConfig& cfg) {
  ActingGroup A = build_group(cfg);
  if (cfg.atoms.empty()) throw ConfigError("measure.atoms is empty");
  std::vector<ExtElement> support;
  for (const auto& s : cfg.atoms) support.push_back(A.parse(s));
  std::vector<Atom> atoms;
  if (cfg.weights.empty()) {
    for (auto& g : support) atoms.push_back({std::move(g), 1.0 / static_cast<double>(cfg.atoms.size())});
  } else {
    if (cfg.weights.size() != support.size())
      throw ConfigError("measure.weights has " + std::to_string(cfg.weights.size()) + " entries for " +
                        std::to_string(support.size()) + " atoms");
    for (std::size_t i = 0; i < support.size(); ++i) atoms.push_back({std::move(support[i]), cfg.weights[i]});
  }
  StepMeasure mu(A, std::move(atoms));
  if (cfg.generation_radius > 0) check_semigroup_generation(A, mu, cfg.generation_radius, 4 * cfg.generation_radius + 4);

  std::optional<Sublattice> L;
  if (!cfg.sublattice_moduli.empty() || !cfg.sublattice_perms.empty()) {
    L = Sublattice{cfg.sublattice_moduli, cfg.sublattice_perms};
    validate_sublattice(A, *L);
  }
  std::vector<BoundaryRay> probes;
  for (const auto& p : cfg.probes) probes.push_back(BoundaryRay::parse(cfg.rank, p));
  if (!(cfg.unresolved_ceiling >= 0.0 && cfg.unresolved_ceiling <= 1.0))
    throw ConfigError("run.unresolved_ceiling must lie in [0, 1]");
  return Model{std::move(A), std::move(mu), std::move(L), std::move(probes)};
}

}  // namespace walkbound
