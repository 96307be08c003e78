#include "scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <nlohmann/json.hpp>

#include "chain_graph.hpp"
#include "expansivity.hpp"
#include "quotient.hpp"
#include "semiconjugation.hpp"

namespace folia {

namespace {

using json = nlohmann::ordered_json;

constexpr const char* kVersion = "0.1.0";

[[noreturn]] void config_fail(const std::string& what) {
  fail(ErrorCode::ConfigError, "config: " + what);
}

// ---- JSON config -----------------------------------------------------------

IntMat parse_int_matrix(const json& j, const std::string& field) {
  if (!j.is_array()) config_fail(field + " must be an array of integer rows");
  IntMat m;
  for (const auto& row : j) {
    if (!row.is_array()) config_fail(field + " rows must be arrays");
    IntVec r;
    for (const auto& v : row) {
      if (!v.is_number_integer()) config_fail(field + " entries must be integers");
      r.push_back(v.get<long long>());
    }
    m.push_back(std::move(r));
  }
  return m;
}

std::vector<TrigTerm> parse_trig(const json& j, const std::string& field) {
  std::vector<TrigTerm> terms;
  if (!j.is_array()) config_fail(field + " must be an array of terms");
  for (const auto& t : j) {
    TrigTerm term;
    if (!t.contains("freq") || !t.contains("coeff"))
      config_fail(field + " terms need freq and coeff");
    for (const auto& v : t.at("freq")) term.freq.push_back(v.get<long long>());
    for (const auto& v : t.at("coeff")) term.coeff.push_back(v.get<double>());
    term.is_sin = t.value("sin", true);
    terms.push_back(std::move(term));
  }
  return terms;
}

FoliationKind parse_kind(const std::string& s) {
  if (s == "points") return FoliationKind::Points;
  if (s == "linear") return FoliationKind::Linear;
  if (s == "whole" || s == "whole-manifold") return FoliationKind::WholeManifold;
  config_fail("foliation.kind must be points | linear | whole");
}

template <typename T>
void read_field(const json& j, const char* key, T* out) {
  if (!j.contains(key)) return;
  try {
    *out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    config_fail(std::string("field '") + key + "': " + e.what());
  }
}

}  // namespace

ScenarioConfig parse_config_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    config_fail(std::string("JSON parse error at byte ") + std::to_string(e.byte) +
                ": " + e.what());
  }
  if (!j.is_object()) config_fail("top level must be an object");
  ScenarioConfig cfg;
  read_field(j, "name", &cfg.name);
  read_field(j, "dim", &cfg.dim);
  if (j.contains("matrix")) cfg.matrix = parse_int_matrix(j.at("matrix"), "matrix");
  if (j.contains("trig")) cfg.trig = parse_trig(j.at("trig"), "trig");
  if (j.contains("g_trig")) cfg.g_trig = parse_trig(j.at("g_trig"), "g_trig");
  if (j.contains("foliation")) {
    const json& f = j.at("foliation");
    if (f.contains("kind")) cfg.fol_kind = parse_kind(f.at("kind").get<std::string>());
    if (f.contains("directions")) {
      for (const auto& d : parse_int_matrix(f.at("directions"), "foliation.directions"))
        cfg.directions.push_back(d);
      cfg.fol_kind = FoliationKind::Linear;
    }
  }
  read_field(j, "grid_n", &cfg.grid_n);
  read_field(j, "delta", &cfg.delta);
  read_field(j, "eps", &cfg.eps);
  read_field(j, "eps0", &cfg.eps0);
  read_field(j, "rho", &cfg.rho);
  read_field(j, "eps_prime", &cfg.eps_prime);
  read_field(j, "horizon", &cfg.horizon);
  read_field(j, "kmax", &cfg.kmax);
  read_field(j, "samples", &cfg.samples);
  read_field(j, "chain_length", &cfg.chain_length);
  read_field(j, "trials", &cfg.trials);
  read_field(j, "orbit_length", &cfg.orbit_length);
  read_field(j, "expansivity_horizon", &cfg.expansivity_horizon);
  read_field(j, "e_list", &cfg.e_list);
  read_field(j, "eps0_factor", &cfg.eps0_factor);
  read_field(j, "rho_factor", &cfg.rho_factor);
  read_field(j, "expect_witness", &cfg.expect_witness);
  read_field(j, "periodic_leaves", &cfg.periodic_leaves);
  read_field(j, "delta_sweep", &cfg.delta_sweep);
  read_field(j, "seed", &cfg.seed);
  read_field(j, "out_dir", &cfg.out_dir);
  if (cfg.dim < 1 || cfg.dim > 3) config_fail("dim must be 1..3");
  if (cfg.grid_n < 2) config_fail("grid_n must be >= 2");
  if (cfg.delta <= 0 || cfg.eps <= 0 || cfg.eps0 <= 0 || cfg.rho <= 0)
    config_fail("delta, eps, eps0 and rho must be positive");
  return cfg;
}

namespace {

// ---- key=value config ------------------------------------------------------

std::vector<std::string> split_ws(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::string> out;
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

IntMat parse_rows(const std::string& value, int line) {
  IntMat m;
  std::string chunk;
  std::istringstream in(value);
  while (std::getline(in, chunk, ';')) {
    IntVec row;
    for (const std::string& t : split_ws(chunk)) {
      try {
        row.push_back(std::stoll(t));
      } catch (...) {
        config_fail("line " + std::to_string(line) + ": '" + t + "' is not an integer");
      }
    }
    if (!row.empty()) m.push_back(std::move(row));
  }
  return m;
}

// "sin k1 k2 / c1 c2"
TrigTerm parse_trig_line(const std::string& value, int line) {
  auto slash = value.find('/');
  if (slash == std::string::npos)
    config_fail("line " + std::to_string(line) + ": trig term needs 'sin|cos k... / c...'");
  std::vector<std::string> head = split_ws(value.substr(0, slash));
  std::vector<std::string> tail = split_ws(value.substr(slash + 1));
  if (head.empty() || (head[0] != "sin" && head[0] != "cos"))
    config_fail("line " + std::to_string(line) + ": trig term must start with sin or cos");
  TrigTerm t;
  t.is_sin = head[0] == "sin";
  try {
    for (size_t i = 1; i < head.size(); ++i) t.freq.push_back(std::stoll(head[i]));
    for (const std::string& c : tail) t.coeff.push_back(std::stod(c));
  } catch (...) {
    config_fail("line " + std::to_string(line) + ": malformed trig numbers");
  }
  return t;
}

}  // namespace

ScenarioConfig parse_config_text(const std::string& text) {
  // JSON sniff: first non-space character.
  for (char c : text) {
    if (std::isspace((unsigned char)c)) continue;
    if (c == '{') return parse_config_json(text);
    break;
  }
  ScenarioConfig cfg;
  std::istringstream in(text);
  std::string raw, section;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    std::string s = raw;
    if (auto h = s.find('#'); h != std::string::npos) s.erase(h);
    size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) continue;
    size_t b = s.find_last_not_of(" \t\r");
    s = s.substr(a, b - a + 1);
    if (s.front() == '[') {
      if (s.back() != ']') config_fail("line " + std::to_string(line) + ": unclosed section");
      section = s.substr(1, s.size() - 2);
      continue;
    }
    auto eq = s.find('=');
    if (eq == std::string::npos)
      config_fail("line " + std::to_string(line) + ": expected key = value");
    std::string key = s.substr(0, eq), value = s.substr(eq + 1);
    key.erase(key.find_last_not_of(" \t") + 1);
    value.erase(0, value.find_first_not_of(" \t"));
    if (!section.empty()) key = section + "." + key;

    try {
      if (key == "name") cfg.name = value;
      else if (key == "dim") cfg.dim = std::stoi(value);
      else if (key == "matrix" || key == "map.matrix") cfg.matrix = parse_rows(value, line);
      else if (key == "trig" || key == "map.trig")
        cfg.trig.push_back(parse_trig_line(value, line));
      else if (key == "g_trig" || key == "map.g_trig")
        cfg.g_trig.push_back(parse_trig_line(value, line));
      else if (key == "foliation.kind" || key == "kind") cfg.fol_kind = parse_kind(value);
      else if (key == "foliation.directions" || key == "directions") {
        for (auto& d : parse_rows(value, line)) cfg.directions.push_back(d);
        cfg.fol_kind = FoliationKind::Linear;
      } else if (key == "grid_n" || key == "grid.n") cfg.grid_n = std::stoi(value);
      else if (key == "delta") cfg.delta = std::stod(value);
      else if (key == "eps") cfg.eps = std::stod(value);
      else if (key == "eps0") cfg.eps0 = std::stod(value);
      else if (key == "rho") cfg.rho = std::stod(value);
      else if (key == "eps_prime") cfg.eps_prime = std::stod(value);
      else if (key == "horizon") cfg.horizon = std::stoll(value);
      else if (key == "kmax") cfg.kmax = std::stoll(value);
      else if (key == "samples") cfg.samples = std::stoi(value);
      else if (key == "chain_length") cfg.chain_length = std::stoi(value);
      else if (key == "trials") cfg.trials = std::stoi(value);
      else if (key == "orbit_length") cfg.orbit_length = std::stoi(value);
      else if (key == "expansivity_horizon") cfg.expansivity_horizon = std::stoll(value);
      else if (key == "e_list") {
        for (const std::string& t : split_ws(value)) cfg.e_list.push_back(std::stod(t));
      } else if (key == "eps0_factor") cfg.eps0_factor = std::stod(value);
      else if (key == "rho_factor") cfg.rho_factor = std::stod(value);
      else if (key == "expect_witness") cfg.expect_witness = value == "true" || value == "1";
      else if (key == "periodic_leaves") cfg.periodic_leaves = value == "true" || value == "1";
      else if (key == "delta_sweep") {
        cfg.delta_sweep.clear();
        for (const std::string& t : split_ws(value)) cfg.delta_sweep.push_back(std::stod(t));
      } else if (key == "seed") cfg.seed = std::stoull(value);
      else if (key == "out_dir" || key == "out") cfg.out_dir = value;
      else config_fail("line " + std::to_string(line) + ": unknown key '" + key + "'");
    } catch (const Error&) {
      throw;
    } catch (...) {
      config_fail("line " + std::to_string(line) + ": bad value for '" + key + "'");
    }
  }
  if (cfg.dim < 1 || cfg.dim > 3) config_fail("dim must be 1..3");
  return cfg;
}

ScenarioConfig load_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) config_fail("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

// ---- built-ins -------------------------------------------------------------

ScenarioConfig builtin_scenario(const std::string& name) {
  ScenarioConfig cfg;
  cfg.name = name;
  if (name == "catmap-stability") {
    cfg.dim = 2;
    cfg.matrix = {{2, 1}, {1, 1}};
    cfg.g_trig = {{{0, 1}, {0.002, 0.0}, true}};
    cfg.fol_kind = FoliationKind::Points;
    cfg.grid_n = 256;
    cfg.eps = 0.05;
    cfg.eps0 = 0.05;
    cfg.rho = 0.02;
    cfg.delta = 0.005;
    cfg.horizon = 20;
    cfg.samples = 500;
    cfg.chain_length = 5;
    cfg.delta_sweep = {1e-1, 1e-2, 1e-3};
    return cfg;
  }
  if (name == "t3-center") {
    cfg.dim = 3;
    cfg.matrix = {{2, 1, 0}, {1, 1, 0}, {0, 0, 1}};
    cfg.fol_kind = FoliationKind::Linear;
    cfg.directions = {{0, 0, 1}};
    cfg.grid_n = 32;
    cfg.delta = 0.02;
    cfg.eps = 0.1;
    cfg.eps0 = 0.1;
    cfg.rho = 0.02;
    cfg.periodic_leaves = true;
    cfg.trials = 20;
    cfg.orbit_length = 15;
    return cfg;
  }
  if (name == "t2-vertical-noexp") {
    cfg.dim = 2;
    cfg.matrix = {{1, 0}, {0, 1}};
    // skew rotation (x, y) -> (x + alpha, y + 0.1 sin 2 pi x)
    cfg.trig = {{{0, 0}, {0.377, 0.0}, false}, {{1, 0}, {0.0, 0.1}, true}};
    cfg.fol_kind = FoliationKind::Linear;
    cfg.directions = {{0, 1}};
    cfg.grid_n = 128;
    cfg.expansivity_horizon = 100;
    cfg.e_list = {0.1, 0.05, 0.02};
    cfg.eps0_factor = 0.2;  // eps0 = e / 5
    cfg.rho_factor = 0.1;
    cfg.expect_witness = true;
    cfg.delta = 0.01;
    cfg.eps = 0.05;
    cfg.eps0 = 0.02;
    cfg.rho = 0.005;
    return cfg;
  }
  if (name == "single-leaf-trivial") {
    cfg.dim = 1;
    cfg.matrix = {{1}};
    cfg.trig = {{{0}, {0.3}, false}};  // rotation by 0.3
    cfg.fol_kind = FoliationKind::WholeManifold;
    cfg.grid_n = 64;
    cfg.delta = 0.02;
    cfg.eps = 0.05;
    cfg.eps0 = 0.05;
    cfg.rho = 0.01;
    cfg.trials = 10;
    cfg.orbit_length = 15;
    return cfg;
  }
  config_fail("unknown built-in scenario '" + name + "'");
}

std::vector<std::pair<std::string, std::string>> list_scenarios() {
  return {
      {"catmap-stability",
       "perturbed hyperbolic automorphism of T^2: set-valued conjugation and "
       "stability contract"},
      {"single-leaf-trivial",
       "circle rotation with the one-leaf foliation: shadowing is trivial"},
      {"t2-vertical-noexp",
       "skew rotation of T^2 with vertical circles: expansivity violation search"},
      {"t3-center",
       "hyperbolic-times-identity on T^3 with circle leaves: chain recurrence "
       "and periodic-leaf certificates"},
  };
}

// ---- scenario objects ------------------------------------------------------

namespace {

IntMat effective_matrix(const ScenarioConfig& cfg) {
  if (!cfg.matrix.empty()) return cfg.matrix;
  IntMat id(cfg.dim, IntVec(cfg.dim, 0));
  for (int i = 0; i < cfg.dim; ++i) id[i][i] = 1;
  return id;
}

}  // namespace

ToralMap scenario_map(const ScenarioConfig& cfg) {
  return ToralMap(effective_matrix(cfg), cfg.trig);
}

ToralMap scenario_perturbed_map(const ScenarioConfig& cfg) {
  std::vector<TrigTerm> terms = cfg.trig;
  terms.insert(terms.end(), cfg.g_trig.begin(), cfg.g_trig.end());
  return ToralMap(effective_matrix(cfg), terms);
}

LinearFoliation scenario_foliation(const ScenarioConfig& cfg) {
  if (cfg.fol_kind == FoliationKind::Linear)
    return LinearFoliation(cfg.dim, cfg.directions);
  return LinearFoliation(cfg.fol_kind, cfg.dim);
}

// ---- reporting helpers -----------------------------------------------------

namespace {

json point_json(const TorusPoint& p) { return json(p.coords); }

void write_atomic(const std::filesystem::path& path, const std::string& data) {
  std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorCode::ConfigError, "cannot write '" + tmp.string() + "'");
    out << data;
  }
  std::filesystem::rename(tmp, path);
}

json config_json(const ScenarioConfig& cfg) {
  json j;
  j["name"] = cfg.name;
  j["dim"] = cfg.dim;
  j["matrix"] = effective_matrix(cfg);
  j["grid_n"] = cfg.grid_n;
  j["delta"] = cfg.delta;
  j["eps"] = cfg.eps;
  j["eps0"] = cfg.eps0;
  j["rho"] = cfg.rho;
  j["eps_prime"] = cfg.eps_prime > 0 ? cfg.eps_prime : cfg.eps / 8.0;
  j["horizon"] = cfg.horizon;
  j["seed"] = cfg.seed;
  return j;
}

TorusPoint random_point(int dim, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Vec v(dim);
  for (double& c : v) c = unit(rng);
  return wrap(v);
}

Trajectory random_pseudo_orbit(const ToralMap& f, double delta, int length,
                               std::mt19937_64& rng) {
  std::uniform_real_distribution<double> noise(-delta, delta);
  Trajectory t;
  t.points.push_back(random_point(f.dim(), rng));
  for (int k = 1; k < length; ++k) {
    Vec nx = f.apply(t.points.back()).coords;
    Vec off(f.dim());
    while (true) {
      for (double& c : off) c = noise(rng);
      if (norm(off) <= delta) break;
    }
    t.points.push_back(wrap(add(nx, off)));
  }
  return t;
}

// ---- pipelines -------------------------------------------------------------

struct StepOutput {
  json report;
  bool pass = false;
  std::vector<std::pair<std::string, std::string>> files;  // (name, contents)
};

StepOutput run_cr_set(const ScenarioConfig& cfg) {
  StepOutput out;
  ToralMap f = scenario_map(cfg);
  LinearFoliation fol = scenario_foliation(cfg);
  Grid grid(cfg.dim, cfg.grid_n);
  ChainGraph g(f, fol, cfg.delta, grid);
  RecurrenceResult rr = chain_recurrent_cells(g);

  json& r = out.report;
  r["delta"] = rr.delta;
  r["resolution"] = rr.resolution;
  r["resolution_limited"] = rr.resolution_limited;
  r["scc_count"] = rr.scc_count;
  r["recurrent_cell_count"] = rr.recurrent_cells.size();
  json cells = json::array();
  for (size_t c : rr.recurrent_cells) cells.push_back(grid.cell_tuple(c));
  r["recurrent_cells"] = std::move(cells);

  std::ostringstream csv;
  csv << "cell_index";
  for (int i = 0; i < cfg.dim; ++i) csv << ",x" << i;
  csv << "\n";
  for (size_t c : rr.recurrent_cells) {
    csv << c;
    for (double v : grid.cell_center(c).coords) csv << "," << v;
    csv << "\n";
  }
  out.files.emplace_back("recurrent-cells.csv", csv.str());
  out.pass = true;

  if (cfg.periodic_leaves && !rr.recurrent_cells.empty()) {
    HubLoopFinder finder(g, rr.recurrent_cells.front());
    size_t failures = 0;
    double worst_offset = 0.0, worst_defect = 0.0;
    long long max_period = 0;
    for (size_t c : rr.recurrent_cells) {
      auto loop = finder.loop(c);
      if (!loop) loop = loop_through_cell(g, c);
      if (!loop) {
        ++failures;
        continue;
      }
      long long r_len = (long long)loop->points.size() - 1;
      long long multiple = std::max<long long>(1, (8 + r_len - 1) / r_len);
      try {
        PeriodicLeafCertificate cert;
        try {
          cert = periodic_leaf_from_chain(f, fol, *loop, cfg.eps / 2.0, grid, multiple);
        } catch (const Error& e) {
          if (e.code() != ErrorCode::ShadowNotFound) throw;
          cert = periodic_leaf_from_chain(f, fol, *loop, cfg.eps, grid, multiple);
        }
        worst_offset = std::max(worst_offset, cert.offset_from_start);
        worst_defect = std::max(worst_defect, cert.leaf_return_defect);
        max_period = std::max(max_period, cert.period);
        if (cert.offset_from_start > cfg.eps) ++failures;
      } catch (const Error&) {
        ++failures;
      }
    }
    r["periodic_leaves"] = {{"failures", failures},
                            {"worst_offset", worst_offset},
                            {"worst_leaf_return_defect", worst_defect},
                            {"max_period", max_period}};
    out.pass = failures == 0 && worst_defect <= 1e-6;
  }
  return out;
}

StepOutput run_shadow(const ScenarioConfig& cfg) {
  StepOutput out;
  ToralMap f = scenario_map(cfg);
  LinearFoliation fol = scenario_foliation(cfg);
  Grid grid(cfg.dim, cfg.grid_n);
  std::mt19937_64 rng(cfg.seed);

  json trials = json::array();
  size_t failures = 0;
  double worst_offset = 0.0, worst_defect = 0.0;
  for (int t = 0; t < cfg.trials; ++t) {
    Trajectory target = random_pseudo_orbit(f, cfg.delta, cfg.orbit_length, rng);
    ShadowProblem p;
    p.map = &f;
    p.foliation = &fol;
    p.target = target;
    p.eps = cfg.eps;
    p.grid = &grid;
    json entry;
    auto sol = finite_shadow(p);
    entry["found"] = sol.has_value();
    if (sol) {
      ChainReport check = is_foliated_chain(f, fol, sol->trajectory, cfg.eps, kGeomTol);
      entry["max_offset"] = sol->max_offset;
      entry["worst_step_defect"] = check.worst_defect;
      entry["valid"] = check.valid && sol->max_offset <= cfg.eps + kGeomTol;
      if (!entry["valid"].get<bool>()) ++failures;
      worst_offset = std::max(worst_offset, sol->max_offset);
      worst_defect = std::max(worst_defect, check.worst_defect);
    } else {
      ++failures;
    }
    trials.push_back(std::move(entry));
  }
  out.report["trials"] = std::move(trials);
  out.report["failures"] = failures;
  out.report["worst_offset"] = worst_offset;
  out.report["worst_step_defect"] = worst_defect;
  out.pass = failures == 0;
  return out;
}

StepOutput run_semiconj(const ScenarioConfig& cfg) {
  StepOutput out;
  ToralMap f = scenario_map(cfg);
  ToralMap g = scenario_perturbed_map(cfg);
  LinearFoliation fol = scenario_foliation(cfg);
  Grid grid(cfg.dim, cfg.grid_n);
  double eps_prime = cfg.eps_prime > 0 ? cfg.eps_prime : cfg.eps / 8.0;
  std::mt19937_64 rng(cfg.seed);

  // Forward-closed sample chains, plus close pairs for the continuity sweep.
  std::vector<TorusPoint> samples;
  int chains = std::max(1, cfg.samples / std::max(1, cfg.chain_length));
  for (int c = 0; c < chains; ++c) {
    TorusPoint x = random_point(cfg.dim, rng);
    for (int k = 0; k < cfg.chain_length; ++k) {
      samples.push_back(x);
      x = g.apply(x);
    }
  }
  std::uniform_real_distribution<double> angle(0.0, 2.0 * 3.14159265358979323846);
  for (double d : cfg.delta_sweep) {
    for (int p = 0; p < 8; ++p) {
      TorusPoint x = random_point(cfg.dim, rng);
      Vec off(cfg.dim, 0.0);
      double a = angle(rng);
      off[0] = 0.9 * d * std::cos(a);
      if (cfg.dim > 1) off[1] = 0.9 * d * std::sin(a);
      samples.push_back(x);
      samples.push_back(wrap(add(x.coords, off)));
    }
  }

  SetValuedMap h = construct_semiconjugation(f, fol, g, eps_prime, cfg.horizon,
                                             grid, samples);
  StabilityReport sr = verify_stability_contract(h, f, fol, cfg.eps,
                                                 grid.cell_diameter() + kGeomTol);
  double valuation = verify_valuation(h, fol, cfg.eps0);
  // The rho budget is asserted only at the tightest sweep point; the larger
  // deltas are reported as the empirical continuity curve.
  double contract_delta = cfg.delta_sweep.empty()
                              ? 0.0
                              : 1.5 * *std::min_element(cfg.delta_sweep.begin(),
                                                        cfg.delta_sweep.end());
  auto table = verify_foliated_continuity(h, fol, cfg.eps0, cfg.rho,
                                          cfg.delta_sweep, contract_delta);

  json& r = out.report;
  r["eps_prime"] = eps_prime;
  r["sample_count"] = h.samples.size();
  r["c0_bound"] = sr.c0_bound;
  r["step_inclusion_defect"] = sr.step_inclusion_defect;
  r["valuation_defect"] = valuation;
  r["step_pairs_checked"] = sr.step_pairs_checked;
  json rows = json::array();
  bool continuity_ok = true;
  std::ostringstream csv;
  csv << "delta,observed_rho,pairs,in_contract\n";
  for (const ContinuityRow& row : table) {
    rows.push_back({{"delta", row.delta},
                    {"observed_rho", row.observed_rho},
                    {"pairs", row.pair_count},
                    {"in_contract", row.in_contract},
                    {"pass", row.pass}});
    csv << row.delta << "," << row.observed_rho << "," << row.pair_count << ","
        << (row.in_contract ? 1 : 0) << "\n";
    if (!row.pass) continuity_ok = false;
  }
  r["continuity"] = std::move(rows);
  out.files.emplace_back("continuity.csv", csv.str());
  out.pass = sr.pass && continuity_ok;
  r["contract_pass"] = sr.pass;
  return out;
}

StepOutput run_expansivity(const ScenarioConfig& cfg) {
  StepOutput out;
  ToralMap f = scenario_map(cfg);
  LinearFoliation fol = scenario_foliation(cfg);
  Grid grid(cfg.dim, cfg.grid_n);

  std::vector<double> es = cfg.e_list.empty() ? std::vector<double>{2.0 * cfg.eps0}
                                              : cfg.e_list;
  json table = json::array();
  bool all_as_expected = true;
  for (double e : es) {
    double eps0 = cfg.eps0_factor > 0 ? e * cfg.eps0_factor : cfg.eps0;
    double rho = cfg.rho_factor > 0 ? e * cfg.rho_factor : cfg.rho;
    ExpansivitySearchResult res = expansivity_violation_search(
        f, fol, e, eps0, rho, cfg.expansivity_horizon, grid);
    json entry;
    entry["e"] = e;
    entry["eps0"] = eps0;
    entry["rho"] = rho;
    entry["horizon"] = cfg.expansivity_horizon;
    entry["resolution"] = res.resolution;
    entry["explored_pairs"] = res.explored_pairs;
    entry["timed_out"] = res.timed_out;
    entry["witness_found"] = res.witness.has_value();
    if (res.witness) {
      const ExpansivityWitness& w = *res.witness;
      entry["witness"] = {{"x0", point_json(w.x_orbit.at_index(0))},
                          {"y0", point_json(w.y_orbit.at_index(0))},
                          {"max_pair_dist", w.max_pair_dist},
                          {"plaque_defect", w.plaque_defect}};
      if (fol.kind() == FoliationKind::Linear) {
        double tsep = fol.transverse_dist(w.x_orbit.at_index(0), w.y_orbit.at_index(0));
        entry["witness"]["transverse_separation"] = tsep;
      }
    }
    if (res.witness.has_value() != cfg.expect_witness) all_as_expected = false;
    table.push_back(std::move(entry));
  }
  out.report["expect_witness"] = cfg.expect_witness;
  out.report["scan"] = std::move(table);
  out.pass = all_as_expected;
  return out;
}

StepOutput run_quotient(const ScenarioConfig& cfg) {
  StepOutput out;
  ToralMap f = scenario_map(cfg);
  LinearFoliation fol = scenario_foliation(cfg);
  Grid grid(cfg.dim, cfg.grid_n);
  QuotientSystem qs = build_quotient_system(f, fol);
  TransferReport tr = transfer_shadowing_check(qs, f, cfg.delta, cfg.eps, grid,
                                               cfg.trials, cfg.orbit_length,
                                               cfg.seed);
  json& r = out.report;
  r["quotient_dim"] = qs.quotient_map.dim();
  r["quotient_matrix"] = qs.quotient_map.matrix();
  r["commute_defect"] = qs.commute_defect;
  r["trials"] = tr.trials.size();
  r["shadow_failures"] = tr.shadow_failures;
  r["worst_downstairs_step_defect"] = tr.worst_step_defect;
  r["worst_downstairs_offset"] = tr.worst_offset;
  out.pass = tr.pass && qs.commute_defect <= 1e-7;
  r["transfer_pass"] = tr.pass;
  return out;
}

StepOutput dispatch(const ScenarioConfig& cfg, const std::string& pipeline) {
  if (pipeline == "cr-set") return run_cr_set(cfg);
  if (pipeline == "shadow") return run_shadow(cfg);
  if (pipeline == "semiconj") return run_semiconj(cfg);
  if (pipeline == "expansivity-scan") return run_expansivity(cfg);
  if (pipeline == "quotient") return run_quotient(cfg);
  config_fail("unknown pipeline '" + pipeline + "'");
}

}  // namespace

RunResult run_scenario(const ScenarioConfig& cfg, const std::string& pipeline) {
  std::vector<std::string> steps;
  if (pipeline == "all") {
    steps = {"cr-set", "shadow"};
    steps.push_back("semiconj");
    steps.push_back("expansivity-scan");
    if (cfg.fol_kind != FoliationKind::WholeManifold) steps.push_back("quotient");
  } else {
    steps = {pipeline};
  }

  json report;
  report["scenario"] = cfg.name;
  report["version"] = kVersion;
  report["pipeline"] = pipeline;
  report["config"] = config_json(cfg);

  RunResult result;
  result.all_passed = true;
  json step_reports;
  std::filesystem::path dir(cfg.out_dir);
  for (const std::string& step : steps) {
    json entry;
    try {
      StepOutput so = dispatch(cfg, step);
      entry["pass"] = so.pass;
      entry["report"] = std::move(so.report);
      if (!so.pass) result.all_passed = false;
      for (auto& [name, data] : so.files) {
        std::filesystem::path p = dir / (cfg.name + "-" + step + "-" + name);
        write_atomic(p, data);
        result.files_written.push_back(p.string());
      }
    } catch (const Error& e) {
      entry["pass"] = false;
      entry["error"] = e.what();
      result.all_passed = false;
    }
    step_reports[step] = std::move(entry);
  }
  report["steps"] = std::move(step_reports);
  report["all_passed"] = result.all_passed;

  result.report_json = report.dump(2) + "\n";
  std::filesystem::path report_path = dir / (cfg.name + "-" + pipeline + ".json");
  write_atomic(report_path, result.report_json);
  result.files_written.push_back(report_path.string());

  json manifest;
  manifest["scenario"] = cfg.name;
  manifest["version"] = kVersion;
  manifest["pipeline"] = pipeline;
  manifest["config"] = config_json(cfg);
  manifest["files"] = result.files_written;
  manifest["all_passed"] = result.all_passed;
  std::filesystem::path manifest_path = dir / (cfg.name + "-manifest.json");
  write_atomic(manifest_path, manifest.dump(2) + "\n");
  result.files_written.push_back(manifest_path.string());
  return result;
}

}  // namespace folia
