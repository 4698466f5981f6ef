// Command-line harness over the cavity library: exact enumeration, message
// passing, sweeps, asymptotic limits, population dynamics, and graph
// generation, with deterministic CSV/JSON output.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "cavity/cavity.hpp"

namespace {

using nlohmann::ordered_json;

constexpr int kExitOk = 0;
constexpr int kExitInvalid = 2;
constexpr int kExitNoConvergence = 3;

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

// JSON has no inf/nan literals; keep them readable as strings.
ordered_json json_number(double x) {
  if (std::isfinite(x)) return x;
  return fmt(x);
}

struct Report {
  std::vector<std::pair<std::string, ordered_json>> scalars;
  std::vector<std::string> header;
  std::vector<std::vector<ordered_json>> rows;

  void scalar(const std::string& name, ordered_json value) {
    scalars.emplace_back(name, std::move(value));
  }
};

std::string cell_text(const ordered_json& v) {
  if (v.is_number_float()) return fmt(v.get<double>());
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  if (v.is_number_unsigned()) return std::to_string(v.get<unsigned long long>());
  if (v.is_boolean()) return v.get<bool>() ? "1" : "0";
  if (v.is_string()) return v.get<std::string>();
  return v.dump();
}

std::string to_csv(const Report& report) {
  std::string out;
  for (const auto& [name, value] : report.scalars)
    out += "# " + name + " = " + cell_text(value) + "\n";
  if (!report.header.empty()) {
    for (std::size_t i = 0; i < report.header.size(); ++i) {
      if (i) out += ',';
      out += report.header[i];
    }
    out += '\n';
    for (const auto& row : report.rows) {
      for (std::size_t i = 0; i < row.size(); ++i) {
        if (i) out += ',';
        out += cell_text(row[i]);
      }
      out += '\n';
    }
  }
  return out;
}

struct GlobalOptions {
  std::uint64_t seed = 0;
  int threads = 1;
  std::string out_path;
  std::string format = "csv";
};

void emit(const Report& report, const GlobalOptions& g,
          const std::string& command,
          const std::vector<std::pair<std::string, std::string>>& params,
          double wall_seconds) {
  std::string text;
  if (g.format == "json") {
    ordered_json record;
    record["command"] = command;
    ordered_json p;
    for (const auto& [k, v] : params) p[k] = v;
    record["parameters"] = p;
    record["seed"] = g.seed;
    record["tool_version"] = cavity::kToolVersion;
    record["wall_time_s"] = wall_seconds;
    ordered_json scalars;
    for (const auto& [k, v] : report.scalars) scalars[k] = v;
    ordered_json table;
    table["header"] = report.header;
    ordered_json rows = ordered_json::array();
    for (const auto& row : report.rows) {
      ordered_json r = ordered_json::array();
      for (const auto& cell : row) r.push_back(cell);
      rows.push_back(std::move(r));
    }
    table["rows"] = std::move(rows);
    record["outputs"] =
        ordered_json{{"scalars", std::move(scalars)}, {"table", std::move(table)}};
    text = record.dump(2);
    text += '\n';
  } else {
    text = to_csv(report);
  }
  if (g.out_path.empty()) {
    std::cout << text;
  } else {
    std::ofstream f(g.out_path, std::ios::binary);
    if (!f) throw std::invalid_argument("cannot open output file " + g.out_path);
    f << text;
  }
}

cavity::Network load_network_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::invalid_argument("cannot open network file " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return cavity::load_network(ss.str());
}

double parse_activity(std::string text) {
  std::transform(text.begin(), text.end(), text.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  if (text == "inf" || text == "infinity") return cavity::kInf;
  std::size_t used = 0;
  double t = 0.0;
  try {
    t = std::stod(text, &used);
  } catch (const std::exception&) {
    throw std::invalid_argument("cannot parse activity '" + text + "'");
  }
  if (used != text.size() || !(t >= 0.0))
    throw std::invalid_argument("activity must be a nonnegative number or inf");
  return t;
}

// Grid syntax: "a,b,c" explicit, "lo:hi:n" linear, "lo:hi:nlog" geometric.
std::vector<double> parse_grid(const std::string& text) {
  std::vector<double> grid;
  if (text.find(':') != std::string::npos) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ':')) parts.push_back(item);
    if (parts.size() != 3) throw std::invalid_argument("grid must be lo:hi:n");
    double lo = parse_activity(parts[0]);
    double hi = parse_activity(parts[1]);
    bool log_spaced = false;
    std::string count = parts[2];
    if (count.size() > 3 && count.substr(count.size() - 3) == "log") {
      log_spaced = true;
      count = count.substr(0, count.size() - 3);
    }
    int n = std::stoi(count);
    if (n < 2 || !(lo > 0.0 || !log_spaced) || !(hi > lo))
      throw std::invalid_argument("bad grid bounds");
    for (int i = 0; i < n; ++i) {
      double frac = static_cast<double>(i) / (n - 1);
      grid.push_back(log_spaced
                         ? std::exp(std::log(lo) + frac * (std::log(hi) - std::log(lo)))
                         : lo + frac * (hi - lo));
    }
  } else {
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) grid.push_back(parse_activity(item));
    if (grid.empty()) throw std::invalid_argument("empty grid");
  }
  return grid;
}

std::vector<double> parse_probs(const std::string& text) {
  std::vector<double> probs;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) probs.push_back(std::stod(item));
  return probs;
}

// Shared degree-law flags: either an explicit histogram or a Poisson mean.
struct LawOptions {
  std::string pi_text;
  double c = -1.0;

  bool has_poisson() const { return c >= 0.0; }
  cavity::DegreeDistribution build() const {
    if (has_poisson() && !pi_text.empty())
      throw std::invalid_argument("give either --pi or --c, not both");
    if (has_poisson()) return cavity::DegreeDistribution::poisson_truncated(c);
    if (!pi_text.empty())
      return cavity::DegreeDistribution::explicit_probs(parse_probs(pi_text));
    throw std::invalid_argument("a degree law is required (--pi or --c)");
  }
};

void add_law_flags(CLI::App* cmd, LawOptions* law) {
  cmd->add_option("--pi", law->pi_text,
                  "explicit degree probabilities, comma separated");
  cmd->add_option("--c", law->c, "Poisson mean degree");
}

struct EnsembleSpec {
  std::string model = "er";
  int n = 2000;
  double c = 2.0;
  int d = 3;
  std::string pi_text;
  int b = 1;

  cavity::Network build(std::uint64_t seed, cavity::PairingStats* stats) const {
    if (model == "er") return cavity::erdos_renyi(n, c, seed, b);
    if (model == "regular") return cavity::random_regular(n, d, seed, b, stats);
    if (model == "conf") {
      if (pi_text.empty())
        throw std::invalid_argument("conf model needs --pi");
      return cavity::configuration_model(
          cavity::DegreeDistribution::explicit_probs(parse_probs(pi_text)), n,
          seed, b, stats);
    }
    throw std::invalid_argument("unknown model '" + model + "'");
  }

  // The local-limit degree law the generated graphs approach.
  cavity::DegreeDistribution limit_law() const {
    if (model == "er") return cavity::DegreeDistribution::poisson_truncated(c);
    if (model == "regular") {
      std::vector<double> probs(static_cast<std::size_t>(d) + 1, 0.0);
      probs.back() = 1.0;
      return cavity::DegreeDistribution::explicit_probs(std::move(probs));
    }
    return cavity::DegreeDistribution::explicit_probs(parse_probs(pi_text));
  }
};

void add_ensemble_flags(CLI::App* cmd, EnsembleSpec* spec) {
  cmd->add_option("--model", spec->model, "er | regular | conf")
      ->check(CLI::IsMember({"er", "regular", "conf"}));
  cmd->add_option("--n", spec->n, "number of vertices");
  cmd->add_option("--c", spec->c, "ER mean degree");
  cmd->add_option("--d", spec->d, "regular degree");
  cmd->add_option("--pi", spec->pi_text, "conf model degree probabilities");
  cmd->add_option("--b", spec->b, "per-vertex capacity");
}

int run_exact(const std::string& net_path, double t, Report& report) {
  cavity::Network net = load_network_file(net_path);
  cavity::PartitionPolynomial poly = cavity::partition_polynomial(net);
  report.scalar("n_vertices", net.n_vertices());
  report.scalar("n_edges", net.n_edges());
  report.scalar("t", json_number(t));
  report.scalar("m", poly.max_rank());
  report.scalar("log_z", json_number(cavity::exact_log_z(poly, t)));
  report.scalar("energy", json_number(cavity::exact_energy(poly, t)));
  std::vector<double> probs = cavity::exact_all_edge_probabilities(net, t);
  report.header = {"edge", "u", "v", "p_exact"};
  for (int e = 0; e < net.n_edges(); ++e)
    report.rows.push_back({e, net.edges()[static_cast<std::size_t>(e)].first,
                           net.edges()[static_cast<std::size_t>(e)].second,
                           json_number(probs[static_cast<std::size_t>(e)])});
  return kExitOk;
}

int run_bp(const std::string& net_path, const std::string& t_text, double tol,
           std::size_t iters, Report& report) {
  cavity::Network net = load_network_file(net_path);
  double t = parse_activity(t_text);
  cavity::SolveOptions opts;
  opts.tol = tol;
  opts.max_iters = iters;
  cavity::CavitySolution sol;
  if (cavity::is_infinite(t)) {
    sol = cavity::solve_infinite_activity(net, opts);
    report.scalar("t", "inf");
    report.scalar("converged", sol.converged);
    report.scalar("iterations", sol.iterations);
    report.scalar("gap", json_number(sol.gap));
    double m = cavity::rank_estimate(net, sol);
    report.scalar("rank_estimate", json_number(m));
    report.scalar("rank_per_vertex", json_number(m / net.n_vertices()));
  } else {
    sol = cavity::solve_cavity(net, t, opts);
    report.scalar("t", json_number(t));
    report.scalar("converged", sol.converged);
    report.scalar("iterations", sol.iterations);
    report.scalar("gap", json_number(sol.gap));
    if (sol.converged) {
      cavity::EnergyReport energy = cavity::energy_at(net, sol);
      report.scalar("energy", json_number(energy.total));
      report.scalar("energy_per_vertex",
                    json_number(energy.total / net.n_vertices()));
    }
  }
  report.header = {"arc", "source", "target", "lower", "upper"};
  for (int a = 0; a < net.n_arcs(); ++a)
    report.rows.push_back({a, net.arc_source(a), net.arc_target(a),
                           json_number(sol.lower[static_cast<std::size_t>(a)]),
                           json_number(sol.upper[static_cast<std::size_t>(a)])});
  return sol.converged ? kExitOk : kExitNoConvergence;
}

int run_compare(const std::string& net_path, double t, double tol,
                std::size_t iters, Report& report) {
  cavity::Network net = load_network_file(net_path);
  if (cavity::is_infinite(t))
    throw std::invalid_argument("compare needs a finite activity");
  cavity::SolveOptions opts;
  opts.tol = tol;
  opts.max_iters = iters;
  cavity::CavitySolution sol = cavity::solve_cavity(net, t, opts);

  cavity::PartitionPolynomial poly = cavity::partition_polynomial(net);
  double u_exact = cavity::exact_energy(poly, t);
  report.scalar("t", json_number(t));
  report.scalar("converged", sol.converged);
  report.scalar("gap", json_number(sol.gap));
  report.scalar("energy_exact", json_number(u_exact));
  double u_bp = cavity::kInf;
  if (sol.converged) {
    u_bp = cavity::energy_at(net, sol).total;
    report.scalar("energy_bp", json_number(u_bp));
    report.scalar("energy_abs_diff", json_number(std::abs(u_bp - u_exact)));
  }

  // Maximum-size comparison rides along; its possibly open bracket is
  // reported but does not drive the exit code.
  cavity::CavitySolution inf_sol = cavity::solve_infinite_activity(net, opts);
  report.scalar("m_exact", poly.max_rank());
  report.scalar("m_bp", json_number(cavity::rank_estimate(net, inf_sol)));
  report.scalar("m_bp_converged", inf_sol.converged);

  std::vector<double> exact_probs = cavity::exact_all_edge_probabilities(net, t);
  report.header = {"edge", "u", "v", "p_exact", "p_bp", "abs_diff"};
  double max_diff = 0.0;
  for (int e = 0; e < net.n_edges(); ++e) {
    double pe = exact_probs[static_cast<std::size_t>(e)];
    double pb = sol.converged ? cavity::edge_probability(net, sol, e)
                              : std::nan("");
    double diff = std::abs(pb - pe);
    if (sol.converged) max_diff = std::max(max_diff, diff);
    report.rows.push_back({e, net.edges()[static_cast<std::size_t>(e)].first,
                           net.edges()[static_cast<std::size_t>(e)].second,
                           json_number(pe), json_number(pb),
                           json_number(diff)});
  }
  report.scalar("max_edge_abs_diff",
                sol.converged ? json_number(max_diff) : ordered_json("nan"));
  return sol.converged ? kExitOk : kExitNoConvergence;
}

int run_sweep(const std::string& net_path, const std::string& grid_text,
              double tol, std::size_t iters, double fe_tol, Report& report) {
  cavity::Network net = load_network_file(net_path);
  std::vector<double> grid = parse_grid(grid_text);
  bool oracle = net.n_edges() <= 24;
  cavity::PartitionPolynomial poly;
  if (oracle) poly = cavity::partition_polynomial(net);

  report.scalar("n_vertices", net.n_vertices());
  report.scalar("n_edges", net.n_edges());
  report.header = {"t", "u_bp", "gap", "converged", "u_exact", "free_entropy"};
  bool all_converged = true;
  for (double t : grid) {
    cavity::SolveOptions opts;
    opts.tol = tol;
    opts.max_iters = iters;
    cavity::CavitySolution sol = cavity::solve_cavity(net, t, opts);
    double u_bp = std::nan("");
    if (sol.converged) u_bp = cavity::energy_at(net, sol).total;
    double fe = std::nan("");
    try {
      fe = cavity::free_entropy(net, t, fe_tol).value;
    } catch (const std::runtime_error&) {
      all_converged = false;
    }
    if (!sol.converged) all_converged = false;
    report.rows.push_back(
        {json_number(t), json_number(u_bp), json_number(sol.gap),
         sol.converged,
         oracle ? json_number(cavity::exact_energy(poly, t))
                : ordered_json("nan"),
         json_number(fe)});
  }
  return all_converged ? kExitOk : kExitNoConvergence;
}

int run_limit(const LawOptions& law, int b, int grid_n, double tol,
              Report& report) {
  cavity::LimitSpec spec{law.build(), b};
  cavity::MinimaReport rep = cavity::historical_minima(spec, grid_n, tol);
  report.scalar("mean_degree", json_number(spec.pi.mean()));
  report.scalar("b", b);
  report.scalar("min_density", json_number(rep.min_density));
  report.scalar("tangential_suspect", rep.tangential_suspect);
  if (b == 1 && law.has_poisson())
    report.scalar("karp_sipser", json_number(cavity::karp_sipser_density(law.c)));
  report.header = {"root", "density", "historical"};
  for (std::size_t i = 0; i < rep.roots.size(); ++i)
    report.rows.push_back({json_number(rep.roots[i]),
                           json_number(rep.densities[i]),
                           static_cast<bool>(rep.historical[i])});
  return kExitOk;
}

int run_rde(const LawOptions& law, int b, double s_init, std::size_t pool,
            std::size_t iters, std::size_t n_eval, bool no_floor_stop,
            std::uint64_t seed, Report& report) {
  cavity::DegreeDistribution pi = law.build();
  cavity::DegreeDistribution pi_hat = cavity::size_biased(pi);
  double floor = 3.0 / std::sqrt(static_cast<double>(pool));
  report.scalar("b", b);
  report.scalar("pool", pool);
  report.scalar("noise_floor", json_number(floor));

  report.header = {"n", "s", "m_estimate", "std_error"};
  cavity::PopulationPool current = cavity::initial_pool(pool, s_init);
  auto positive_fraction = [](const cavity::PopulationPool& p) {
    std::size_t k = 0;
    for (double x : p.samples)
      if (x > 0.0) ++k;
    return static_cast<double>(k) / static_cast<double>(p.samples.size());
  };
  double s_prev = positive_fraction(current);
  for (std::size_t n = 0;; ++n) {
    cavity::MeanEstimate est = cavity::size_density_of(
        current, pi, b, n_eval, cavity::CounterRng::derive(seed, n));
    double s_now = positive_fraction(current);
    report.rows.push_back({static_cast<long long>(n), json_number(s_now),
                           json_number(est.mean), json_number(est.std_error)});
    if (n == iters) break;
    if (!no_floor_stop && n > 0 && std::abs(s_now - s_prev) < floor) break;
    s_prev = s_now;
    cavity::PopulationPool growth =
        cavity::growth_generation(current, pi_hat, b, seed, 2 * n);
    current = cavity::ratio_generation(growth, pi_hat, b, seed, 2 * n + 1);
  }
  return kExitOk;
}

int run_ensemble(const EnsembleSpec& spec, int n_seeds,
                 const std::string& t_text, double tol, std::size_t iters,
                 int threads, std::uint64_t base_seed, Report& report) {
  if (n_seeds < 1) throw std::invalid_argument("need at least one seed");
  double t = parse_activity(t_text);

  struct Row {
    std::uint64_t seed = 0;
    int n_vertices = 0;
    int n_edges = 0;
    double estimate = 0.0;
    double per_vertex = 0.0;
    double gap = 0.0;
    std::size_t iterations = 0;
    bool converged = false;
  };
  std::vector<Row> rows(static_cast<std::size_t>(n_seeds));
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(n_seeds));

  auto run_one = [&](std::size_t i) {
    Row row;
    row.seed = base_seed + i;
    cavity::Network net = spec.build(row.seed, nullptr);
    row.n_vertices = net.n_vertices();
    row.n_edges = net.n_edges();
    cavity::SolveOptions opts;
    opts.tol = tol;
    opts.max_iters = iters;
    if (cavity::is_infinite(t)) {
      cavity::CavitySolution sol = cavity::solve_infinite_activity(net, opts);
      row.estimate = cavity::rank_estimate(net, sol);
      row.gap = sol.gap;
      row.iterations = sol.iterations;
      row.converged = sol.converged;
    } else {
      cavity::CavitySolution sol = cavity::solve_cavity(net, t, opts);
      row.estimate = sol.converged ? cavity::energy_at(net, sol).total
                                   : std::nan("");
      row.gap = sol.gap;
      row.iterations = sol.iterations;
      row.converged = sol.converged;
    }
    row.per_vertex = row.estimate / row.n_vertices;
    rows[i] = row;
  };

  int n_workers = std::clamp(threads, 1, 64);
  std::atomic<std::size_t> cursor{0};
  auto worker = [&] {
    for (std::size_t i; (i = cursor.fetch_add(1)) < rows.size();) {
      try {
        run_one(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (n_workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < n_workers; ++w) pool.emplace_back(worker);
    for (std::thread& th : pool) th.join();
  }
  for (const std::exception_ptr& err : errors)
    if (err) std::rethrow_exception(err);

  report.header = {"seed",       "n_vertices", "n_edges", "estimate",
                   "per_vertex", "gap",        "iterations", "converged"};
  cavity::KahanSum mean_acc;
  bool all_converged = true;
  for (const Row& row : rows) {
    mean_acc.add(row.per_vertex);
    all_converged = all_converged && row.converged;
    report.rows.push_back({row.seed, row.n_vertices, row.n_edges,
                           json_number(row.estimate),
                           json_number(row.per_vertex), json_number(row.gap),
                           row.iterations, row.converged});
  }
  double mean = mean_acc.value() / n_seeds;
  cavity::KahanSum var_acc;
  for (const Row& row : rows) {
    double d = row.per_vertex - mean;
    var_acc.add(d * d);
  }
  double stddev =
      n_seeds > 1 ? std::sqrt(var_acc.value() / (n_seeds - 1)) : 0.0;
  report.scalar("mean_per_vertex", json_number(mean));
  report.scalar("stddev_per_vertex", json_number(stddev));

  if (cavity::is_infinite(t)) {
    cavity::LimitSpec limit{spec.limit_law(), spec.b};
    double target = cavity::historical_minima(limit).min_density;
    report.scalar("analytic_target", json_number(target));
    report.scalar("abs_gap", json_number(std::abs(mean - target)));
  }
  return all_converged ? kExitOk : kExitNoConvergence;
}

int run_gen(const EnsembleSpec& spec, std::uint64_t seed,
            const std::string& out_path) {
  cavity::PairingStats stats;
  cavity::Network net = spec.build(seed, &stats);
  std::string text = cavity::save_network(net);
  if (out_path.empty()) {
    std::cout << text;
  } else {
    std::ofstream f(out_path, std::ios::binary);
    if (!f) throw std::invalid_argument("cannot open output file " + out_path);
    f << text;
  }
  if (spec.model != "er")
    std::cerr << "pairing erased " << stats.self_loops_removed
              << " self-loops, " << stats.parallel_removed
              << " duplicate edges\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"degree-constrained subgraph toolkit"};
  app.require_subcommand(1);

  GlobalOptions g;
  app.add_option("--seed", g.seed, "RNG seed")->capture_default_str();
  app.add_option("--threads", g.threads, "worker threads for ensemble runs")
      ->capture_default_str();
  app.add_option("--out", g.out_path, "output file (default stdout)");
  app.add_option("--format", g.format, "csv | json")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();

  std::string net_path;
  std::string t_text = "1";
  double t_value = 1.0;
  double tol = 1e-10;
  std::size_t iters = 0;
  double fe_tol = 1e-8;
  std::string grid_text = "0.1:10:20log";

  CLI::App* cmd_exact = app.add_subcommand("exact", "enumeration oracle report");
  cmd_exact->add_option("net", net_path, "network JSON file")->required();
  cmd_exact->add_option("--t", t_value, "activity")->capture_default_str();

  CLI::App* cmd_bp = app.add_subcommand("bp", "cavity fixed point");
  cmd_bp->add_option("net", net_path, "network JSON file")->required();
  cmd_bp->add_option("--t", t_text, "activity, or inf")->capture_default_str();
  cmd_bp->add_option("--tol", tol, "bracket tolerance")->capture_default_str();
  cmd_bp->add_option("--iters", iters, "max sweeps (0 = auto)")
      ->capture_default_str();

  CLI::App* cmd_compare =
      app.add_subcommand("compare", "oracle vs cavity side by side");
  cmd_compare->add_option("net", net_path, "network JSON file")->required();
  cmd_compare->add_option("--t", t_value, "activity")->capture_default_str();
  cmd_compare->add_option("--tol", tol, "bracket tolerance")
      ->capture_default_str();
  cmd_compare->add_option("--iters", iters, "max sweeps (0 = auto)")
      ->capture_default_str();

  CLI::App* cmd_sweep = app.add_subcommand("sweep", "activity sweep CSV");
  cmd_sweep->add_option("net", net_path, "network JSON file")->required();
  cmd_sweep->add_option("--t-grid", grid_text,
                        "comma list, lo:hi:n, or lo:hi:nlog")
      ->capture_default_str();
  cmd_sweep->add_option("--tol", tol, "bracket tolerance")
      ->capture_default_str();
  cmd_sweep->add_option("--iters", iters, "max sweeps (0 = auto)")
      ->capture_default_str();
  cmd_sweep->add_option("--fe-tol", fe_tol, "free entropy tolerance")
      ->capture_default_str();

  LawOptions law;
  int b = 1;
  int grid_n = 10000;
  double root_tol = 1e-12;
  CLI::App* cmd_limit =
      app.add_subcommand("limit", "asymptotic size density census");
  add_law_flags(cmd_limit, &law);
  cmd_limit->add_option("--b", b, "capacity")->capture_default_str();
  cmd_limit->add_option("--grid", grid_n, "scan grid points")
      ->capture_default_str();
  cmd_limit->add_option("--tol", root_tol, "root refinement tolerance")
      ->capture_default_str();

  double s_init = 0.5;
  std::size_t pool = 100000;
  std::size_t rde_iters = 200;
  std::size_t n_eval = 10000;
  bool no_floor_stop = false;
  CLI::App* cmd_rde = app.add_subcommand("rde", "population dynamics");
  add_law_flags(cmd_rde, &law);
  cmd_rde->add_option("--b", b, "capacity")->capture_default_str();
  cmd_rde->add_option("--s-init", s_init, "initial positive fraction")
      ->capture_default_str();
  cmd_rde->add_option("--pool", pool, "population size")->capture_default_str();
  cmd_rde->add_option("--iters", rde_iters, "max iterations")
      ->capture_default_str();
  cmd_rde->add_option("--eval", n_eval, "Monte Carlo size evaluations per row")
      ->capture_default_str();
  cmd_rde->add_flag("--no-floor-stop", no_floor_stop,
                    "run all iterations, ignore the noise floor");

  EnsembleSpec spec;
  int n_seeds = 10;
  CLI::App* cmd_ensemble =
      app.add_subcommand("ensemble", "aggregate estimate over random graphs");
  add_ensemble_flags(cmd_ensemble, &spec);
  cmd_ensemble->add_option("--seeds", n_seeds, "number of graphs")
      ->capture_default_str();
  cmd_ensemble->add_option("--t", t_text, "activity, or inf")
      ->capture_default_str();
  cmd_ensemble->add_option("--tol", tol, "bracket tolerance")
      ->capture_default_str();
  cmd_ensemble->add_option("--iters", iters, "max sweeps (0 = auto)")
      ->capture_default_str();

  CLI::App* cmd_gen = app.add_subcommand("gen", "write a random network file");
  add_ensemble_flags(cmd_gen, &spec);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInvalid;
  }

  auto started = std::chrono::steady_clock::now();
  Report report;
  int code = kExitOk;
  std::string command;
  std::vector<std::pair<std::string, std::string>> params;
  auto param = [&](const std::string& k, const std::string& v) {
    params.emplace_back(k, v);
  };

  try {
    if (cmd_exact->parsed()) {
      command = "exact";
      param("net", net_path);
      param("t", fmt(t_value));
      code = run_exact(net_path, t_value, report);
    } else if (cmd_bp->parsed()) {
      command = "bp";
      param("net", net_path);
      param("t", t_text);
      param("tol", fmt(tol));
      code = run_bp(net_path, t_text, tol, iters, report);
    } else if (cmd_compare->parsed()) {
      command = "compare";
      param("net", net_path);
      param("t", fmt(t_value));
      code = run_compare(net_path, t_value, tol, iters, report);
    } else if (cmd_sweep->parsed()) {
      command = "sweep";
      param("net", net_path);
      param("t_grid", grid_text);
      code = run_sweep(net_path, grid_text, tol, iters, fe_tol, report);
    } else if (cmd_limit->parsed()) {
      command = "limit";
      param("b", std::to_string(b));
      code = run_limit(law, b, grid_n, root_tol, report);
    } else if (cmd_rde->parsed()) {
      command = "rde";
      param("b", std::to_string(b));
      param("s_init", fmt(s_init));
      param("pool", std::to_string(pool));
      code = run_rde(law, b, s_init, pool, rde_iters, n_eval, no_floor_stop,
                     g.seed, report);
    } else if (cmd_ensemble->parsed()) {
      command = "ensemble";
      param("model", spec.model);
      param("n", std::to_string(spec.n));
      param("b", std::to_string(spec.b));
      param("seeds", std::to_string(n_seeds));
      param("t", t_text);
      code = run_ensemble(spec, n_seeds, t_text, tol, iters, g.threads, g.seed,
                          report);
    } else if (cmd_gen->parsed()) {
      command = "gen";
      param("model", spec.model);
      param("n", std::to_string(spec.n));
      param("b", std::to_string(spec.b));
      return run_gen(spec, g.seed, g.out_path);
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const std::length_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const std::runtime_error& e) {
    std::cerr << "did not converge: " << e.what() << "\n";
    return kExitNoConvergence;
  } catch (const std::logic_error& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 70;
  }

  double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started)
          .count();
  emit(report, g, command, params, wall);
  return code;
}
