// Command-line front end: maximize, verify-guarantee, bias-probe, gamma,
// plot, oracle.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "imm/graph.hpp"
#include "imm/harness/experiment.hpp"
#include "imm/harness/plot.hpp"
#include "imm/oracle.hpp"

namespace fs = std::filesystem;
using namespace imm;

namespace {

// Reads a key=value file and returns "--key value" pairs for every key not
// already given on the command line, so explicit flags override the file.
std::vector<std::string> config_args(const std::string& path, const std::set<std::string>& given) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::vector<std::string> out;
  std::string line;
  std::size_t lineno = 0;
  auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    const auto e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
  };
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError(lineno, path + ": expected key=value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key == "config" || given.count(key)) continue;
    out.push_back("--" + key);
    out.push_back(value);
  }
  return out;
}

// argv with config-file entries spliced in right after the subcommand name.
std::vector<std::string> expand_config(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  std::set<std::string> given;
  std::string config;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i].rfind("--", 0) != 0) continue;
    std::string key = args[i].substr(2);
    std::string value;
    if (const auto eq = key.find('='); eq != std::string::npos) {
      value = key.substr(eq + 1);
      key = key.substr(0, eq);
    } else if (key == "config" && i + 1 < args.size()) {
      value = args[i + 1];
    }
    given.insert(key);
    if (key == "config") config = value;
  }
  if (config.empty() || args.empty()) return args;
  auto extra = config_args(config, given);
  args.insert(args.begin() + 1, extra.begin(), extra.end());
  return args;
}

struct Flags {
  harness::ExperimentConfig cfg;
  std::string model = "wc";
  std::vector<std::string> variants{"imm"};
  std::string config;
  bool strict = false;
};

void add_common(CLI::App* sub, Flags& f, bool with_variants) {
  sub->add_option("--config", f.config, "key=value file; flags override it");
  sub->add_option("--graph", f.cfg.graph_path, "edge-list file")->required()->check(CLI::ExistingFile);
  sub->add_option("--model", f.model, "wc | explicit")->check(CLI::IsMember({"wc", "explicit"}));
  if (with_variants) {
    sub->add_option("--variant", f.variants, "imm | w1 | w2 (comma list)")
        ->delimiter(',')
        ->check(CLI::IsMember({"imm", "w1", "w2"}));
  }
  sub->add_option("--k", f.cfg.ks, "seed-set size(s), comma list")->delimiter(',');
  sub->add_option("--eps", f.cfg.eps, "accuracy in (0,1)");
  sub->add_option("--ell", f.cfg.ell, "confidence exponent");
  sub->add_option("--trials", f.cfg.trials, "trials per cell (trial t uses seed+t)");
  sub->add_option("--seed", f.cfg.seed, "base master seed");
  sub->add_option("--mc-runs", f.cfg.mc_runs, "forward simulations per spread estimate");
  sub->add_option("--threads", f.cfg.threads, "worker threads");
}

Graph load(const Flags& f) {
  Graph g = load_graph(f.cfg.graph_path, parse_model(f.model));
  if (g.self_loop_count() > 0) {
    std::cerr << "warning: " << g.self_loop_count() << " self-loop(s) in " << f.cfg.graph_path << '\n';
  }
  return g;
}

void finish_config(Flags& f) {
  f.cfg.model = parse_model(f.model);
  f.cfg.variants.clear();
  for (const auto& v : f.variants) f.cfg.variants.push_back(parse_variant(v));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"IMM influence maximization with stopping-time-safe variants"};
  app.require_subcommand(1);

  Flags max_f, ver_f, bias_f, orc_f;
  max_f.cfg.out_dir = "out";

  auto* maximize = app.add_subcommand("maximize", "run variants over a k grid and write a trial CSV");
  add_common(maximize, max_f, true);
  maximize->add_option("--out", max_f.cfg.out_dir, "output directory (results.csv)");
  maximize->add_flag("--zero-timings", max_f.cfg.zero_timings, "write 0 for timings (byte-stable CSV)");

  auto* verify = app.add_subcommand("verify-guarantee", "empirical failure rate against exact OPT");
  ver_f.variants = {"w1", "w2"};
  ver_f.cfg.ks = {2};
  ver_f.cfg.eps = 0.3;
  ver_f.cfg.trials = 200;
  ver_f.cfg.mc_runs = 1000;
  add_common(verify, ver_f, true);
  verify->add_flag("--strict", ver_f.strict, "exit 3 if any variant misses its threshold");

  auto* bias = app.add_subcommand("bias-probe", "coverage estimates with and without loop survival");
  bias_f.cfg.ks = {2};
  bias_f.cfg.eps = 0.3;
  bias_f.cfg.trials = 400;
  add_common(bias, bias_f, false);

  auto* gamma = app.add_subcommand("gamma", "binary-search the W2 inflation gamma");
  double g_n = 0, g_eps = 0.1, g_ell = 1.0;
  std::vector<double> g_k{50};
  gamma->add_option("--n", g_n, "node count")->required();
  gamma->add_option("--k", g_k, "seed-set size(s), comma list")->delimiter(',');
  gamma->add_option("--eps", g_eps, "accuracy in (0,1)");
  gamma->add_option("--ell", g_ell, "confidence exponent");

  auto* plot = app.add_subcommand("plot", "spread-vs-k and time-vs-k SVG charts from trial CSVs");
  std::vector<std::string> csvs;
  std::string plot_out = ".";
  plot->add_option("csv", csvs, "trial CSV files")->required()->check(CLI::ExistingFile);
  plot->add_option("--out", plot_out, "output directory (spread.svg, time.svg)");

  auto* oracle = app.add_subcommand("oracle", "exact OPT and sigma on a tiny graph");
  std::vector<NodeId> query;
  orc_f.cfg.ks = {1};
  add_common(oracle, orc_f, false);
  oracle->add_option("--seeds", query, "seed set to evaluate exactly (comma list)")->delimiter(',');

  try {
    auto args = expand_config(argc, argv);
    std::reverse(args.begin(), args.end());  // CLI11 consumes from the back
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }

  try {
    if (*maximize) {
      finish_config(max_f);
      const Graph g = load(max_f);
      harness::validate(max_f.cfg, g);
      const auto records = harness::maximize(g, max_f.cfg);
      fs::create_directories(max_f.cfg.out_dir);
      const auto path = fs::path(max_f.cfg.out_dir) / "results.csv";
      std::ofstream out(path);
      harness::write_csv(out, records, max_f.cfg.zero_timings);
      if (!out) throw std::runtime_error("failed writing " + path.string());
      std::cout << "wrote " << records.size() << " trial rows to " << path.string() << '\n';
    } else if (*verify) {
      finish_config(ver_f);
      const Graph g = load(ver_f);
      bool all_pass = true;
      for (Variant v : ver_f.cfg.variants) {
        for (std::size_t k : ver_f.cfg.ks) {
          const auto rep = harness::verify_guarantee(g, ver_f.cfg, v, k);
          harness::print_report(std::cout, rep);
          all_pass = all_pass && rep.pass;
        }
      }
      if (ver_f.strict && !all_pass) return 3;
    } else if (*bias) {
      finish_config(bias_f);
      const Graph g = load(bias_f);
      harness::validate(bias_f.cfg, g);
      const auto rep = harness::bias_probe(g, bias_f.cfg.ks.front(), bias_f.cfg.eps, bias_f.cfg.ell,
                                           bias_f.cfg.trials, bias_f.cfg.seed, bias_f.cfg.threads);
      harness::print_report(std::cout, rep);
    } else if (*gamma) {
      for (double k : g_k) {
        const auto audit = harness::gamma_audit(g_n, k, g_eps, g_ell);
        harness::print_audit(std::cout, g_n, k, g_eps, g_ell, audit);
        if (!audit.holds) return 4;
      }
    } else if (*plot) {
      std::vector<harness::CsvTable> tables;
      for (const auto& p : csvs) {
        std::ifstream in(p);
        tables.push_back(harness::read_trial_csv(in, p));
      }
      const auto figs = harness::render_figures(tables);
      fs::create_directories(plot_out);
      std::ofstream(fs::path(plot_out) / "spread.svg") << figs.spread_svg;
      std::ofstream(fs::path(plot_out) / "time.svg") << figs.time_svg;
      std::cout << "wrote spread.svg and time.svg to " << plot_out << '\n';
    } else if (*oracle) {
      finish_config(orc_f);
      const Graph g = load(orc_f);
      for (std::size_t k : orc_f.cfg.ks) {
        const auto opt = exact_opt(g, k);
        std::cout << "k=" << k << " OPT=" << std::setprecision(12) << opt.value << " set={";
        for (std::size_t i = 0; i < opt.set.size(); ++i) std::cout << (i ? "," : "") << opt.set[i];
        std::cout << "}\n";
      }
      if (!query.empty()) std::cout << "sigma(query)=" << std::setprecision(12) << exact_sigma(g, query) << '\n';
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
