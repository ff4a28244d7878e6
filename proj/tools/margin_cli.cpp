// Command-line surface for the margin-learning library: dataset generators
// (synthetic planted-margin, graph- and CSP-derived adversarial instances),
// the four learners, an evaluator, and the benchmark sweep harness.
//
// Exit codes: 0 success, 2 usage/validation error, 3 enumeration budget
// exhausted (partial report still written). All file writes are atomic
// (temp + rename). Report and CSV files zero out wallclock fields by default
// so reruns with identical config + seed are byte-identical; pass
// --timed-report to record real timings instead (timing always goes to
// stderr).

#include "CLI11.hpp"

#include "margin/chow.hpp"
#include "margin/clique.hpp"
#include "margin/csp.hpp"
#include "margin/erm.hpp"
#include "margin/error.hpp"
#include "margin/harness.hpp"
#include "margin/io.hpp"
#include "margin/learn_basic.hpp"
#include "margin/learn_staged.hpp"
#include "margin/perceptron.hpp"
#include "margin/types.hpp"

#include <cstdint>
#include <exception>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace {

using margin::json;

json vector_to_json(const margin::Vector& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

margin::Vector json_to_vector(const json& a) {
  if (!a.is_array()) throw std::invalid_argument("expected a JSON array of numbers");
  margin::Vector v(static_cast<Eigen::Index>(a.size()));
  Eigen::Index i = 0;
  for (const auto& x : a) v(i++) = x.get<double>();
  return v;
}

std::string default_sidecar(const std::string& out) { return out + ".sidecar.json"; }

void emit(const std::string& path, const std::string& content) {
  if (path.empty() || path == "-")
    std::cout << content << std::endl;
  else
    margin::atomic_write_text(path, content);
}

json reduction_sidecar(const margin::ReductionInstance& R, json config) {
  json side;
  side["gamma"] = R.gamma;
  side["kappa"] = R.kappa;
  side["epsilon"] = R.epsilon;
  side["alpha"] = R.alpha;
  json ep = json::object();
  for (const auto& [k, v] : R.exact_params) ep[k] = v;
  side["exact_params"] = ep;
  side["certificate"] = R.has_certificate ? vector_to_json(R.certificate.w) : json();
  side["flags"] = R.flags;
  side["config"] = std::move(config);
  return side;
}

struct GenSynthArgs {
  int dim = 20;
  int n = 2000;
  double gamma = 0.2;
  double eta = 0.0;
  std::uint64_t seed = 0;
  std::string out, sidecar;
};

int run_gen_synthetic(const GenSynthArgs& a) {
  margin::SyntheticSpec spec;
  spec.dim = a.dim;
  spec.n_samples = a.n;
  spec.gamma = a.gamma;
  spec.noise_rate = a.eta;
  spec.planted_seed = a.seed;
  margin::SyntheticData data = margin::gen_synthetic(spec);

  json config{{"command", "gen synthetic"}, {"dim", a.dim},   {"n", a.n},
              {"gamma", a.gamma},           {"eta", a.eta},   {"seed", a.seed},
              {"out", a.out},               {"sidecar", a.sidecar.empty() ? default_sidecar(a.out) : a.sidecar}};
  json meta{{"kind", "synthetic"}, {"gamma", a.gamma}, {"eta", a.eta}, {"seed", a.seed}};
  margin::write_jsonl(data.D, a.out, meta);

  json side;
  side["planted_w"] = vector_to_json(data.planted.w);
  side["gamma"] = a.gamma;
  side["eta"] = a.eta;
  side["seed"] = a.seed;
  side["flip_count"] = data.flip_indices.size();
  side["flip_mass"] = data.flip_mass;
  side["acceptance_estimate"] = data.acceptance_estimate;
  side["config"] = config;
  emit(a.sidecar.empty() ? default_sidecar(a.out) : a.sidecar, side.dump(2));
  return 0;
}

struct GenCliqueArgs {
  std::string graph;
  int k = 3;
  std::string out, sidecar;
};

int run_gen_clique(const GenCliqueArgs& a) {
  margin::Graph g = margin::graph_from_text(margin::read_text(a.graph));
  margin::ReductionInstance R = margin::reduce_clique(g, a.k);
  json config{{"command", "gen clique"},
              {"graph", a.graph},
              {"k", a.k},
              {"out", a.out},
              {"sidecar", a.sidecar.empty() ? default_sidecar(a.out) : a.sidecar}};
  json meta{{"kind", "clique"}, {"n", g.n}, {"k", a.k}, {"gamma", R.gamma}, {"kappa", R.kappa}};
  margin::write_jsonl(R.dataset, a.out, meta);
  emit(a.sidecar.empty() ? default_sidecar(a.out) : a.sidecar,
       reduction_sidecar(R, config).dump(2));
  return 0;
}

struct GenCspArgs {
  std::string instance;
  double nu = 0.1;
  std::string out, sidecar;
};

int run_gen_csp(const GenCspArgs& a) {
  margin::CspInstance L = margin::csp_from_json(json::parse(margin::read_text(a.instance)));
  margin::ReductionInstance R = margin::reduce_csp(L, a.nu);
  json config{{"command", "gen csp"},
              {"instance", a.instance},
              {"nu", a.nu},
              {"out", a.out},
              {"sidecar", a.sidecar.empty() ? default_sidecar(a.out) : a.sidecar}};
  json meta{{"kind", "csp"}, {"k", L.k}, {"gamma", R.gamma}, {"kappa", R.kappa},
            {"epsilon", R.epsilon}, {"alpha", R.alpha}};
  margin::write_jsonl(R.dataset, a.out, meta);
  emit(a.sidecar.empty() ? default_sidecar(a.out) : a.sidecar,
       reduction_sidecar(R, config).dump(2));
  return 0;
}

struct LearnArgs {
  std::string algo, data, out;
  double gamma = 0.0, eps = 0.1, delta = 1.0, alpha = 1.0, tau = 0.1;
  std::uint64_t seed = 0;
  std::uint64_t budget = 10'000'000;
  int passes = 1000;
  bool timed_report = false;
};

int run_learn(const LearnArgs& a) {
  margin::WeightedDataset D = margin::read_jsonl(a.data);
  margin::LearnParams p;
  p.gamma = a.gamma;
  p.epsilon = a.eps;
  p.delta_slack = a.delta;
  p.alpha = a.alpha;
  p.tau = a.tau;
  p.seed = a.seed;
  p.budget_cap = a.budget;

  margin::LearnReport rep;
  if (a.algo == "basic") rep = margin::learn_basic(D, p);
  else if (a.algo == "staged") rep = margin::learn_staged(D, p);
  else if (a.algo == "chow") rep = margin::learn_alpha(D, p);
  else if (a.algo == "perceptron") rep = margin::perceptron(D, a.passes, a.seed, a.gamma);
  else throw std::invalid_argument("unknown --algo: " + a.algo);

  json j = margin::report_to_json(rep, /*zero_wallclock=*/!a.timed_report);
  j["config"] = json{{"command", "learn"}, {"algo", a.algo}, {"data", a.data},
                     {"gamma", a.gamma},   {"eps", a.eps},   {"delta", a.delta},
                     {"alpha", a.alpha},   {"tau", a.tau},   {"seed", a.seed},
                     {"budget", a.budget}, {"passes", a.passes}};
  emit(a.out, j.dump(2));
  std::cerr << "learn: algo=" << a.algo << " wallclock_ms=" << rep.wallclock_ms
            << " candidates=" << rep.candidates_examined
            << (rep.truncated ? " TRUNCATED" : "") << "\n";
  return rep.truncated ? 3 : 0;
}

struct EvalArgs {
  std::string data, hypothesis, out;
  std::vector<double> gammas{0.0};
};

int run_eval(const EvalArgs& a) {
  margin::WeightedDataset D = margin::read_jsonl(a.data);
  json h = json::parse(margin::read_text(a.hypothesis));
  json warr;
  if (h.is_array()) warr = h;
  else if (h.contains("w")) warr = h["w"];
  else if (h.contains("hypothesis") && h["hypothesis"].contains("w")) warr = h["hypothesis"]["w"];
  else if (h.contains("certificate") && h["certificate"].is_array()) warr = h["certificate"];
  else if (h.contains("planted_w")) warr = h["planted_w"];
  else throw std::invalid_argument("hypothesis file: expected array, {w}, {hypothesis:{w}}, {certificate} or {planted_w}");
  margin::Vector w = json_to_vector(warr);
  if (static_cast<int>(w.size()) != D.dim)
    throw std::invalid_argument("hypothesis dimension " + std::to_string(w.size()) +
                                " != dataset dimension " + std::to_string(D.dim));

  json out;
  out["dim"] = D.dim;
  out["m"] = D.size();
  out["zero_one"] = margin::zero_one_error(D, margin::Halfspace{w});
  json per = json::array();
  for (double g : a.gammas)
    per.push_back(json{{"gamma", g}, {"margin_error", margin::margin_error(D, w, g)}});
  out["margin_errors"] = per;
  out["config"] = json{{"command", "eval"}, {"data", a.data},
                       {"hypothesis", a.hypothesis}, {"gammas", a.gammas}};
  emit(a.out, out.dump(2));
  return 0;
}

struct BenchArgs {
  std::string config, out_csv, out_json;
  bool timed_report = false;
};

int run_bench(const BenchArgs& a) {
  json cfg = json::parse(margin::read_text(a.config));
  std::vector<margin::SweepCell> cells;
  for (const auto& cj : cfg.at("cells")) {
    margin::SweepCell c;
    c.learner = cj.at("learner").get<std::string>();
    c.dim = cj.value("dim", c.dim);
    c.gamma = cj.value("gamma", c.gamma);
    c.eps = cj.value("eps", c.eps);
    c.delta = cj.value("delta", c.delta);
    c.alpha = cj.value("alpha", c.alpha);
    c.eta = cj.value("eta", c.eta);
    c.m_train = cj.value("m_train", c.m_train);
    c.m_test = cj.value("m_test", c.m_test);
    c.budget_cap = cj.value("budget_cap", c.budget_cap);
    c.max_passes = cj.value("max_passes", c.max_passes);
    c.oracle_resolution = cj.value("oracle_resolution", c.oracle_resolution);
    cells.push_back(c);
  }
  const std::uint64_t master_seed = cfg.value("master_seed", 0ull);
  margin::ExperimentReport rep = margin::sweep(cells, master_seed);
  std::int64_t total_ms = 0;
  for (auto& row : rep.rows) {
    total_ms += row.ms;
    if (!a.timed_report) row.ms = 0;
  }
  margin::atomic_write_text(a.out_csv, margin::sweep_csv(rep));
  json j = margin::sweep_json(rep);
  j["config"] = cfg;
  margin::atomic_write_text(a.out_json, j.dump(2));
  std::cerr << "bench: " << rep.rows.size() << " rows, total wallclock_ms=" << total_ms << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"margin: agnostic learning of gamma-margin halfspaces — generators, learners, evaluator, benchmarks"};
  app.require_subcommand(1);

  // ---- gen ----
  auto* gen = app.add_subcommand("gen", "Generate a weighted dataset (JSONL) plus sidecar JSON");
  gen->require_subcommand(1);

  GenSynthArgs gs;
  auto* gsyn = gen->add_subcommand("synthetic", "Planted margin-gamma halfspace with label noise");
  gsyn->add_option("--dim", gs.dim, "ambient dimension")->check(CLI::PositiveNumber);
  gsyn->add_option("--n", gs.n, "number of samples")->check(CLI::PositiveNumber);
  gsyn->add_option("--gamma", gs.gamma, "planted margin in (0,1)")->required();
  gsyn->add_option("--eta", gs.eta, "label flip rate in [0, 0.5)");
  gsyn->add_option("--seed", gs.seed, "planted/backing PRNG seed");
  gsyn->add_option("--out", gs.out, "output dataset JSONL path")->required();
  gsyn->add_option("--sidecar", gs.sidecar, "sidecar JSON path (default: <out>.sidecar.json)");

  GenCliqueArgs gc;
  auto* gcl = gen->add_subcommand("clique", "Instance from a graph: k-clique <=> low margin-error halfspace");
  gcl->add_option("--graph", gc.graph, "edge-list file: 'n m' header then 1-indexed 'i j' lines")->required();
  gcl->add_option("--k", gc.k, "clique size (2 <= k <= n)")->required();
  gcl->add_option("--out", gc.out, "output dataset JSONL path")->required();
  gcl->add_option("--sidecar", gc.sidecar, "sidecar JSON path (default: <out>.sidecar.json)");

  GenCspArgs gp;
  auto* gcsp = gen->add_subcommand("csp", "Instance from a regular k-CSP JSON file");
  gcsp->add_option("--instance", gp.instance, "CSP JSON: {variables, alphabet, constraints:[{scope, accepting}]}")->required();
  gcsp->add_option("--nu", gp.nu, "soundness value threshold in (0,1)")->required();
  gcsp->add_option("--out", gp.out, "output dataset JSONL path")->required();
  gcsp->add_option("--sidecar", gp.sidecar, "sidecar JSON path (default: <out>.sidecar.json)");

  // ---- learn ----
  LearnArgs la;
  auto* learn = app.add_subcommand("learn", "Run a learner on a dataset and write a report JSON");
  learn->add_option("--algo", la.algo, "basic | staged | chow | perceptron")->required();
  learn->add_option("--data", la.data, "dataset JSONL path")->required();
  learn->add_option("--gamma", la.gamma, "target margin gamma");
  learn->add_option("--eps", la.eps, "error slack epsilon");
  learn->add_option("--delta", la.delta, "staged learner approximation slack (1+delta)");
  learn->add_option("--alpha", la.alpha, "agnostic approximation factor (chow learner)");
  learn->add_option("--tau", la.tau, "confidence parameter");
  learn->add_option("--seed", la.seed, "PRNG seed");
  learn->add_option("--budget", la.budget, "candidate enumeration budget cap (default 10000000)");
  learn->add_option("--passes", la.passes, "perceptron: max passes over the data");
  learn->add_option("--out", la.out, "report path ('-' or empty: stdout)");
  learn->add_flag("--timed-report", la.timed_report, "include real wallclock_ms in the report file");

  // ---- eval ----
  EvalArgs ea;
  auto* ev = app.add_subcommand("eval", "Evaluate a hypothesis vector on a dataset");
  ev->add_option("--data", ea.data, "dataset JSONL path")->required();
  ev->add_option("--hypothesis", ea.hypothesis, "JSON file: array, {w:[...]}, learn report, or sidecar")->required();
  ev->add_option("--gammas", ea.gammas, "margin thresholds to evaluate")->delimiter(',');
  ev->add_option("--out", ea.out, "metrics path ('-' or empty: stdout)");

  // ---- bench ----
  BenchArgs ba;
  auto* bench = app.add_subcommand("bench", "Run a sweep from a config JSON; writes CSV + JSON");
  bench->add_option("--config", ba.config, "sweep config JSON: {master_seed, cells:[...]}")->required();
  bench->add_option("--out-csv", ba.out_csv, "CSV output path")->required();
  bench->add_option("--out-json", ba.out_json, "JSON output path")->required();
  bench->add_flag("--timed-report", ba.timed_report, "include real per-row ms in outputs");

  try {
    app.parse(argc, argv);
    if (gsyn->parsed()) return run_gen_synthetic(gs);
    if (gcl->parsed()) return run_gen_clique(gc);
    if (gcsp->parsed()) return run_gen_csp(gp);
    if (learn->parsed()) return run_learn(la);
    if (ev->parsed()) return run_eval(ea);
    if (bench->parsed()) return run_bench(ba);
    std::cerr << app.help() << "\n";
    return 2;
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
