#include "linkpred/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "linkpred/error.hpp"
#include "linkpred/eval.hpp"
#include "linkpred/model_select.hpp"
#include "linkpred/scores.hpp"
#include "linkpred/similarity.hpp"
#include "linkpred/simgen.hpp"
#include "linkpred/solver.hpp"

namespace linkpred::cli {

namespace fs = std::filesystem;

namespace {

template <typename F>
auto stage(const std::string& name, F&& body) {
  try {
    return body();
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError(name, e.what());
  }
}

std::string bool_text(bool b) { return b ? "true" : "false"; }

std::optional<double> parse_sigma(const std::string& text) {
  if (text == "auto") return std::nullopt;
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::logic_error&) {
    throw DomainError("sigma must be 'auto' or a number, got '" + text + "'");
  }
}

std::vector<double> parse_grid(const std::string& text, Index n) {
  if (text.empty()) return default_lambda_grid(n);
  std::vector<double> grid;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      grid.push_back(std::stod(item));
    } catch (const std::logic_error&) {
      throw DomainError("bad lambda grid value '" + item + "'");
    }
  }
  return grid;
}

SolveMethod parse_method(const std::string& text) {
  if (text == "direct") return SolveMethod::direct;
  if (text == "bcd") return SolveMethod::bcd;
  throw DomainError("method must be 'direct' or 'bcd', got '" + text + "'");
}

CvScore parse_cv_score(const std::string& text) {
  if (text == "sse") return CvScore::sse;
  if (text == "auc") return CvScore::auc;
  throw DomainError("cv score must be 'sse' or 'auc', got '" + text + "'");
}

SolverConfig solver_config(const RunConfig& c) {
  SolverConfig s;
  s.lambda = c.lambda;
  s.q = c.q;
  s.method = parse_method(c.method);
  s.tol = c.tol;
  s.max_sweeps = c.max_sweeps;
  s.validate();
  return s;
}

// Builds W for an observed network; `x` and `labels` are optional sources.
SimilarityMatrix build_similarity(const RunConfig& c, const AdjacencyMatrix& a,
                                  const CovariateTable* x,
                                  const std::vector<int>* labels) {
  SimilarityMatrix w;
  if (c.similarity == "covariates") {
    if (!x || x->dimension() == 0) {
      throw InputError("similarity 'covariates' needs --covariates");
    }
    if (x->size() != a.size()) {
      throw InputError("covariates have " + std::to_string(x->size()) +
                       " rows but the network has " + std::to_string(a.size()) +
                       " nodes");
    }
    w = covariate_kernel(*x, parse_sigma(c.sigma));
  } else if (c.similarity == "jaccard") {
    w = jaccard(a);
  } else if (c.similarity == "fraction-match") {
    w = fraction_match(a);
  } else if (c.similarity == "file") {
    if (c.similarity_file.empty()) throw InputError("similarity 'file' needs --similarity-file");
    w = read_similarity(c.similarity_file, a.size());
  } else if (c.similarity == "oracle") {
    if (!labels) throw InputError("oracle similarity is only available for sbm simulations");
    w = block_indicator(*labels);
  } else {
    throw DomainError("unknown similarity source '" + c.similarity + "'");
  }
  return truncate(w, c.truncate);
}

Manifest base_manifest(const RunConfig& c) {
  Manifest m;
  m["command"] = c.subcommand;
  m["seed"] = std::to_string(c.seed);
  const auto& s = c.subcommand;
  if (s == "predict" || s == "tune" || s == "evaluate") {
    m["input"] = c.input;
    m["n"] = std::to_string(c.n);
    m["directed"] = bool_text(c.directed);
    m["mask"] = c.mask;
  }
  if (s == "evaluate") {
    m["truth"] = c.truth;
    m["scores"] = c.scores;
    m.erase("input");
    return m;
  }
  if (s == "predict" || s == "tune") {
    m["covariates"] = c.covariates;
    m["covariates-header"] = bool_text(c.covariates_header);
    m["similarity-file"] = c.similarity_file;
  }
  if (s == "simulate") {
    m["model"] = c.model;
    m["n"] = std::to_string(c.n);
    m["alpha"] = format_double(c.alpha);
    m["beta"] = format_double(c.beta);
    m["reps"] = std::to_string(c.reps);
    m["sbm-blocks"] = std::to_string(c.sbm_blocks);
    m["sbm-within"] = format_double(c.sbm_within);
    m["sbm-between"] = format_double(c.sbm_between);
    m["save-instances"] = bool_text(c.save_instances);
  }
  m["similarity"] = c.similarity;
  m["sigma"] = c.sigma;
  m["truncate"] = format_double(c.truncate);
  m["q"] = std::to_string(c.q);
  m["lambda"] = format_double(c.lambda);
  m["cv"] = bool_text(c.cv || s == "tune");
  m["lambda-grid"] = c.lambda_grid;
  m["cv-folds"] = std::to_string(c.cv_folds);
  m["cv-score"] = c.cv_score;
  m["method"] = c.method;
  m["tol"] = format_double(c.tol);
  m["max-sweeps"] = std::to_string(c.max_sweeps);
  return m;
}

void add_report(Manifest& m, const std::string& prefix, const SolveReport& r) {
  m[prefix + "converged"] = bool_text(r.converged);
  m[prefix + "final_change"] = format_double(r.final_change);
  m[prefix + "objective"] = format_double(r.objective);
  m[prefix + "sweeps_used"] = std::to_string(r.sweeps_used);
}

void ensure_out_dir(const std::string& out) {
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec || !fs::is_directory(out)) {
    throw IoError("cannot create output directory '" + out + "'");
  }
}

struct LoadedNetwork {
  AdjacencyMatrix a;
  std::optional<ObservationMask> mask;
  std::optional<CovariateTable> x;
  std::size_t self_loops = 0;
};

LoadedNetwork load_network(const RunConfig& c) {
  LoadedNetwork net;
  stage("input", [&] {
    if (c.input.empty()) throw InputError("--input edge list is required");
    const Index n = c.n > 0 ? c.n : infer_node_count(c.input);
    if (n < 2) throw InputError("network needs at least two nodes (set --n)");
    auto read = read_edge_list(c.input, n, c.directed);
    net.a = std::move(read.adjacency);
    net.self_loops = read.self_loops_skipped;
  });
  if (!c.mask.empty()) {
    stage("mask", [&] { net.mask = read_mask(c.mask, net.a.size(), !c.directed); });
  }
  if (!c.covariates.empty()) {
    stage("covariates",
          [&] { net.x = read_covariates(c.covariates, c.covariates_header); });
  }
  return net;
}

CvResult run_cv(const RunConfig& c, const AdjacencyMatrix& a, const SimilarityMatrix& w,
                const ObservationMask* mask, std::uint64_t seed) {
  CvPlan plan;
  plan.folds = c.cv_folds;
  plan.lambda_grid = parse_grid(c.lambda_grid, a.size());
  plan.score = parse_cv_score(c.cv_score);
  plan.seed = seed;
  return cross_validate(a, w, mask, plan, solver_config(c));
}

}  // namespace

void write_manifest(const Manifest& manifest, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  for (const auto& [key, value] : manifest) out << key << '=' << value << '\n';
  if (!out) throw IoError("error while writing '" + path + "'");
}

Manifest read_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  Manifest m;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw InputError("manifest line without '=': " + line);
    m[line.substr(0, eq)] = line.substr(eq + 1);
  }
  return m;
}

int cmd_predict(const RunConfig& c, std::ostream& log) {
  stage("output", [&] { ensure_out_dir(c.out); });
  const auto net = load_network(c);
  const ObservationMask* mask = net.mask ? &*net.mask : nullptr;
  const auto w = stage("similarity", [&] {
    return build_similarity(c, net.a, net.x ? &*net.x : nullptr, nullptr);
  });
  SolverConfig cfg = stage("solver config", [&] { return solver_config(c); });
  Manifest m = base_manifest(c);
  if (c.cv) {
    const auto cv = stage("cross-validation",
                          [&] { return run_cv(c, net.a, w, mask, c.seed); });
    cfg.lambda = cv.best_lambda;
  }
  const auto fit = stage("solve", [&] {
    const auto loss = LossWeights::from_mask(net.a.size(), mask, net.a.directed());
    return solve(net.a, w, loss, cfg);
  });
  stage("output", [&] {
    write_scores(fit.scores, nullptr, fs::path(c.out) / "scores.csv");
    m["criterion"] = mask ? "partial" : "full";
    m["lambda_selected"] = format_double(cfg.lambda);
    m["self_loops_skipped"] = std::to_string(net.self_loops);
    add_report(m, "report.", fit.report);
    write_manifest(m, (fs::path(c.out) / "manifest.txt").string());
  });
  log << "wrote " << (fs::path(c.out) / "scores.csv").string() << " (lambda="
      << format_double(cfg.lambda) << ", criterion=" << (mask ? "partial" : "full")
      << ")\n";
  return 0;
}

int cmd_tune(const RunConfig& c, std::ostream& log) {
  stage("output", [&] { ensure_out_dir(c.out); });
  const auto net = load_network(c);
  const ObservationMask* mask = net.mask ? &*net.mask : nullptr;
  const auto w = stage("similarity", [&] {
    return build_similarity(c, net.a, net.x ? &*net.x : nullptr, nullptr);
  });
  const auto cv =
      stage("cross-validation", [&] { return run_cv(c, net.a, w, mask, c.seed); });
  stage("output", [&] {
    const auto path = fs::path(c.out) / "cv.csv";
    std::ofstream out(path);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    out << "lambda,mean_score\n";
    for (const auto& row : cv.table) {
      out << format_double(row.lambda) << ',' << format_double(row.mean_score) << '\n';
    }
    Manifest m = base_manifest(c);
    m["criterion"] = mask ? "partial" : "full";
    m["lambda_selected"] = format_double(cv.best_lambda);
    write_manifest(m, (fs::path(c.out) / "manifest.txt").string());
  });
  log << "best lambda=" << format_double(cv.best_lambda) << '\n';
  return 0;
}

int cmd_evaluate(const RunConfig& c, std::ostream& log) {
  stage("output", [&] { ensure_out_dir(c.out); });
  AdjacencyMatrix truth;
  stage("truth", [&] {
    if (c.truth.empty()) throw InputError("--truth edge list is required");
    const Index n = c.n > 0 ? c.n : infer_node_count(c.truth);
    truth = read_edge_list(c.truth, n, c.directed).adjacency;
  });
  const Index n = truth.size();
  const auto scores = stage("scores", [&] {
    if (c.scores.empty()) throw InputError("--scores file is required");
    return read_scores(c.scores, n, c.directed);
  });
  const auto observed = stage("mask", [&] {
    return c.mask.empty() ? ObservationMask(n, false) : read_mask(c.mask, n, !c.directed);
  });
  const auto curve = stage("evaluate", [&] {
    const auto ranked = rank_test_set(scores, observed);
    return roc(ranked, truth);
  });
  stage("output", [&] {
    write_roc(curve, fs::path(c.out) / "roc.csv");
    Manifest m = base_manifest(c);
    m["auc"] = format_double(curve.auc);
    write_manifest(m, (fs::path(c.out) / "manifest.txt").string());
  });
  log << "auc=" << format_double(curve.auc) << '\n';
  return 0;
}

int cmd_simulate(const RunConfig& c, std::ostream& log) {
  stage("output", [&] { ensure_out_dir(c.out); });
  SimModel model = stage("model", [&] {
    if (c.model.empty()) throw InputError("--model is required");
    SimModel mdl;
    mdl.family = parse_family(c.model);
    mdl.n = c.n;
    if (mdl.family == Family::sbm) {
      mdl.sbm = make_sbm(c.n, c.sbm_blocks, c.sbm_within, c.sbm_between);
    }
    mdl.validate();
    if (c.reps < 1) throw DomainError("--reps must be at least 1");
    if (c.beta != 1.0) {
      throw DomainError(
          "simulate uses the masked protocol (A = E * A_true) and needs --beta 1");
    }
    return mdl;
  });
  const ErrorModel errors = stage("model", [&] { return ErrorModel(c.alpha, c.beta); });
  const SolverConfig base_cfg = stage("solver config", [&] { return solver_config(c); });
  RunConfig sim_cfg = c;
  if (model.family == Family::sbm && c.similarity == "covariates") {
    sim_cfg.similarity = "jaccard";
  }

  const fs::path rep_dir = fs::path(c.out) / "replicates";
  stage("output", [&] { ensure_out_dir(rep_dir.string()); });
  std::vector<RocCurve> full_curves;
  std::vector<RocCurve> partial_curves;
  std::vector<RocCurve> truep_curves;
  Manifest m = base_manifest(c);
  m["similarity"] = sim_cfg.similarity;

  for (int r = 0; r < c.reps; ++r) {
    const std::uint64_t seed = c.seed + static_cast<std::uint64_t>(r);
    const std::string tag = "rep" + std::to_string(r);
    SimModel rep_model = model;
    rep_model.seed = seed;
    const auto truth = stage("generate", [&] { return generate_true(rep_model); });
    const auto obs = stage("observe", [&] {
      return observe(truth.a_true, errors, seed, ObserveMode::masked);
    });
    const ObservationMask& e = *obs.mask;
    if (e.count_known(truth.a_true.directed()) ==
        (truth.a_true.directed() ? 1.0 : 0.5) * static_cast<double>(c.n * (c.n - 1))) {
      throw StageError("evaluate", "test set {E=0} is empty (alpha=" +
                                       format_double(c.alpha) + ")");
    }
    const auto w = stage("similarity", [&] {
      return build_similarity(sim_cfg, obs.a, &truth.x,
                              model.sbm ? &model.sbm->labels : nullptr);
    });

    auto run_criterion = [&](const ObservationMask* mask, const std::string& name) {
      SolverConfig cfg = base_cfg;
      if (c.cv) {
        cfg.lambda = stage("cross-validation",
                           [&] { return run_cv(c, obs.a, w, mask, seed).best_lambda; });
      }
      const auto fit = stage("solve", [&] {
        const auto loss = LossWeights::from_mask(c.n, mask, obs.a.directed());
        return solve(obs.a, w, loss, cfg);
      });
      m[tag + "." + name + ".lambda"] = format_double(cfg.lambda);
      add_report(m, tag + "." + name + ".", fit.report);
      return stage("evaluate", [&] {
        const auto ranked = rank_test_set(fit.scores, e);
        return roc(ranked, truth.a_true);
      });
    };

    full_curves.push_back(run_criterion(nullptr, "full"));
    partial_curves.push_back(run_criterion(&e, "partial"));
    truep_curves.push_back(stage("evaluate", [&] {
      const ScoreMatrix p_scores(truth.p, truth.a_true.directed());
      return roc(rank_test_set(p_scores, e), truth.a_true);
    }));

    stage("output", [&] {
      write_roc(full_curves.back(), rep_dir / (tag + "_full.csv"));
      write_roc(partial_curves.back(), rep_dir / (tag + "_partial.csv"));
      write_roc(truep_curves.back(), rep_dir / (tag + "_truep.csv"));
      if (c.save_instances) {
        write_edge_list(truth.a_true, rep_dir / (tag + "_truth.txt"));
        write_edge_list(obs.a, rep_dir / (tag + "_observed.txt"));
        write_mask(e, truth.a_true.directed(), rep_dir / (tag + "_mask.txt"));
        std::ofstream pf(rep_dir / (tag + "_p.csv"));
        for (Index i = 0; i < c.n; ++i) {
          for (Index j = 0; j < c.n; ++j) {
            pf << (j ? "," : "") << format_double(truth.p(i, j));
          }
          pf << '\n';
        }
        if (truth.x.dimension() > 0) {
          std::ofstream xf(rep_dir / (tag + "_covariates.csv"));
          for (Index i = 0; i < c.n; ++i) {
            for (Index k = 0; k < truth.x.dimension(); ++k) {
              xf << (k ? "," : "") << format_double(truth.x.values()(i, k));
            }
            xf << '\n';
          }
        }
      }
    });
    m[tag + ".degree"] =
        format_double((truth.a_true.directed() ? 1.0 : 2.0) *
                      static_cast<double>(truth.a_true.edge_count()) /
                      static_cast<double>(c.n));
  }

  stage("output", [&] {
    const auto grid = fpr_grid();
    const auto full = average_curves(full_curves, grid);
    const auto partial = average_curves(partial_curves, grid);
    const auto truep = average_curves(truep_curves, grid);
    write_roc(full, fs::path(c.out) / "roc_full.csv");
    write_roc(partial, fs::path(c.out) / "roc_partial.csv");
    write_roc(truep, fs::path(c.out) / "roc_truep.csv");
    m["auc.full"] = format_double(full.auc);
    m["auc.partial"] = format_double(partial.auc);
    m["auc.truep"] = format_double(truep.auc);
    write_manifest(m, (fs::path(c.out) / "manifest.txt").string());
    log << "mean AUC full=" << format_double(full.auc)
        << " partial=" << format_double(partial.auc)
        << " true-P=" << format_double(truep.auc) << '\n';
  });
  return 0;
}

namespace {

void add_network_flags(CLI::App* sub, RunConfig& c) {
  sub->add_option("--input", c.input, "Observed edge list (\"i j\" per line)");
  sub->add_option("--n", c.n, "Node count (inferred from the edge list when 0)");
  sub->add_flag("--directed", c.directed, "Treat the network as directed");
  sub->add_option("--mask", c.mask, "Pairs known to be recorded correctly");
}

void add_similarity_flags(CLI::App* sub, RunConfig& c) {
  sub->add_option("--covariates", c.covariates, "Node covariate CSV");
  sub->add_flag("--covariates-header", c.covariates_header,
                "Skip the first row of the covariate CSV");
  sub->add_option("--similarity", c.similarity,
                  "covariates | jaccard | fraction-match | file | oracle");
  sub->add_option("--similarity-file", c.similarity_file,
                  "W as dense .csv or sparse 'i j w' triplets");
  sub->add_option("--sigma", c.sigma, "Kernel bandwidth or 'auto'");
  sub->add_option("--truncate", c.truncate, "Zero similarities below this value");
  sub->add_option("--q", c.q, "Power of W in the undirected bcd approximation");
}

void add_solver_flags(CLI::App* sub, RunConfig& c) {
  sub->add_option("--lambda", c.lambda, "Penalty weight");
  sub->add_flag("--cv", c.cv, "Choose lambda by cross-validation");
  sub->add_option("--lambda-grid", c.lambda_grid, "Comma separated ascending lambdas");
  sub->add_option("--cv-folds", c.cv_folds, "Number of folds");
  sub->add_option("--cv-score", c.cv_score, "sse | auc");
  sub->add_option("--method", c.method, "direct | bcd");
  sub->add_option("--tol", c.tol, "BCD convergence tolerance");
  sub->add_option("--max-sweeps", c.max_sweeps, "BCD sweep limit");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig c;
  CLI::App app{"Link prediction by penalized least squares on node-pair similarity"};
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.require_subcommand(1);
  std::string manifest_path;

  auto* predict = app.add_subcommand("predict", "Score every node pair of a network");
  auto* simulate = app.add_subcommand("simulate", "Run a synthetic experiment");
  auto* evaluate = app.add_subcommand("evaluate", "ROC of a score file against a truth");
  auto* tune = app.add_subcommand("tune", "Cross-validate lambda only");

  for (auto* sub : {predict, tune}) {
    add_network_flags(sub, c);
    add_similarity_flags(sub, c);
    add_solver_flags(sub, c);
  }
  add_network_flags(evaluate, c);
  evaluate->add_option("--truth", c.truth, "True edge list");
  evaluate->add_option("--scores", c.scores, "Score CSV (i,j,score)");

  add_similarity_flags(simulate, c);
  add_solver_flags(simulate, c);
  simulate->add_option("--model", c.model, "a, a', b, b', c, c', d, d' or sbm");
  simulate->add_option("--n", c.n, "Node count");
  simulate->add_option("--alpha", c.alpha, "Probability an entry is observed");
  simulate->add_option("--beta", c.beta, "Probability a non-edge is recorded correctly");
  simulate->add_option("--reps", c.reps, "Replicates");
  simulate->add_option("--sbm-blocks", c.sbm_blocks, "Number of blocks");
  simulate->add_option("--sbm-within", c.sbm_within, "Within-block edge probability");
  simulate->add_option("--sbm-between", c.sbm_between, "Between-block edge probability");
  simulate->add_flag("--oracle-w", [&c](std::int64_t) { c.similarity = "oracle"; },
                     "Use the block indicator as similarity (sbm only)");
  simulate->add_flag("--save-instances", c.save_instances,
                     "Write generated networks, masks and P matrices");

  for (auto* sub : {predict, simulate, evaluate, tune}) {
    sub->add_option("--seed", c.seed, "Seed for every random draw");
    sub->add_option("--out", c.out, "Output directory");
    sub->add_option("--manifest", manifest_path, "Replay the settings of a manifest");
  }

  // Manifest settings go first so explicit flags override them.
  std::vector<std::string> argv = args;
  for (std::size_t k = 0; k < args.size(); ++k) {
    std::string path;
    if (args[k] == "--manifest" && k + 1 < args.size()) path = args[k + 1];
    if (args[k].rfind("--manifest=", 0) == 0) path = args[k].substr(11);
    if (path.empty() || args.empty()) continue;
    try {
      const Manifest m = read_manifest(path);
      CLI::App* sub = app.get_subcommand_no_throw(args[0]);
      if (!sub) break;
      if (auto it = m.find("command"); it != m.end() && it->second != args[0]) {
        err << "error: manifest was written by '" << it->second << "', not '"
            << args[0] << "'\n";
        return 2;
      }
      std::vector<std::string> replay;
      for (const auto& [key, value] : m) {
        if (key == "manifest" || key == "out" || value.empty()) continue;
        if (sub->get_option_no_throw("--" + key) != nullptr) {
          replay.push_back("--" + key + "=" + value);
        }
      }
      argv.insert(argv.begin() + 1, replay.begin(), replay.end());
    } catch (const std::exception& e) {
      err << "error: manifest: " << e.what() << '\n';
      return 2;
    }
    break;
  }

  try {
    std::vector<std::string> reversed(argv.rbegin(), argv.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }

  try {
    if (*predict) {
      c.subcommand = "predict";
      return cmd_predict(c, out);
    }
    if (*simulate) {
      c.subcommand = "simulate";
      return cmd_simulate(c, out);
    }
    if (*evaluate) {
      c.subcommand = "evaluate";
      return cmd_evaluate(c, out);
    }
    c.subcommand = "tune";
    return cmd_tune(c, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace linkpred::cli
