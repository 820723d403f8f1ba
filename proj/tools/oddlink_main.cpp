// Command-line front end: fit, evaluate, predict, bipartivity, pathweights.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "oddlink/bipartivity.hpp"
#include "oddlink/errors.hpp"
#include "oddlink/evaluation.hpp"
#include "oddlink/fitting.hpp"
#include "oddlink/graph.hpp"
#include "oddlink/model_io.hpp"
#include "oddlink/svd.hpp"
#include "oddlink/transforms.hpp"
#include "oddlink/version.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::vector<std::string> split_csv_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (!tok.empty()) out.push_back(tok);
  }
  return out;
}

std::string format6(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

std::string format17(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw oddlink::ParseError("cannot open input file: " + path);
  return in;
}

std::ofstream open_output(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw oddlink::ParseError("cannot open output file: " + path.string());
  return out;
}

void write_manifest(const fs::path& dir, const std::string& command,
                    const std::vector<std::string>& inputs, const json& config) {
  json manifest;
  manifest["tool"] = "oddlink";
  manifest["version"] = oddlink::kVersion;
  manifest["command"] = command;
  manifest["inputs"] = inputs;
  manifest["config"] = config;
  std::ofstream out(dir / "manifest.json");
  out << manifest.dump(2) << '\n';
}

oddlink::FitTargets read_targets_csv(const std::string& path) {
  std::ifstream in = open_input(path);
  oddlink::FitTargets targets;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ss(line);
    double sigma, target;
    if (!(ss >> sigma)) continue;  // header row
    if (!(ss >> target)) {
      throw oddlink::ParseError(path + ": line " + std::to_string(line_no) +
                                ": expected sigma,target");
    }
    targets.sigma.push_back(sigma);
    targets.target.push_back(target);
  }
  if (targets.sigma.empty()) {
    throw oddlink::ParseError(path + ": no target pairs found");
  }
  targets.source_rank = targets.sigma.size();
  return targets;
}

struct FitArgs {
  std::string input, targets_path, output_dir = ".";
  std::size_t k = 32;
  std::uint64_t seed = 1;
  double inner_fraction = 0.30;
  std::string families = "sinh,neumann,poly,nnpoly,reduction";
  bool weighted = false, timestamped = false;
  unsigned poly_degree = 3;
};

int cmd_fit(const FitArgs& args) {
  fs::path out_dir(args.output_dir);
  fs::create_directories(out_dir);

  oddlink::FitTargets targets;
  std::optional<oddlink::ModelFile> model_file;
  if (!args.targets_path.empty()) {
    targets = read_targets_csv(args.targets_path);
  } else {
    std::ifstream in = open_input(args.input);
    oddlink::ParseOptions popts;
    popts.has_weight = args.weighted;
    popts.has_timestamp = args.timestamped;
    oddlink::BipartiteGraph g = oddlink::parse_bipartite(in, popts);

    std::size_t k_eff = std::min(args.k, std::min(g.left_count, g.right_count));
    oddlink::SvdOptions svd_options;
    svd_options.rank = k_eff;
    svd_options.seed = args.seed;

    bool by_time = g.has_timestamps();
    oddlink::SplitResult split =
        oddlink::split_edges(g, args.inner_fraction, args.seed, by_time);
    oddlink::SvdModel inner_model =
        oddlink::truncated_svd(oddlink::biadjacency(split.train), svd_options);
    std::vector<oddlink::SparseMatrix::Triplet> t;
    for (const auto& [u, w] : split.test_edges) t.push_back({u, w, 1.0});
    oddlink::SparseMatrix holdout = oddlink::SparseMatrix::from_triplets(
        g.left_count, g.right_count, std::move(t));
    targets = oddlink::build_targets(inner_model, holdout);

    // model on the full input for the predict handoff
    oddlink::ModelFile mf;
    mf.model = oddlink::truncated_svd(oddlink::biadjacency(g), svd_options);
    mf.left_labels = g.left_labels;
    mf.right_labels = g.right_labels;
    for (const oddlink::Edge& e : g.edges) mf.train_edges.emplace_back(e.left, e.right);
    model_file = std::move(mf);
  }

  oddlink::FitOptions fit_options;
  fit_options.poly_degree = args.poly_degree;
  std::vector<std::string> families = split_csv_list(args.families);
  std::vector<oddlink::FitOutcome> outcomes =
      oddlink::fit_all(families, targets, fit_options);

  bool any_numerical_failure = false;
  for (const oddlink::FitOutcome& o : outcomes) {
    if (!o.report) {
      std::cerr << "fit " << o.family << ": skipped: " << o.error << '\n';
      any_numerical_failure = true;
      continue;
    }
    std::ofstream rec = open_output(out_dir / ("fit_" + o.family + ".txt"));
    rec << oddlink::serialize_transform(o.report->transform);
    rec << "residual=" << format17(o.report->residual) << '\n';
    rec << "pairs=" << o.report->targets.size() << '\n';
    std::ofstream curve = open_output(out_dir / ("curve_" + o.family + ".csv"));
    oddlink::write_curve_csv(curve, *o.report);
    std::cout << o.family << "\tresidual=" << format6(o.report->residual) << '\n';
  }

  if (model_file) {
    std::ofstream ms = open_output(out_dir / "model.tsv");
    oddlink::save_model(ms, *model_file);
  }

  json config = {{"k", args.k},
                 {"seed", args.seed},
                 {"inner_fraction", args.inner_fraction},
                 {"families", args.families},
                 {"weighted", args.weighted},
                 {"timestamped", args.timestamped},
                 {"poly_degree", args.poly_degree}};
  write_manifest(out_dir, "fit",
                 {args.input.empty() ? args.targets_path : args.input}, config);
  return any_numerical_failure && outcomes.size() == 1 ? 2 : 0;
}

struct EvalArgs {
  std::string input, output_dir = ".", dataset_name;
  std::size_t k = 32;
  std::uint64_t seed = 1;
  double test_fraction = 0.30, inner_fraction = 0.30;
  std::string families = "poly,nnpoly,sinh,reduction,neumann,pref";
  bool weighted = false, timestamped = false, evaluate_right = false;
  std::size_t candidate_cap = 0, threads = 1;
  unsigned poly_degree = 3;
};

int cmd_evaluate(const EvalArgs& args) {
  fs::path out_dir(args.output_dir);
  fs::create_directories(out_dir);

  oddlink::ParseOptions popts;
  popts.has_weight = args.weighted;
  popts.has_timestamp = args.timestamped;

  oddlink::EvalConfig config;
  config.test_fraction = args.test_fraction;
  config.inner_fraction = args.inner_fraction;
  config.seed = args.seed;
  config.rank = args.k;
  config.methods = split_csv_list(args.families);
  config.evaluate_right = args.evaluate_right;
  config.poly_degree = args.poly_degree;
  config.threads = args.threads;
  if (args.candidate_cap > 0) config.candidate_cap = args.candidate_cap;

  oddlink::EvalReport report =
      oddlink::run_experiment(args.input, popts, config);
  if (!args.dataset_name.empty()) report.dataset = args.dataset_name;

  std::ofstream csv = open_output(out_dir / "report.csv");
  oddlink::write_report_csv(csv, report);
  std::ofstream txt = open_output(out_dir / "report.txt");
  oddlink::write_report_table(txt, report);
  oddlink::write_report_table(std::cout, report);
  for (const oddlink::MethodResult& m : report.methods) {
    if (!m.ok) std::cerr << "method " << m.method << ": " << m.error << '\n';
  }

  json config_json = {{"k", args.k},
                      {"seed", args.seed},
                      {"test_fraction", args.test_fraction},
                      {"inner_fraction", args.inner_fraction},
                      {"families", args.families},
                      {"weighted", args.weighted},
                      {"timestamped", args.timestamped},
                      {"evaluate_right", args.evaluate_right},
                      {"candidate_cap", args.candidate_cap},
                      {"threads", args.threads},
                      {"poly_degree", args.poly_degree}};
  write_manifest(out_dir, "evaluate", {args.input}, config_json);
  return 0;
}

struct PredictArgs {
  std::string model_path, transform_path, node, output;
  bool all = false;
  std::size_t top = 10;
};

int cmd_predict(const PredictArgs& args) {
  std::ifstream ms = open_input(args.model_path);
  oddlink::ModelFile mf = oddlink::load_model(ms);
  std::ifstream ts = open_input(args.transform_path);
  std::stringstream tbuf;
  tbuf << ts.rdbuf();
  oddlink::SpectralTransform transform = oddlink::parse_transform(tbuf.str());

  std::vector<std::size_t> nodes;
  if (args.all) {
    nodes.resize(mf.model.rows);
    for (std::size_t i = 0; i < nodes.size(); ++i) nodes[i] = i;
  } else {
    auto it = std::find(mf.left_labels.begin(), mf.left_labels.end(), args.node);
    if (it == mf.left_labels.end()) {
      throw oddlink::ParseError("unknown left node label: " + args.node);
    }
    nodes.push_back(static_cast<std::size_t>(it - mf.left_labels.begin()));
  }

  std::vector<std::vector<bool>> exclude(mf.model.rows);
  for (std::size_t u : nodes) exclude[u].assign(mf.model.cols, false);
  for (const auto& [u, w] : mf.train_edges) {
    if (!exclude[u].empty()) exclude[u][w] = true;
  }

  std::ostream* out = &std::cout;
  std::ofstream file;
  if (!args.output.empty()) {
    file = open_output(args.output);
    out = &file;
  }
  for (std::size_t u : nodes) {
    auto ranked = oddlink::top_n(mf.model, transform, u, args.top, exclude[u]);
    for (const auto& [w, s] : ranked) {
      *out << mf.left_labels[u] << '\t' << mf.right_labels[w] << '\t'
           << format6(s) << '\n';
    }
  }
  return 0;
}

struct BipartivityArgs {
  std::vector<std::string> inputs;
  std::string output_dir = ".";
  std::uint64_t seed = 1;
  std::size_t m_top = 16, m_bottom = 16;
  double holdout_fraction = 0.30;
};

int cmd_bipartivity(const BipartivityArgs& args) {
  fs::path out_dir(args.output_dir);
  fs::create_directories(out_dir);

  oddlink::BipartivityConfig config;
  config.seed = args.seed;
  config.m_top = args.m_top;
  config.m_bottom = args.m_bottom;
  config.holdout_fraction = args.holdout_fraction;

  for (const std::string& path : args.inputs) {
    std::ifstream in = open_input(path);
    oddlink::UnipartiteGraph g = oddlink::parse_unipartite(in);
    oddlink::BipartivityReport report = oddlink::assess(g, config);
    std::cout << path << '\t'
              << (report.nearly_bipartite ? "nearly-bipartite" : "not-bipartite")
              << "\tratio=" << format6(report.ratio) << '\n';
    fs::path base = fs::path(path).filename();
    std::ofstream csv =
        open_output(out_dir / ("bipartivity_" + base.string() + ".csv"));
    oddlink::write_bipartivity_csv(csv, report);
  }

  json config_json = {{"seed", args.seed},
                      {"m_top", args.m_top},
                      {"m_bottom", args.m_bottom},
                      {"holdout_fraction", args.holdout_fraction}};
  write_manifest(out_dir, "bipartivity", args.inputs, config_json);
  return 0;
}

struct PathweightArgs {
  std::string family = "sinh";
  double alpha = 1.0, beta = 1.0;
  unsigned max_power = 9;
  std::string output;
};

int cmd_pathweights(const PathweightArgs& args) {
  oddlink::SpectralTransform t;
  if (args.family == "sinh") {
    t = oddlink::Sinh{args.alpha, args.beta};
  } else if (args.family == "neumann") {
    t = oddlink::OddNeumann{args.alpha, args.beta};
  } else {
    throw oddlink::ParseError("pathweights: family must be sinh or neumann");
  }
  auto weights = oddlink::taylor_weights(t, args.max_power);

  std::ostream* out = &std::cout;
  std::ofstream file;
  if (!args.output.empty()) {
    file = open_output(args.output);
    out = &file;
  }
  *out << "power,weight\n";
  for (const auto& [p, w] : weights) {
    *out << p << ',' << format6(w) << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bipartite link prediction with odd spectral transformations"};
  app.require_subcommand(1);
  app.set_version_flag("--version", oddlink::kVersion);

  FitArgs fit_args;
  CLI::App* fit = app.add_subcommand("fit", "Learn transformation parameters");
  fit->add_option("--input", fit_args.input, "Bipartite edge list");
  fit->add_option("--targets", fit_args.targets_path,
                  "CSV of sigma,target pairs (alternative to --input)");
  fit->add_option("--k", fit_args.k, "Decomposition rank");
  fit->add_option("--seed", fit_args.seed, "Random seed");
  fit->add_option("--inner-fraction", fit_args.inner_fraction,
                  "Holdout fraction used to build fit targets");
  fit->add_option("--families", fit_args.families, "Comma-separated family list");
  fit->add_flag("--weighted", fit_args.weighted, "Input has a weight column");
  fit->add_flag("--timestamped", fit_args.timestamped, "Input has a timestamp column");
  fit->add_option("--poly-degree", fit_args.poly_degree, "Odd polynomial degree J");
  fit->add_option("--output-dir", fit_args.output_dir, "Output directory");

  EvalArgs eval_args;
  CLI::App* evaluate = app.add_subcommand("evaluate", "Holdout MAP evaluation");
  evaluate->add_option("--input", eval_args.input, "Bipartite edge list")->required();
  evaluate->add_option("--dataset-name", eval_args.dataset_name, "Report row label");
  evaluate->add_option("--k", eval_args.k, "Decomposition rank");
  evaluate->add_option("--seed", eval_args.seed, "Random seed");
  evaluate->add_option("--test-fraction", eval_args.test_fraction, "Outer holdout fraction");
  evaluate->add_option("--inner-fraction", eval_args.inner_fraction, "Inner holdout fraction");
  evaluate->add_option("--families", eval_args.families,
                       "Comma-separated methods (spectral families + pref)");
  evaluate->add_flag("--weighted", eval_args.weighted, "Input has a weight column");
  evaluate->add_flag("--timestamped", eval_args.timestamped, "Input has a timestamp column");
  evaluate->add_flag("--evaluate-right", eval_args.evaluate_right,
                     "Evaluate the right partition instead of the left");
  evaluate->add_option("--candidate-cap", eval_args.candidate_cap,
                       "Cap candidate pools by seeded sampling (0 = off)");
  evaluate->add_option("--threads", eval_args.threads, "Worker threads");
  evaluate->add_option("--poly-degree", eval_args.poly_degree, "Odd polynomial degree J");
  evaluate->add_option("--output-dir", eval_args.output_dir, "Output directory");

  PredictArgs predict_args;
  CLI::App* predict = app.add_subcommand("predict", "Rank unlinked right nodes");
  predict->add_option("--model", predict_args.model_path, "Model file from fit")->required();
  predict->add_option("--transform", predict_args.transform_path,
                      "Transform record from fit")->required();
  predict->add_option("--node", predict_args.node, "Left node label");
  predict->add_flag("--all", predict_args.all, "Predict for every left node");
  predict->add_option("--top", predict_args.top, "Predictions per node");
  predict->add_option("--output", predict_args.output, "Output TSV (default stdout)");

  BipartivityArgs bip_args;
  CLI::App* bipartivity = app.add_subcommand("bipartivity",
                                             "Detect near-bipartite networks");
  bipartivity->add_option("inputs", bip_args.inputs, "Unipartite edge lists")
      ->required();
  bipartivity->add_option("--seed", bip_args.seed, "Random seed");
  bipartivity->add_option("--m-top", bip_args.m_top, "Eigenpairs from the top end");
  bipartivity->add_option("--m-bottom", bip_args.m_bottom, "Eigenpairs from the bottom end");
  bipartivity->add_option("--holdout-fraction", bip_args.holdout_fraction,
                          "Edge fraction withheld when learning the curve");
  bipartivity->add_option("--output-dir", bip_args.output_dir, "Output directory");

  PathweightArgs pw_args;
  CLI::App* pathweights = app.add_subcommand("pathweights",
                                             "Taylor path-weight comparison data");
  pathweights->add_option("--family", pw_args.family, "sinh or neumann");
  pathweights->add_option("--alpha", pw_args.alpha, "Transform alpha");
  pathweights->add_option("--beta", pw_args.beta, "Transform scale");
  pathweights->add_option("--max-power", pw_args.max_power, "Largest odd power");
  pathweights->add_option("--output", pw_args.output, "Output CSV (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (fit->parsed()) {
      if (fit_args.input.empty() == fit_args.targets_path.empty()) {
        throw oddlink::ParseError("fit: exactly one of --input/--targets required");
      }
      return cmd_fit(fit_args);
    }
    if (evaluate->parsed()) return cmd_evaluate(eval_args);
    if (predict->parsed()) {
      if (predict_args.all == !predict_args.node.empty()) {
        throw oddlink::ParseError("predict: exactly one of --node/--all required");
      }
      return cmd_predict(predict_args);
    }
    if (bipartivity->parsed()) return cmd_bipartivity(bip_args);
    if (pathweights->parsed()) return cmd_pathweights(pw_args);
  } catch (const oddlink::NumericalError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const oddlink::ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
