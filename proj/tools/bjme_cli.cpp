// bjme: sparse joint maximum a posteriori estimation for the multidimensional
// graded response model.

#include <omp.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "bjme/align.hpp"
#include "bjme/cv.hpp"
#include "bjme/data.hpp"
#include "bjme/metrics.hpp"
#include "bjme/optimizer.hpp"
#include "bjme/report.hpp"
#include "bjme/simulate.hpp"

namespace fs = std::filesystem;
using namespace bjme;

namespace {

struct Options {
  std::string responses;
  std::string sigma_theta;
  std::string fit_dir;
  std::string truth_dir;
  std::string out = ".";
  std::string missing_token = "NA";
  std::string start = "sparse";
  std::optional<double> lambda;
  int threads = 0;
  std::uint64_t seed = 1;
  int n_starts = 1;
  int max_iters = 1000;
  double obj_tol = 5.0;
  double train_fraction = 0.5;
  int folds = 5;
  int cv_starts = 1;
  bool cold = false;
  Index n = 500, j = 30, k = 3;
  int c = 4;
  double rho = 0.1;
  int reps = 10;
};

StartStrategy parse_start(const std::string& s) {
  if (s == "sparse") return StartStrategy::sparse_positive;
  if (s == "dense") return StartStrategy::positive_dense;
  if (s == "signed") return StartStrategy::signed_dense;
  throw CLI::ValidationError("--start", "expected sparse, dense or signed");
}

FitConfig fit_config(const Options& o) {
  FitConfig cfg;
  cfg.threads = o.threads;
  cfg.seed = o.seed;
  cfg.n_starts = o.n_starts;
  cfg.max_outer_iters = o.max_iters;
  cfg.obj_tol = o.obj_tol;
  cfg.start = parse_start(o.start);
  cfg.validate();
  return cfg;
}

CvConfig cv_config(const Options& o) {
  CvConfig cv;
  cv.folds = o.folds;
  cv.train_fraction = o.train_fraction;
  cv.n_starts = o.cv_starts;
  cv.warm_start = !o.cold;
  cv.validate();
  return cv;
}

SimDesign design(const Options& o) {
  SimDesign d;
  d.n = o.n;
  d.j = o.j;
  d.k = o.k;
  d.categories = o.c;
  d.rho = o.rho;
  d.seed = o.seed;
  if (o.k < 3) d.q_proportions = o.k == 1 ? std::array<double, 3>{1.0, 0.0, 0.0} : std::array<double, 3>{0.75, 0.25, 0.0};
  d.validate();
  return d;
}

// Sigma_theta from file, or the identity with --k factors.
Matrix load_sigma(const Options& o) {
  if (o.sigma_theta.empty()) return Matrix::Identity(o.k, o.k);
  return read_matrix(o.sigma_theta);
}

ResponseData load_data(const Options& o) {
  if (o.responses.empty()) throw CLI::ValidationError("--responses", "required");
  LoadOptions lo;
  lo.missing_token = o.missing_token;
  return load_responses(o.responses, lo);
}

std::vector<std::string> echo(const CLI::App& app, const CLI::App& sub) {
  std::vector<std::string> lines{"bjme " + sub.get_name()};
  std::istringstream in(app.config_to_str(true, false));
  const std::string prefix = sub.get_name() + ".";
  for (std::string l; std::getline(in, l);) {
    const auto eq = l.find('=');
    if (l.empty() || eq == std::string::npos) continue;
    const auto dot = l.find('.');
    if (dot < eq && l.rfind(prefix, 0) != 0) continue;
    lines.push_back(l);
  }
  return lines;
}

fs::path prepare_out(const Options& o) {
  fs::path p(o.out);
  fs::create_directories(p);
  return p;
}

void write_text(const fs::path& path, const std::vector<std::string>& comments, const std::string& body) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write file: " + path.string());
  for (const auto& c : comments) out << "# " << c << '\n';
  out << body;
}

KeyValues concat(std::initializer_list<KeyValues> parts) {
  KeyValues out;
  for (const auto& p : parts) out.insert(out.end(), p.begin(), p.end());
  return out;
}

void print_summary(const KeyValues& kv) {
  for (const auto& [k, v] : kv)
    if (k != "objective_trace") std::cout << k << " = " << v << '\n';
}

// ---------------------------------------------------------------- commands

void cmd_simulate(const Options& o, const std::vector<std::string>& header) {
  const auto d = design(o);
  const auto truth = gen_true_params(d);
  const auto data = sample_responses(truth.state, std::vector<int>(static_cast<std::size_t>(d.j), d.categories), d.seed);
  const auto out = prepare_out(o);
  write_responses((out / "responses.csv").string(), data, header);
  write_state((out / "truth").string(), truth.state, header);
  write_qmatrix((out / "truth" / "q.csv").string(), truth.q, header);
  write_matrix((out / "sigma.csv").string(), truth.sigma, header);
  std::cout << "wrote " << d.n << " x " << d.j << " responses and true parameters to " << out.string() << '\n';
}

void cmd_fit(const Options& o, const std::vector<std::string>& header) {
  if (!o.lambda) throw CLI::ValidationError("--lambda", "required for fit");
  const auto data = load_data(o);
  const Hyperparameters hyper(load_sigma(o), *o.lambda);
  const auto result = fit_multistart(data, hyper, fit_config(o));
  const auto out = prepare_out(o);
  write_state(out.string(), result.state, header);
  const auto kv = concat({{{"lambda", format_real(*o.lambda)}}, fit_summary(result)});
  write_key_values((out / "summary.txt").string(), kv, header);
  print_summary(kv);
}

void cmd_cvfit(const Options& o, const std::vector<std::string>& header) {
  const auto data = load_data(o);
  const Hyperparameters hyper(load_sigma(o), 1.0);
  const auto tuned = tune_and_fit(data, hyper, fit_config(o), cv_config(o), o.seed);
  const auto out = prepare_out(o);
  write_state(out.string(), tuned.fit.state, header);
  write_text(out / "cv_report.csv", header, cv_report_csv(tuned.report));
  std::string rows = "row\n";
  for (Index r : tuned.split.second_rows) rows += std::to_string(r) + '\n';
  write_text(out / "estimation_rows.csv", header, rows);
  const auto kv = concat({{{"lambda_hat", format_real(tuned.lambda_hat)},
                           {"stage1_lambda", format_real(tuned.report.stage1.best_lambda)},
                           {"cv_fits", std::to_string(tuned.report.n_fits)},
                           {"tuning_rows", std::to_string(tuned.split.first_rows.size())},
                           {"estimation_rows", std::to_string(tuned.split.second_rows.size())}},
                          fit_summary(tuned.fit)});
  write_key_values((out / "summary.txt").string(), kv, header);
  print_summary(kv);
}

struct Aligned {
  ModelState state;
  Alignment alignment;
};

Aligned align_to(const ModelState& fitted, const ModelState& reference) {
  if (fitted.n_items() != reference.n_items() || fitted.n_factors() != reference.n_factors())
    throw std::invalid_argument("fitted and reference loadings differ in shape");
  const auto al = best_alignment(fitted.loadings, reference.loadings);
  return {apply_alignment(fitted, al), al};
}

void cmd_align(const Options& o, const std::vector<std::string>& header) {
  if (o.fit_dir.empty() || o.truth_dir.empty()) throw CLI::ValidationError("--fit/--truth", "both required");
  const auto aligned = align_to(read_state(o.fit_dir), read_state(o.truth_dir));
  const auto out = prepare_out(o);
  write_state(out.string(), aligned.state, header);
  const auto kv = alignment_summary(aligned.alignment);
  write_key_values((out / "alignment.txt").string(), kv, header);
  print_summary(kv);
}

void cmd_evaluate(const Options& o, const std::vector<std::string>& header) {
  if (o.fit_dir.empty() || o.truth_dir.empty()) throw CLI::ValidationError("--fit/--truth", "both required");
  const auto truth = read_state(o.truth_dir);
  const fs::path q_path = fs::path(o.truth_dir) / "q.csv";
  const QMatrix q_star = fs::exists(q_path) ? read_qmatrix(q_path.string()) : q_from_loadings(truth.loadings, 0.0);
  const auto aligned = align_to(read_state(o.fit_dir), truth);
  const auto q_hat = q_from_loadings(aligned.state.loadings, FitConfig{}.loading_zero_threshold);
  const auto kv = concat({alignment_summary(aligned.alignment), selection_summary(selection_metrics(q_hat, q_star)),
                          recovery_summary(recovery_metrics(aligned.state, truth, q_star))});
  const auto out = prepare_out(o);
  write_key_values((out / "metrics.txt").string(), kv, header);
  std::string row_head, row;
  for (const auto& [k, v] : kv) {
    if (k.rfind("alignment", 0) == 0) continue;
    row_head += (row_head.empty() ? "" : ",") + k;
    row += (row.empty() ? "" : ",") + v;
  }
  write_text(out / "metrics_row.csv", header, row_head + '\n' + row + '\n');
  print_summary(kv);
}

void cmd_replicate(const Options& o, const std::vector<std::string>& header) {
  ReplicationOptions opts;
  opts.fit = fit_config(o);
  opts.cv = cv_config(o);
  opts.fixed_lambda = o.lambda;
  std::vector<ReplicationResult> rows;
  for (int r = 0; r < o.reps; ++r) {
    Options ro = o;
    ro.seed = o.seed + static_cast<std::uint64_t>(r);
    rows.push_back(run_replication(design(ro), opts));
    const auto& res = rows.back();
    std::fprintf(stderr, "replication %d/%d: lambda %.4g msr %.3f fnr %.3f error_a %.3f\n", r + 1, o.reps, res.lambda,
                 res.selection.msr, res.selection.fnr, res.recovery.error_a);
  }
  std::ostringstream cond;
  cond << "N" << o.n << "_J" << o.j << "_K" << o.k << "_C" << o.c << "_rho" << o.rho;
  const auto table = replication_table(cond.str(), rows);
  const auto out = prepare_out(o);
  write_text(out / "replications.csv", header, table);
  std::cout << table;
}

// ---------------------------------------------------------------- options

void add_fit_options(CLI::App* sub, Options& o) {
  sub->add_option("--lambda", o.lambda, "L1 penalty weight")->check(CLI::NonNegativeNumber);
  sub->add_option("--n-starts", o.n_starts, "random starts per fit; the best objective is kept")
      ->check(CLI::PositiveNumber);
  sub->add_option("--max-iters", o.max_iters, "maximum outer iterations")->check(CLI::NonNegativeNumber);
  sub->add_option("--obj-tol", o.obj_tol, "stop when the objective changes by less than this")
      ->check(CLI::PositiveNumber);
  sub->add_option("--start", o.start, "random start: sparse, dense or signed");
}

void add_cv_options(CLI::App* sub, Options& o) {
  sub->add_option("--folds", o.folds, "cross-validation folds")->check(CLI::Range(2, 1000));
  sub->add_option("--train-fraction", o.train_fraction, "share of respondents used for tuning")
      ->check(CLI::Range(0.0, 1.0));
  sub->add_option("--cv-starts", o.cv_starts, "random starts per fold fit without a warm start")
      ->check(CLI::PositiveNumber);
  sub->add_flag("--cold", o.cold, "start every fold fit from a random point instead of the previous solution");
}

void add_design_options(CLI::App* sub, Options& o) {
  sub->add_option("--n", o.n, "respondents")->check(CLI::PositiveNumber);
  sub->add_option("--j", o.j, "items")->check(CLI::PositiveNumber);
  sub->add_option("--k", o.k, "factors")->check(CLI::PositiveNumber);
  sub->add_option("--c", o.c, "categories per item")->check(CLI::Range(2, 100));
  sub->add_option("--rho", o.rho, "factor correlation");
}

void add_data_options(CLI::App* sub, Options& o) {
  sub->add_option("--responses", o.responses, "response matrix (csv, NA for missing)")->check(CLI::ExistingFile);
  sub->add_option("--sigma-theta", o.sigma_theta, "factor covariance (csv); identity with --k when absent")
      ->check(CLI::ExistingFile);
  sub->add_option("--k", o.k, "factors when --sigma-theta is absent")->check(CLI::PositiveNumber);
  sub->add_option("--missing", o.missing_token, "token marking a missing response");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sparse joint MAP estimation for multidimensional graded response models"};
  app.option_defaults()->always_capture_default();
  app.set_config("--config", "", "read options from a TOML/INI file; flags override it");
  app.require_subcommand(1);
  app.fallthrough();
  Options o;
  app.add_option("--threads", o.threads, "worker threads (0: OpenMP default)")->check(CLI::NonNegativeNumber);
  app.add_option("--seed", o.seed, "random seed");
  app.add_option("--out", o.out, "output directory");

  auto* sim = app.add_subcommand("simulate", "draw true parameters and responses");
  add_design_options(sim, o);

  auto* fitc = app.add_subcommand("fit", "fit at a fixed penalty");
  add_data_options(fitc, o);
  add_fit_options(fitc, o);

  auto* cvc = app.add_subcommand("cv-fit", "tune the penalty by cross-validation, then fit");
  add_data_options(cvc, o);
  add_fit_options(cvc, o);
  add_cv_options(cvc, o);

  auto* eval = app.add_subcommand("evaluate", "align a fit to the truth and compute recovery metrics");
  eval->add_option("--fit", o.fit_dir, "directory with theta/loadings/intercepts")->check(CLI::ExistingDirectory);
  eval->add_option("--truth", o.truth_dir, "directory with the true parameters and q.csv")
      ->check(CLI::ExistingDirectory);

  auto* alc = app.add_subcommand("align", "match factor order and signs of a fit to a reference");
  alc->add_option("--fit", o.fit_dir, "directory with the fit to align")->check(CLI::ExistingDirectory);
  alc->add_option("--truth", o.truth_dir, "reference directory")->check(CLI::ExistingDirectory);

  auto* rep = app.add_subcommand("replicate", "repeat simulate + cv-fit + evaluate");
  add_design_options(rep, o);
  add_fit_options(rep, o);
  add_cv_options(rep, o);
  rep->add_option("--reps", o.reps, "replications; seeds run from --seed upward")->check(CLI::PositiveNumber);

  CLI11_PARSE(app, argc, argv);

  try {
    if (o.threads > 0) omp_set_num_threads(o.threads);
    CLI::App* sub = app.get_subcommands().front();
    const auto header = echo(app, *sub);
    if (sub == sim) cmd_simulate(o, header);
    else if (sub == fitc) cmd_fit(o, header);
    else if (sub == cvc) cmd_cvfit(o, header);
    else if (sub == eval) cmd_evaluate(o, header);
    else if (sub == alc) cmd_align(o, header);
    else cmd_replicate(o, header);
  } catch (const CLI::Error& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
