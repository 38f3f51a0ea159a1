#include "bjme/report.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace bjme {

namespace {

std::string join(const std::vector<double>& values, char sep) {
  std::string out;
  for (std::size_t k = 0; k < values.size(); ++k) {
    if (k) out += sep;
    out += format_real(values[k]);
  }
  return out;
}

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

}  // namespace

std::string format_real(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_key_values(const std::string& path, const KeyValues& kv, const std::vector<std::string>& comments) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  for (const auto& c : comments) out << "# " << c << '\n';
  for (const auto& [k, v] : kv) out << k << " = " << v << '\n';
  if (!out) throw std::runtime_error("write failed: " + path);
}

std::map<std::string, std::string> read_key_values(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  std::map<std::string, std::string> kv;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto t = trim(line);
    if (t.empty() || t.front() == '#' || t.front() == '[') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument(path + ":" + std::to_string(lineno) + ": expected key = value");
    kv[trim(t.substr(0, eq))] = trim(t.substr(eq + 1));
  }
  return kv;
}

void write_state(const std::string& dir, const ModelState& state, const std::vector<std::string>& comments) {
  std::filesystem::create_directories(dir);
  const std::filesystem::path p(dir);
  write_matrix((p / "theta.csv").string(), state.theta, comments);
  write_matrix((p / "loadings.csv").string(), state.loadings, comments);
  write_intercepts((p / "intercepts.csv").string(), state.intercepts, comments);
}

ModelState read_state(const std::string& dir) {
  const std::filesystem::path p(dir);
  ModelState s;
  s.theta = read_matrix((p / "theta.csv").string());
  s.loadings = read_matrix((p / "loadings.csv").string());
  s.intercepts = read_intercepts((p / "intercepts.csv").string());
  if (s.theta.cols() != s.loadings.cols())
    throw std::invalid_argument("theta and loadings in " + dir + " differ in number of factors");
  if (static_cast<Index>(s.intercepts.size()) != s.loadings.rows())
    throw std::invalid_argument("intercepts and loadings in " + dir + " differ in number of items");
  return s;
}

KeyValues fit_summary(const FitResult& result) {
  return {
      {"final_objective", format_real(result.final_objective())},
      {"n_iters", std::to_string(result.n_iters)},
      {"converged", result.converged ? "true" : "false"},
      {"elapsed_seconds", format_real(result.elapsed_seconds)},
      {"objective_trace", join(result.objective_trace, ',')},
  };
}

KeyValues alignment_summary(const Alignment& al) {
  std::string perm, signs;
  for (std::size_t k = 0; k < al.permutation.size(); ++k) {
    if (k) {
      perm += ',';
      signs += ',';
    }
    perm += std::to_string(al.permutation[k]);
    signs += std::to_string(al.signs[k]);
  }
  return {{"alignment_permutation", perm}, {"alignment_signs", signs}};
}

KeyValues selection_summary(const SelectionReport& r) {
  return {{"msr", format_real(r.msr)}, {"fpr", format_real(r.fpr)}, {"fnr", format_real(r.fnr)}};
}

KeyValues recovery_summary(const RecoveryReport& r) {
  return {{"error_a", format_real(r.error_a)},
          {"error_d", format_real(r.error_d)},
          {"relbias_a", format_real(r.relbias_a)},
          {"relbias_d", format_real(r.relbias_d)},
          {"relbias_a_excluded", std::to_string(r.excluded_a)},
          {"relbias_d_excluded", std::to_string(r.excluded_d)}};
}

std::string cv_report_csv(const CvReport& report) {
  std::ostringstream out;
  const std::size_t n_folds = report.stage1.rows.empty() ? 0 : report.stage1.rows.front().fold_errors.size();
  out << "stage,lambda";
  for (std::size_t m = 0; m < n_folds; ++m) out << ",fold_" << (m + 1);
  out << ",total,selected\n";
  const auto emit = [&](int stage, const CvStage& s) {
    for (const auto& row : s.rows) {
      out << stage << ',' << format_real(row.lambda) << ',' << join(row.fold_errors, ',') << ','
          << format_real(row.total) << ',' << (row.selected ? 1 : 0) << '\n';
    }
  };
  emit(1, report.stage1);
  emit(2, report.stage2);
  return out.str();
}

std::vector<std::string> replication_columns() {
  return {"lambda", "msr", "fpr", "fnr", "error_a", "error_d", "relbias_a", "relbias_d",
          "relbias_d_excluded", "n_iters", "elapsed_seconds"};
}

std::vector<double> replication_values(const ReplicationResult& r) {
  return {r.lambda,
          r.selection.msr,
          r.selection.fpr,
          r.selection.fnr,
          r.recovery.error_a,
          r.recovery.error_d,
          r.recovery.relbias_a,
          r.recovery.relbias_d,
          static_cast<double>(r.recovery.excluded_d),
          static_cast<double>(r.fit.n_iters),
          r.fit.elapsed_seconds};
}

std::string replication_table(const std::string& condition, const std::vector<ReplicationResult>& rows) {
  std::ostringstream out;
  out << "condition,replication,seed";
  for (const auto& c : replication_columns()) out << ',' << c;
  out << '\n';
  const std::size_t n_cols = replication_columns().size();
  std::vector<double> sum(n_cols, 0.0), sum_sq(n_cols, 0.0);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto v = replication_values(rows[r]);
    out << condition << ',' << (r + 1) << ',' << rows[r].seed << ',' << join(v, ',') << '\n';
    for (std::size_t c = 0; c < n_cols; ++c) {
      sum[c] += v[c];
      sum_sq[c] += v[c] * v[c];
    }
  }
  const double n = static_cast<double>(rows.size());
  std::vector<double> mean(n_cols), sd(n_cols);
  for (std::size_t c = 0; c < n_cols; ++c) {
    mean[c] = n > 0 ? sum[c] / n : 0.0;
    sd[c] = n > 1 ? std::sqrt(std::max(0.0, (sum_sq[c] - n * mean[c] * mean[c]) / (n - 1.0))) : 0.0;
  }
  out << condition << ",mean,NA," << join(mean, ',') << '\n';
  out << condition << ",sd,NA," << join(sd, ',') << '\n';
  return out.str();
}

}  // namespace bjme
