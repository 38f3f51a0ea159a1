#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "bjme/align.hpp"
#include "bjme/cv.hpp"
#include "bjme/metrics.hpp"
#include "bjme/optimizer.hpp"
#include "bjme/simulate.hpp"

namespace bjme {

using KeyValues = std::vector<std::pair<std::string, std::string>>;

std::string format_real(double v);

// Flat "key = value" text with '#' comment lines.
void write_key_values(const std::string& path, const KeyValues& kv,
                      const std::vector<std::string>& comments = {});
std::map<std::string, std::string> read_key_values(const std::string& path);

// theta.csv, loadings.csv and intercepts.csv inside `dir`.
void write_state(const std::string& dir, const ModelState& state,
                 const std::vector<std::string>& comments = {});
ModelState read_state(const std::string& dir);

KeyValues fit_summary(const FitResult& result);
KeyValues alignment_summary(const Alignment& al);
KeyValues selection_summary(const SelectionReport& r);
KeyValues recovery_summary(const RecoveryReport& r);

// Two-stage table: stage, lambda, one column per fold, total, selected.
std::string cv_report_csv(const CvReport& report);

// One delimited row per replication, plus mean and sd rows.
std::vector<std::string> replication_columns();
std::vector<double> replication_values(const ReplicationResult& r);
std::string replication_table(const std::string& condition, const std::vector<ReplicationResult>& rows);

}  // namespace bjme
