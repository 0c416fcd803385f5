#pragma once

#include "abtrust/experiments.hpp"

#include <span>
#include <string>

namespace abtrust {

/// Shortest round-trip decimal form; keeps emitted tables byte-stable.
std::string format_double(double value);

/// Trust matrix CSV: header `rater,ratee,score`, 0-based dense peer ids.
TrustMatrix load_trust_matrix_csv(const std::string& path);
void save_trust_matrix_csv(const TrustMatrix& trust, const std::string& path);

/// results.csv body; fixed header
/// scenario_value,algorithm,mean_authentic_pct,stderr_authentic_pct,
/// mean_load_stddev,feedback_messages,trust_read_messages,seed_base,trials.
std::string results_csv(std::span<const SweepRow> rows);

/// residuals.csv body; header alpha,p,q,iteration,residual.
std::string residuals_csv(std::span<const ConvergenceRow> rows);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

}  // namespace abtrust
