#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "spmi/corpus.hpp"
#include "spmi/errors.hpp"
#include "spmi/factorize.hpp"
#include "spmi/types.hpp"

namespace spmi {

enum class Method { kSppmiSvd, kEmMvsvd, kDdMvsvd, kSgns };

std::string method_name(Method m);
Method parse_method(const std::string& name);  // e.g. "sppmi-svd", "sgns"

struct ExperimentConfig {
  Index V = 50;
  double zipf_s = 1.0;
  double rho = 0.5;
  std::vector<std::int64_t> corpus_sizes = {10000, 100000, 1000000};
  Index d = 25;
  int k = 5;
  int window = 1;
  std::vector<Method> methods = {Method::kSppmiSvd, Method::kEmMvsvd,
                                 Method::kDdMvsvd, Method::kSgns};
  int trials = 5;
  std::uint64_t base_seed = 0;
  double mvsvd_tol = 1e-6;
  int mvsvd_max_iter = 100;
  int sgns_epochs = 40;
  double sgns_lr_initial = 0.05;
  double sgns_lr_final = 1e-4;
  double sgns_negative_exponent = 1.0;
  std::string output_dir;    // empty: no files are written
  bool save_matrices = false;  // also persist per-trial estimate matrices
  int jobs = 1;              // trial-level worker threads
};

void validate_config(const ExperimentConfig& config);
nlohmann::json config_to_json(const ExperimentConfig& config);
ExperimentConfig config_from_json(const nlohmann::json& j);

struct TrialResult {
  Method method = Method::kSppmiSvd;
  std::int64_t corpus_size = 0;
  int trial = 0;
  std::uint64_t seed = 0;  // corpus-stage seed for this (size, trial) cell
  double rmse = std::nan("");
  double wall_seconds = 0.0;  // excluded from deterministic outputs
  int iterations = 0;         // MVSVD outer iterations (0 otherwise)
  bool failed = false;
  std::string error;
};

struct Aggregate {
  Method method = Method::kSppmiSvd;
  std::int64_t corpus_size = 0;
  int trials = 0;        // successful trials aggregated
  double mean_rmse = std::nan("");
  double std_error = std::nan("");  // sample std / sqrt(trials); 0 if trials=1
};

struct ResultTable {
  std::vector<TrialResult> rows;
  std::vector<Aggregate> aggregates;
};

// Root mean square difference over all entries: sqrt(mean((a - b)^2)).
template <typename DerivedA, typename DerivedB>
double rmse(const Eigen::MatrixBase<DerivedA>& estimate,
            const Eigen::MatrixBase<DerivedB>& target) {
  if (estimate.rows() != target.rows() || estimate.cols() != target.cols()) {
    throw ShapeMismatchError("rmse: operand shapes differ");
  }
  const double n = static_cast<double>(estimate.size());
  return std::sqrt((estimate.derived().array() - target.derived().array())
                       .square()
                       .sum() /
                   n);
}

// Runs the full simulation study: builds the population model once, then for
// every (corpus_size, trial) cell generates a corpus with a derived seed,
// counts co-occurrences, forms the empirical SPMI, runs every configured
// method, and scores each reconstruction against the population SPMI.
// Method failures are recorded as failed rows; the table always completes.
// When output_dir is set, config/results/aggregates/timings files are
// written, with results.csv refreshed after every finished cell.
ResultTable run_experiment(const ExperimentConfig& config);

// Mean and standard error per (method, corpus_size), in row order of first
// appearance. Failed rows are excluded (their cell keeps its successful
// trials only).
std::vector<Aggregate> aggregate_rows(const std::vector<TrialResult>& rows);

struct ZipfReportRow {
  int rank = 0;                 // 1-based
  std::int64_t frequency = 0;   // observed count of the rank-th word
  double expected = 0.0;        // corpus_length * Zipf(1, V) pmf at the rank
};
struct ZipfReport {
  std::vector<ZipfReportRow> rows;
  double slope = 0.0;  // least-squares slope of log freq vs log rank
};

// Rank-frequency table of a corpus plus the fitted log-log slope
// (zero-frequency ranks are excluded from the regression).
ZipfReport zipf_report(const Corpus& corpus, Index V);

// Deterministic CSV renderings (fixed column order, %.17g floats).
std::string results_csv(const std::vector<TrialResult>& rows);
std::string aggregates_csv(const std::vector<Aggregate>& aggregates);
std::string timings_csv(const std::vector<TrialResult>& rows);
std::string zipf_report_csv(const ZipfReport& report);

}  // namespace spmi
