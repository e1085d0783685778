#include "spmi/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <set>
#include <thread>
#include <utility>

#include "spmi/cooccur.hpp"
#include "spmi/genmodel.hpp"
#include "spmi/matrix_io.hpp"
#include "spmi/rng.hpp"
#include "spmi/sgns.hpp"

namespace spmi {
namespace {

std::string format_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string csv_quote(const std::string& s) {
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += "\"\"";
    else out += ch;
  }
  out += "\"";
  return out;
}

void write_text_file(const std::filesystem::path& path,
                     const std::string& content) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  out << content;
  if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace

std::string method_name(Method m) {
  switch (m) {
    case Method::kSppmiSvd: return "sppmi-svd";
    case Method::kEmMvsvd: return "em-mvsvd";
    case Method::kDdMvsvd: return "dd-mvsvd";
    case Method::kSgns: return "sgns";
  }
  throw InvalidParameterError("method_name: unknown method");
}

Method parse_method(const std::string& name) {
  if (name == "sppmi-svd") return Method::kSppmiSvd;
  if (name == "em-mvsvd") return Method::kEmMvsvd;
  if (name == "dd-mvsvd") return Method::kDdMvsvd;
  if (name == "sgns") return Method::kSgns;
  throw InvalidParameterError("unknown method name: " + name);
}

void validate_config(const ExperimentConfig& config) {
  if (config.V < 2) throw InvalidParameterError("config: require V >= 2");
  if (!(config.zipf_s > 0.0)) {
    throw InvalidParameterError("config: require zipf_s > 0");
  }
  if (!(std::abs(config.rho) < 1.0)) {
    throw InvalidParameterError("config: require |rho| < 1");
  }
  if (config.corpus_sizes.empty()) {
    throw InvalidParameterError("config: corpus_sizes must be nonempty");
  }
  for (std::size_t i = 0; i < config.corpus_sizes.size(); ++i) {
    if (config.corpus_sizes[i] < 2) {
      throw InvalidParameterError("config: corpus sizes must be >= 2");
    }
    if (i > 0 && config.corpus_sizes[i] <= config.corpus_sizes[i - 1]) {
      throw InvalidParameterError(
          "config: corpus_sizes must be strictly increasing");
    }
  }
  if (config.d < 1 || config.d > config.V) {
    throw InvalidParameterError("config: require 1 <= d <= V");
  }
  if (config.k < 1) throw InvalidParameterError("config: require k >= 1");
  if (config.window < 1) {
    throw InvalidParameterError("config: require window >= 1");
  }
  if (config.methods.empty()) {
    throw InvalidParameterError("config: methods must be nonempty");
  }
  if (config.trials < 1) {
    throw InvalidParameterError("config: require trials >= 1");
  }
  if (!(config.mvsvd_tol >= 0.0)) {
    throw InvalidParameterError("config: mvsvd_tol must be >= 0");
  }
  if (config.mvsvd_max_iter < 0) {
    throw InvalidParameterError("config: mvsvd_max_iter must be >= 0");
  }
  if (config.sgns_epochs < 0) {
    throw InvalidParameterError("config: sgns_epochs must be >= 0");
  }
  if (!(config.sgns_lr_final > 0.0) ||
      !(config.sgns_lr_initial >= config.sgns_lr_final)) {
    throw InvalidParameterError(
        "config: require sgns_lr_initial >= sgns_lr_final > 0");
  }
  if (!(config.sgns_negative_exponent >= 0.0)) {
    throw InvalidParameterError(
        "config: sgns_negative_exponent must be >= 0");
  }
  if (config.jobs < 1) throw InvalidParameterError("config: jobs must be >= 1");
}

nlohmann::json config_to_json(const ExperimentConfig& config) {
  nlohmann::json methods = nlohmann::json::array();
  for (Method m : config.methods) methods.push_back(method_name(m));
  return {{"V", config.V},
          {"zipf_s", config.zipf_s},
          {"rho", config.rho},
          {"corpus_sizes", config.corpus_sizes},
          {"d", config.d},
          {"k", config.k},
          {"window", config.window},
          {"methods", methods},
          {"trials", config.trials},
          {"base_seed", config.base_seed},
          {"mvsvd_tol", config.mvsvd_tol},
          {"mvsvd_max_iter", config.mvsvd_max_iter},
          {"sgns_epochs", config.sgns_epochs},
          {"sgns_lr_initial", config.sgns_lr_initial},
          {"sgns_lr_final", config.sgns_lr_final},
          {"sgns_negative_exponent", config.sgns_negative_exponent},
          {"output_dir", config.output_dir},
          {"save_matrices", config.save_matrices},
          {"jobs", config.jobs}};
}

ExperimentConfig config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) {
    throw InvalidParameterError("config: expected a JSON object");
  }
  ExperimentConfig config;
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string& key = it.key();
    try {
      if (key == "V") config.V = it->get<Index>();
      else if (key == "zipf_s") config.zipf_s = it->get<double>();
      else if (key == "rho") config.rho = it->get<double>();
      else if (key == "corpus_sizes") {
        config.corpus_sizes = it->get<std::vector<std::int64_t>>();
      } else if (key == "d") config.d = it->get<Index>();
      else if (key == "k") config.k = it->get<int>();
      else if (key == "window") config.window = it->get<int>();
      else if (key == "methods") {
        config.methods.clear();
        for (const auto& name : *it) {
          config.methods.push_back(parse_method(name.get<std::string>()));
        }
      } else if (key == "trials") config.trials = it->get<int>();
      else if (key == "base_seed") {
        config.base_seed = it->get<std::uint64_t>();
      } else if (key == "mvsvd_tol") config.mvsvd_tol = it->get<double>();
      else if (key == "mvsvd_max_iter") {
        config.mvsvd_max_iter = it->get<int>();
      } else if (key == "sgns_epochs") config.sgns_epochs = it->get<int>();
      else if (key == "sgns_lr_initial") {
        config.sgns_lr_initial = it->get<double>();
      } else if (key == "sgns_lr_final") {
        config.sgns_lr_final = it->get<double>();
      } else if (key == "sgns_negative_exponent") {
        config.sgns_negative_exponent = it->get<double>();
      } else if (key == "output_dir") {
        config.output_dir = it->get<std::string>();
      } else if (key == "save_matrices") {
        config.save_matrices = it->get<bool>();
      } else if (key == "jobs") config.jobs = it->get<int>();
      else {
        throw InvalidParameterError("config: unknown key \"" + key + "\"");
      }
    } catch (const nlohmann::json::exception&) {
      throw InvalidParameterError("config: bad value for key \"" + key +
                                  "\"");
    }
  }
  return config;
}

std::vector<Aggregate> aggregate_rows(const std::vector<TrialResult>& rows) {
  std::vector<Aggregate> aggregates;
  std::vector<std::vector<double>> samples;
  auto cell_index = [&](Method m, std::int64_t size) -> std::size_t {
    for (std::size_t i = 0; i < aggregates.size(); ++i) {
      if (aggregates[i].method == m && aggregates[i].corpus_size == size) {
        return i;
      }
    }
    aggregates.push_back(Aggregate{m, size, 0, 0.0, 0.0});
    samples.emplace_back();
    return aggregates.size() - 1;
  };
  for (const TrialResult& row : rows) {
    const std::size_t i = cell_index(row.method, row.corpus_size);
    if (!row.failed) samples[i].push_back(row.rmse);
  }
  for (std::size_t i = 0; i < aggregates.size(); ++i) {
    const auto& xs = samples[i];
    const int n = static_cast<int>(xs.size());
    aggregates[i].trials = n;
    if (n == 0) {
      aggregates[i].mean_rmse = std::nan("");
      aggregates[i].std_error = std::nan("");
      continue;
    }
    double mean = 0.0;
    for (double x : xs) mean += x;
    mean /= n;
    aggregates[i].mean_rmse = mean;
    if (n == 1) {
      aggregates[i].std_error = 0.0;
    } else {
      double ss = 0.0;
      for (double x : xs) ss += (x - mean) * (x - mean);
      aggregates[i].std_error = std::sqrt(ss / (n - 1)) / std::sqrt(n);
    }
  }
  return aggregates;
}

std::string results_csv(const std::vector<TrialResult>& rows) {
  std::string out = "method,corpus_size,trial,seed,rmse,iterations,status,error\n";
  for (const TrialResult& row : rows) {
    out += method_name(row.method);
    out += ',' + std::to_string(row.corpus_size);
    out += ',' + std::to_string(row.trial);
    out += ',' + std::to_string(row.seed);
    out += ',';
    if (!row.failed) out += format_double(row.rmse);
    out += ',' + std::to_string(row.iterations);
    out += row.failed ? ",failed," : ",ok,";
    out += csv_quote(row.error);
    out += '\n';
  }
  return out;
}

std::string aggregates_csv(const std::vector<Aggregate>& aggregates) {
  std::string out = "method,corpus_size,trials,mean_rmse,std_error\n";
  for (const Aggregate& a : aggregates) {
    out += method_name(a.method);
    out += ',' + std::to_string(a.corpus_size);
    out += ',' + std::to_string(a.trials);
    out += ',';
    if (a.trials > 0) out += format_double(a.mean_rmse);
    out += ',';
    if (a.trials > 0) out += format_double(a.std_error);
    out += '\n';
  }
  return out;
}

std::string timings_csv(const std::vector<TrialResult>& rows) {
  std::string out = "method,corpus_size,trial,wall_seconds\n";
  for (const TrialResult& row : rows) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", row.wall_seconds);
    out += method_name(row.method);
    out += ',' + std::to_string(row.corpus_size);
    out += ',' + std::to_string(row.trial);
    out += ',';
    out += buf;
    out += '\n';
  }
  return out;
}

std::string zipf_report_csv(const ZipfReport& report) {
  std::string out = "rank,frequency,expected\n";
  for (const ZipfReportRow& row : report.rows) {
    out += std::to_string(row.rank);
    out += ',' + std::to_string(row.frequency);
    out += ',' + format_double(row.expected);
    out += '\n';
  }
  return out;
}

ZipfReport zipf_report(const Corpus& corpus, Index V) {
  const CountVector freq = unigram_freqs(corpus, V);
  std::vector<Index> order(static_cast<std::size_t>(V));
  for (Index i = 0; i < V; ++i) order[static_cast<std::size_t>(i)] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](Index a, Index b) { return freq[a] > freq[b]; });

  const ZipfMarginal zm = zipf_marginal(V, 1.0);
  const double length = static_cast<double>(corpus.length());

  ZipfReport report;
  report.rows.reserve(static_cast<std::size_t>(V));
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  int n = 0;
  for (Index r = 0; r < V; ++r) {
    ZipfReportRow row;
    row.rank = static_cast<int>(r) + 1;
    row.frequency = freq[order[static_cast<std::size_t>(r)]];
    row.expected = length * zm.pmf[r];
    report.rows.push_back(row);
    if (row.frequency > 0) {
      const double x = std::log(static_cast<double>(row.rank));
      const double y = std::log(static_cast<double>(row.frequency));
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
      ++n;
    }
  }
  const double denom = n * sxx - sx * sx;
  report.slope = denom != 0.0 ? (n * sxy - sx * sy) / denom : 0.0;
  return report;
}

ResultTable run_experiment(const ExperimentConfig& config) {
  validate_config(config);

  const ZipfMarginal marginal = zipf_marginal(config.V, config.zipf_s);
  const JointCooccurrence joint =
      copula_joint(marginal, GaussianCopula{config.rho});
  const TransitionMatrix transition = to_transition(joint);
  const Matrix target = population_spmi(joint, config.k);

  const std::size_t n_sizes = config.corpus_sizes.size();
  const std::size_t n_trials = static_cast<std::size_t>(config.trials);
  const std::size_t n_methods = config.methods.size();
  const std::size_t n_cells = n_sizes * n_trials;

  std::vector<std::uint64_t> seeds(n_cells);
  std::set<std::uint64_t> distinct;
  for (std::size_t s = 0; s < n_sizes; ++s) {
    for (std::size_t t = 0; t < n_trials; ++t) {
      const std::uint64_t seed = derive_seed(
          config.base_seed,
          static_cast<std::uint64_t>(config.corpus_sizes[s]),
          static_cast<std::uint64_t>(t), SeedStage::kCorpus);
      seeds[s * n_trials + t] = seed;
      distinct.insert(seed);
    }
  }
  if (distinct.size() != n_cells) {
    throw Error("run_experiment: per-trial seed collision");
  }

  const bool persist = !config.output_dir.empty();
  const std::filesystem::path out_dir(config.output_dir);
  if (persist) {
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) {
      throw IoError("cannot create output directory: " + out_dir.string());
    }
    const nlohmann::json echo = {{"config", config_to_json(config)},
                                 {"rng", kRngAlgorithm},
                                 {"matrix_format_version",
                                  kMatrixFormatVersion}};
    write_text_file(out_dir / "config.json", echo.dump(2) + "\n");
    if (config.save_matrices) {
      save_matrix(out_dir / "population_spmi.spmi", target,
                  {{"role", "population_spmi"},
                   {"k", config.k},
                   {"rho", config.rho}});
    }
  }

  ResultTable table;
  table.rows.resize(n_cells * n_methods);
  std::vector<char> cell_done(n_cells, 0);
  std::mutex persist_mutex;

  auto persist_partial = [&]() {
    if (!persist) return;
    std::vector<TrialResult> done_rows;
    done_rows.reserve(table.rows.size());
    for (std::size_t cell = 0; cell < n_cells; ++cell) {
      if (!cell_done[cell]) continue;
      for (std::size_t m = 0; m < n_methods; ++m) {
        done_rows.push_back(table.rows[cell * n_methods + m]);
      }
    }
    write_text_file(out_dir / "results.csv", results_csv(done_rows));
  };

  auto run_cell = [&](std::size_t cell) {
    const std::size_t size_idx = cell / n_trials;
    const std::size_t trial = cell % n_trials;
    const std::int64_t corpus_size = config.corpus_sizes[size_idx];
    const std::uint64_t seed = seeds[cell];

    TrialResult* rows = &table.rows[cell * n_methods];
    for (std::size_t m = 0; m < n_methods; ++m) {
      rows[m].method = config.methods[m];
      rows[m].corpus_size = corpus_size;
      rows[m].trial = static_cast<int>(trial);
      rows[m].seed = seed;
    }

    Corpus corpus;
    CooccurrenceCounts counts;
    MaskedMatrix masked;
    try {
      corpus = generate_corpus(transition, corpus_size, GeneratorSeed{seed});
      counts = count_cooccurrences(corpus, config.window, config.V);
      masked = empirical_spmi(counts, config.k);
    } catch (const Error& e) {
      for (std::size_t m = 0; m < n_methods; ++m) {
        rows[m].failed = true;
        rows[m].error = std::string("trial setup: ") + e.what();
      }
      return;
    }

    Matrix w_tilde;
    bool have_w_tilde = false;
    for (std::size_t m = 0; m < n_methods; ++m) {
      TrialResult& row = rows[m];
      const auto t0 = std::chrono::steady_clock::now();
      try {
        Matrix estimate;
        switch (row.method) {
          case Method::kSppmiSvd: {
            auto [svd, pair] = svd_sppmi_embeddings(masked, config.d);
            (void)svd;
            estimate = pair.w * pair.c.transpose();
            break;
          }
          case Method::kEmMvsvd: {
            const MvsvdResult res =
                em_mvsvd(masked, config.d,
                         MvsvdOptions{config.mvsvd_tol, config.mvsvd_max_iter});
            const EmbeddingPair pair = embeddings_from_svd(res.svd);
            estimate = pair.w * pair.c.transpose();
            row.iterations = res.iterations;
            break;
          }
          case Method::kDdMvsvd: {
            if (!have_w_tilde) {
              w_tilde = estimated_population_spmi(counts, config.k);
              have_w_tilde = true;
            }
            const MvsvdResult res =
                dd_mvsvd(masked, w_tilde, config.d,
                         MvsvdOptions{config.mvsvd_tol, config.mvsvd_max_iter});
            const EmbeddingPair pair = embeddings_from_svd(res.svd);
            estimate = pair.w * pair.c.transpose();
            row.iterations = res.iterations;
            break;
          }
          case Method::kSgns: {
            SgnsConfig sc;
            sc.d = config.d;
            sc.k = config.k;
            sc.window = config.window;
            sc.epochs = config.sgns_epochs;
            sc.lr_initial = config.sgns_lr_initial;
            sc.lr_final = config.sgns_lr_final;
            sc.negative_exponent = config.sgns_negative_exponent;
            sc.seed = derive_seed(
                config.base_seed, static_cast<std::uint64_t>(corpus_size),
                static_cast<std::uint64_t>(trial), SeedStage::kSgns);
            auto [pair, stats] = train_sgns(corpus, config.V, sc);
            estimate = sgns_product(pair);
            break;
          }
        }
        row.rmse = rmse(estimate, target);
        if (persist && config.save_matrices) {
          save_matrix(out_dir / ("estimate_" + method_name(row.method) + "_" +
                                 std::to_string(corpus_size) + "_t" +
                                 std::to_string(trial) + ".spmi"),
                      estimate,
                      {{"method", method_name(row.method)},
                       {"corpus_size", corpus_size},
                       {"trial", trial},
                       {"seed", seed}});
        }
      } catch (const Error& e) {
        row.failed = true;
        row.error = e.what();
      }
      row.wall_seconds =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
              .count();
    }
  };

  if (config.jobs == 1) {
    for (std::size_t cell = 0; cell < n_cells; ++cell) {
      run_cell(cell);
      cell_done[cell] = 1;
      persist_partial();
    }
  } else {
    std::atomic<std::size_t> next{0};
    const int workers =
        static_cast<int>(std::min<std::size_t>(
            static_cast<std::size_t>(config.jobs), n_cells));
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int wkr = 0; wkr < workers; ++wkr) {
      pool.emplace_back([&]() {
        for (;;) {
          const std::size_t cell = next.fetch_add(1);
          if (cell >= n_cells) return;
          run_cell(cell);
          std::lock_guard<std::mutex> lock(persist_mutex);
          cell_done[cell] = 1;
          persist_partial();
        }
      });
    }
    for (std::thread& th : pool) th.join();
  }

  table.aggregates = aggregate_rows(table.rows);
  if (persist) {
    write_text_file(out_dir / "results.csv", results_csv(table.rows));
    write_text_file(out_dir / "aggregates.csv",
                    aggregates_csv(table.aggregates));
    write_text_file(out_dir / "timings.csv", timings_csv(table.rows));
  }
  return table;
}

}  // namespace spmi
