// spmilab: command-line front end for the SPMI estimation library.
//
// Subcommands cover the full pipeline: synthesize a population model and
// corpus (generate), ingest real text (ingest), count co-occurrences (cooc),
// factorize counts into embeddings (factorize), score an estimate against a
// target matrix (evaluate), run the complete simulation study (experiment),
// and dump a rank-frequency table (zipf-report).

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <unordered_set>

#include <CLI11.hpp>
#include <json.hpp>

#include "spmi/cooccur.hpp"
#include "spmi/corpus.hpp"
#include "spmi/errors.hpp"
#include "spmi/factorize.hpp"
#include "spmi/genmodel.hpp"
#include "spmi/harness.hpp"
#include "spmi/matrix_io.hpp"
#include "spmi/rng.hpp"
#include "spmi/sgns.hpp"

namespace {

spmi::CooccurrenceCounts load_counts(const std::string& path) {
  const spmi::LoadedMatrix loaded = spmi::load_matrix(path);
  spmi::CooccurrenceCounts counts;
  counts.counts = loaded.values;
  counts.window = loaded.metadata.value("window", 1);
  counts.total_pairs =
      loaded.metadata.value("total_pairs", loaded.values.sum());
  return counts;
}

std::unordered_set<std::string> load_stopwords(const std::string& path) {
  std::unordered_set<std::string> words;
  if (path.empty()) return words;
  std::ifstream in(path);
  if (!in) throw spmi::IoError("cannot open stopword list: " + path);
  std::string line;
  while (std::getline(in, line)) {
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) {
      line.pop_back();
    }
    if (!line.empty()) words.insert(line);
  }
  return words;
}

int run(int argc, char** argv) {
  CLI::App app{"word-embedding estimators on a copula language model"};
  app.require_subcommand(1);

  // ---- generate ----------------------------------------------------------
  auto* generate = app.add_subcommand(
      "generate", "synthesize a model and sample a corpus from it");
  struct {
    spmi::Index V = 50;
    double zipf_s = 1.0;
    double rho = 0.5;
    std::int64_t length = 100000;
    std::uint64_t seed = 0;
    int k = 1;
    std::string out;
    std::string save_transition, save_joint, save_spmi;
  } gen;
  generate->add_option("--V", gen.V, "vocabulary size")->capture_default_str();
  generate->add_option("--zipf-s", gen.zipf_s, "Zipf exponent")
      ->capture_default_str();
  generate->add_option("--rho", gen.rho, "copula correlation")
      ->capture_default_str();
  generate->add_option("--length", gen.length, "corpus length in tokens")
      ->capture_default_str();
  generate->add_option("--seed", gen.seed, "corpus RNG seed")->required();
  generate->add_option("--k", gen.k, "shift for --save-spmi")
      ->capture_default_str();
  generate->add_option("--out", gen.out, "corpus output path")->required();
  generate->add_option("--save-transition", gen.save_transition,
                       "also save the transition matrix here");
  generate->add_option("--save-joint", gen.save_joint,
                       "also save the joint co-occurrence matrix here");
  generate->add_option("--save-spmi", gen.save_spmi,
                       "also save the population SPMI (shift --k) here");

  // ---- ingest ------------------------------------------------------------
  auto* ingest = app.add_subcommand(
      "ingest", "tokenize plain text into a vocabulary and id corpus");
  struct {
    std::string input;
    std::int64_t min_count = 0;
    std::string stopword_file;
    std::string out, vocab;
  } ing;
  ingest->add_option("--input", ing.input, "UTF-8 text file ('-' for stdin)")
      ->required();
  ingest->add_option("--min-count", ing.min_count,
                     "drop words rarer than this")
      ->capture_default_str();
  ingest->add_option("--stopwords", ing.stopword_file,
                     "newline-delimited stopword list");
  ingest->add_option("--out", ing.out, "corpus output path")->required();
  ingest->add_option("--vocab", ing.vocab, "vocabulary output path")
      ->required();

  // ---- cooc --------------------------------------------------------------
  auto* cooc = app.add_subcommand(
      "cooc", "count windowed co-occurrences of a corpus");
  struct {
    std::string corpus;
    int window = 1;
    std::string out;
  } co;
  cooc->add_option("--corpus", co.corpus, "corpus file")->required();
  cooc->add_option("--window", co.window, "symmetric window width")
      ->capture_default_str();
  cooc->add_option("--out", co.out, "counts matrix output path")->required();

  // ---- factorize ---------------------------------------------------------
  auto* factorize = app.add_subcommand(
      "factorize", "estimate the SPMI matrix from counts or a corpus");
  struct {
    std::string method;
    std::string counts;
    std::string corpus;
    spmi::Index d = 25;
    int k = 5;
    double tol = 1e-6;
    int max_iter = 100;
    int epochs = 40;
    double lr_initial = 0.05;
    double lr_final = 1e-4;
    double negative_exponent = 1.0;
    std::uint64_t seed = 0;
    std::string out_w, out_c, out_product;
  } fac;
  factorize
      ->add_option("--method", fac.method,
                   "sppmi-svd | em-mvsvd | dd-mvsvd | sgns")
      ->required();
  factorize->add_option("--counts", fac.counts,
                        "co-occurrence counts (matrix methods)");
  factorize->add_option("--corpus", fac.corpus, "corpus file (sgns)");
  factorize->add_option("--d", fac.d, "embedding rank")->capture_default_str();
  factorize->add_option("--k", fac.k, "SPMI shift / negative samples")
      ->capture_default_str();
  factorize->add_option("--tol", fac.tol, "MVSVD convergence tolerance")
      ->capture_default_str();
  factorize->add_option("--max-iter", fac.max_iter, "MVSVD iteration cap")
      ->capture_default_str();
  factorize->add_option("--epochs", fac.epochs, "SGNS epochs")
      ->capture_default_str();
  factorize->add_option("--lr-initial", fac.lr_initial, "SGNS initial lr")
      ->capture_default_str();
  factorize->add_option("--lr-final", fac.lr_final, "SGNS final lr")
      ->capture_default_str();
  factorize
      ->add_option("--negative-exponent", fac.negative_exponent,
                   "SGNS negative-sampling exponent")
      ->capture_default_str();
  factorize->add_option("--seed", fac.seed, "SGNS seed")
      ->capture_default_str();
  factorize->add_option("--out-w", fac.out_w, "word embeddings output")
      ->required();
  factorize->add_option("--out-c", fac.out_c, "context embeddings output")
      ->required();
  factorize->add_option("--out-product", fac.out_product,
                        "also save the W C^T estimate here");

  // ---- evaluate ----------------------------------------------------------
  auto* evaluate = app.add_subcommand(
      "evaluate", "root mean square error between two saved matrices");
  struct {
    std::string estimate, target;
  } ev;
  evaluate->add_option("--estimate", ev.estimate, "estimate matrix")
      ->required();
  evaluate->add_option("--target", ev.target, "target matrix")->required();

  // ---- experiment --------------------------------------------------------
  auto* experiment = app.add_subcommand(
      "experiment", "run the full simulation study");
  struct ExperimentCli {
    std::string config_file;
    std::uint64_t seed = 0;
    std::optional<spmi::Index> V;
    std::optional<double> zipf_s, rho;
    std::vector<std::int64_t> corpus_sizes;
    std::optional<spmi::Index> d;
    std::optional<int> k, window, trials;
    std::vector<std::string> methods;
    std::optional<double> mvsvd_tol;
    std::optional<int> mvsvd_max_iter, sgns_epochs;
    std::optional<double> sgns_lr_initial, sgns_lr_final,
        sgns_negative_exponent;
    std::string out_dir;
    std::optional<int> jobs;
    bool save_matrices = false;
  } ex;
  experiment->add_option("--config", ex.config_file,
                         "JSON config (keys mirror the config fields)");
  experiment->add_option("--seed", ex.seed, "base seed (required)")
      ->required();
  experiment->add_option("--V", ex.V, "vocabulary size");
  experiment->add_option("--zipf-s", ex.zipf_s, "Zipf exponent");
  experiment->add_option("--rho", ex.rho, "copula correlation");
  experiment
      ->add_option("--corpus-sizes", ex.corpus_sizes,
                   "comma-separated corpus sizes (strictly increasing)")
      ->delimiter(',');
  experiment->add_option("--d", ex.d, "embedding rank");
  experiment->add_option("--k", ex.k, "SPMI shift / negative samples");
  experiment->add_option("--window", ex.window, "co-occurrence window");
  experiment->add_option("--trials", ex.trials, "trials per corpus size");
  experiment
      ->add_option("--methods", ex.methods,
                   "comma-separated subset of sppmi-svd,em-mvsvd,dd-mvsvd,sgns")
      ->delimiter(',');
  experiment->add_option("--mvsvd-tol", ex.mvsvd_tol, "MVSVD tolerance");
  experiment->add_option("--mvsvd-max-iter", ex.mvsvd_max_iter,
                         "MVSVD iteration cap");
  experiment->add_option("--sgns-epochs", ex.sgns_epochs, "SGNS epochs");
  experiment->add_option("--sgns-lr-initial", ex.sgns_lr_initial,
                         "SGNS initial lr");
  experiment->add_option("--sgns-lr-final", ex.sgns_lr_final,
                         "SGNS final lr");
  experiment->add_option("--sgns-negative-exponent",
                         ex.sgns_negative_exponent,
                         "SGNS negative-sampling exponent");
  experiment->add_option("--out-dir", ex.out_dir, "output directory");
  experiment->add_option("--jobs", ex.jobs, "trial-level worker threads");
  experiment->add_flag("--save-matrices", ex.save_matrices,
                       "persist per-trial estimate matrices");

  // ---- zipf-report -------------------------------------------------------
  auto* zipf = app.add_subcommand(
      "zipf-report", "rank-frequency table with Zipf(1, V) expectations");
  struct {
    std::string corpus;
    std::string out;
  } zr;
  zipf->add_option("--corpus", zr.corpus, "corpus file")->required();
  zipf->add_option("--out", zr.out, "CSV output path (default: stdout)");

  CLI11_PARSE(app, argc, argv);

  if (generate->parsed()) {
    const spmi::ZipfMarginal marginal = spmi::zipf_marginal(gen.V, gen.zipf_s);
    const spmi::JointCooccurrence joint =
        spmi::copula_joint(marginal, spmi::GaussianCopula{gen.rho});
    const spmi::TransitionMatrix transition = spmi::to_transition(joint);
    const spmi::Corpus corpus = spmi::generate_corpus(
        transition, gen.length, spmi::GeneratorSeed{gen.seed});
    nlohmann::json extra = {
        {"seed", gen.seed},
        {"rng", spmi::kRngAlgorithm},
        {"zipf_s", gen.zipf_s},
        {"rho", gen.rho},
        {"model_fingerprint", spmi::matrix_fingerprint(transition.t)}};
    spmi::save_corpus(gen.out, corpus, gen.V, extra);
    std::cout << "wrote " << gen.out << " (" << corpus.length()
              << " tokens, V=" << gen.V << ")\n";
    if (!gen.save_transition.empty()) {
      spmi::save_matrix(gen.save_transition, transition.t,
                        {{"role", "transition"}});
    }
    if (!gen.save_joint.empty()) {
      spmi::save_matrix(gen.save_joint, joint.p, {{"role", "joint"}});
    }
    if (!gen.save_spmi.empty()) {
      spmi::save_matrix(gen.save_spmi, spmi::population_spmi(joint, gen.k),
                        {{"role", "population_spmi"}, {"k", gen.k}});
    }
    return 0;
  }

  if (ingest->parsed()) {
    const auto stopwords = load_stopwords(ing.stopword_file);
    std::pair<spmi::Vocabulary, spmi::Corpus> result = [&] {
      if (ing.input == "-") {
        return spmi::ingest_text(std::cin, ing.min_count, stopwords);
      }
      std::ifstream in(ing.input);
      if (!in) throw spmi::IoError("cannot open input: " + ing.input);
      return spmi::ingest_text(in, ing.min_count, stopwords);
    }();
    spmi::save_vocabulary(ing.vocab, result.first);
    spmi::save_corpus(ing.out, result.second, result.first.size(),
                      {{"source", ing.input}});
    std::cout << "wrote " << ing.out << " (" << result.second.length()
              << " tokens) and " << ing.vocab << " (V="
              << result.first.size() << ")\n";
    return 0;
  }

  if (cooc->parsed()) {
    const spmi::LoadedCorpus loaded = spmi::load_corpus(co.corpus);
    const spmi::CooccurrenceCounts counts =
        spmi::count_cooccurrences(loaded.corpus, co.window, loaded.V);
    spmi::save_matrix(co.out, counts.counts,
                      {{"role", "cooccurrence_counts"},
                       {"window", counts.window},
                       {"total_pairs", counts.total_pairs}});
    std::cout << "wrote " << co.out << " (total pairs "
              << static_cast<std::int64_t>(counts.total_pairs) << ")\n";
    return 0;
  }

  if (factorize->parsed()) {
    const spmi::Method method = spmi::parse_method(fac.method);
    spmi::EmbeddingPair pair;
    nlohmann::json meta = {{"method", fac.method},
                           {"d", fac.d},
                           {"k", fac.k}};
    if (method == spmi::Method::kSgns) {
      if (fac.corpus.empty()) {
        throw spmi::InvalidParameterError("sgns needs --corpus");
      }
      const spmi::LoadedCorpus loaded = spmi::load_corpus(fac.corpus);
      spmi::SgnsConfig sc;
      sc.d = fac.d;
      sc.k = fac.k;
      sc.window = 1;
      sc.epochs = fac.epochs;
      sc.lr_initial = fac.lr_initial;
      sc.lr_final = fac.lr_final;
      sc.negative_exponent = fac.negative_exponent;
      sc.seed = fac.seed;
      auto [trained, stats] = spmi::train_sgns(loaded.corpus, loaded.V, sc);
      pair = trained;
      meta["epochs"] = fac.epochs;
      meta["seed"] = fac.seed;
      if (!stats.epoch_loss.empty()) {
        meta["final_epoch_loss"] = stats.epoch_loss.back();
      }
    } else {
      if (fac.counts.empty()) {
        throw spmi::InvalidParameterError(fac.method + " needs --counts");
      }
      const spmi::CooccurrenceCounts counts = load_counts(fac.counts);
      const spmi::MaskedMatrix masked = spmi::empirical_spmi(counts, fac.k);
      if (method == spmi::Method::kSppmiSvd) {
        pair = spmi::svd_sppmi_embeddings(masked, fac.d).second;
      } else {
        const spmi::MvsvdOptions options{fac.tol, fac.max_iter};
        spmi::MvsvdResult res;
        if (method == spmi::Method::kEmMvsvd) {
          res = spmi::em_mvsvd(masked, fac.d, options);
        } else {
          const spmi::Matrix w_tilde =
              spmi::estimated_population_spmi(counts, fac.k);
          res = spmi::dd_mvsvd(masked, w_tilde, fac.d, options);
        }
        pair = spmi::embeddings_from_svd(res.svd);
        meta["iterations"] = res.iterations;
        std::cout << fac.method << " converged after " << res.iterations
                  << " iterations (objective "
                  << res.objective << ")\n";
      }
    }
    spmi::save_matrix(fac.out_w, pair.w, meta);
    spmi::save_matrix(fac.out_c, pair.c, meta);
    if (!fac.out_product.empty()) {
      spmi::save_matrix(fac.out_product, spmi::sgns_product(pair), meta);
    }
    std::cout << "wrote " << fac.out_w << " and " << fac.out_c << "\n";
    return 0;
  }

  if (evaluate->parsed()) {
    const spmi::Matrix estimate = spmi::load_matrix(ev.estimate).values;
    const spmi::Matrix target = spmi::load_matrix(ev.target).values;
    std::cout << spmi::rmse(estimate, target) << "\n";
    return 0;
  }

  if (experiment->parsed()) {
    spmi::ExperimentConfig config;
    if (!ex.config_file.empty()) {
      std::ifstream in(ex.config_file);
      if (!in) {
        throw spmi::IoError("cannot open config: " + ex.config_file);
      }
      nlohmann::json j;
      try {
        in >> j;
      } catch (const nlohmann::json::exception& e) {
        throw spmi::InvalidParameterError(std::string("bad config JSON: ") +
                                          e.what());
      }
      // Accept both a bare config object and the config.json echo an
      // earlier run wrote (config nested beside provenance fields).
      if (j.is_object() && j.contains("config")) j = j.at("config");
      config = spmi::config_from_json(j);
    }
    config.base_seed = ex.seed;
    if (ex.V) config.V = *ex.V;
    if (ex.zipf_s) config.zipf_s = *ex.zipf_s;
    if (ex.rho) config.rho = *ex.rho;
    if (!ex.corpus_sizes.empty()) config.corpus_sizes = ex.corpus_sizes;
    if (ex.d) config.d = *ex.d;
    if (ex.k) config.k = *ex.k;
    if (ex.window) config.window = *ex.window;
    if (ex.trials) config.trials = *ex.trials;
    if (!ex.methods.empty()) {
      config.methods.clear();
      for (const std::string& name : ex.methods) {
        config.methods.push_back(spmi::parse_method(name));
      }
    }
    if (ex.mvsvd_tol) config.mvsvd_tol = *ex.mvsvd_tol;
    if (ex.mvsvd_max_iter) config.mvsvd_max_iter = *ex.mvsvd_max_iter;
    if (ex.sgns_epochs) config.sgns_epochs = *ex.sgns_epochs;
    if (ex.sgns_lr_initial) config.sgns_lr_initial = *ex.sgns_lr_initial;
    if (ex.sgns_lr_final) config.sgns_lr_final = *ex.sgns_lr_final;
    if (ex.sgns_negative_exponent) {
      config.sgns_negative_exponent = *ex.sgns_negative_exponent;
    }
    if (!ex.out_dir.empty()) config.output_dir = ex.out_dir;
    if (ex.jobs) config.jobs = *ex.jobs;
    if (ex.save_matrices) config.save_matrices = true;

    const spmi::ResultTable table = spmi::run_experiment(config);
    std::cout << spmi::aggregates_csv(table.aggregates);
    if (!config.output_dir.empty()) {
      std::cout << "full results in " << config.output_dir << "\n";
    }
    return 0;
  }

  if (zipf->parsed()) {
    const spmi::LoadedCorpus loaded = spmi::load_corpus(zr.corpus);
    const spmi::ZipfReport report =
        spmi::zipf_report(loaded.corpus, loaded.V);
    const std::string csv = spmi::zipf_report_csv(report);
    if (zr.out.empty()) {
      std::cout << csv;
    } else {
      std::ofstream out(zr.out);
      if (!out) throw spmi::IoError("cannot open for writing: " + zr.out);
      out << csv;
    }
    std::cout << "log-log slope: " << report.slope << "\n";
    return 0;
  }

  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const spmi::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
