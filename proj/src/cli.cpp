#include "mbgp/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "mbgp/correction.hpp"
#include "mbgp/error.hpp"
#include "mbgp/format.hpp"
#include "mbgp/io.hpp"
#include "mbgp/predict.hpp"
#include "mbgp/sampler.hpp"
#include "mbgp/scoring.hpp"
#include "mbgp/simd.hpp"
#include "mbgp/simulate.hpp"

namespace mbgp {

namespace {

struct Common {
  std::string config;
  std::string simd = "auto";
  int threads = 1;
  std::uint64_t seed = 1;
};

struct SimulateArgs {
  std::size_t n = 2000;
  std::string beta = "0,1,-5";
  double sigma2 = 1.0;
  double omega = 0.5;
  double phi = 0.236;
  std::string kernel = "exponential";
  std::size_t dims = 2;
  double test_fraction = 0.2;
  std::size_t sim_neighbors = 30;
  std::string out;
};

struct FitArgs {
  std::string data;
  std::string out;
  std::string meta;
  std::string algorithm = "nn";
  std::size_t iterations = 0;
  std::size_t epochs = 0;
  std::size_t batches = 0;
  std::size_t neighbors = 15;
  double batch_fraction = 0.25;
  double c = 1.0;
  std::size_t b_init = 0;
  std::size_t b_inc = 0;
  double scale_omega = 0.3;
  double scale_phi = 0.3;
  long long burn_in = -1;
  bool no_adapt = false;
  bool resplit = false;
  std::string prior = "continuous";
  std::size_t grid_size = 20;
  std::string ordering = "maxmin";
  std::string kernel = "exponential";
  std::string correction;
};

struct PredictArgs {
  std::string data;
  std::string draws;
  std::string meta;
  std::string out;
  std::size_t neighbors = 0; // 0: same as the fit
  std::size_t max_draws = 500;
  long long burn_in = -1;
};

struct ScoreArgs {
  std::string predictions;
  std::string out;
  std::string label = "run";
  std::string draws;
  std::string meta;
  std::string truth;
  std::string param_out;
  std::size_t max_draws = 2000;
  long long burn_in = -1;
};

struct CorrectionArgs {
  double c = 1.0;
  double lambda = -1.0;
  std::string out;
};

std::vector<double> parse_list(const std::string& text, std::string_view what) {
  std::vector<double> v;
  for (const auto& cell : split_csv_line(text)) {
    try {
      v.push_back(parse_double(cell, what));
    } catch (const IoError&) {
      throw InputError("cannot parse " + std::string(what) + " entry '" + cell + "'");
    }
  }
  return v;
}

template <class T>
std::string str(const T& v) {
  if constexpr (std::is_floating_point_v<T>)
    return format_double(v);
  else if constexpr (std::is_same_v<T, bool>)
    return v ? "true" : "false";
  else if constexpr (std::is_convertible_v<T, std::string>)
    return std::string(v);
  else
    return std::to_string(v);
}

void add_common(CLI::App* sub, Common& c, bool seeded) {
  sub->add_option("--config", c.config, "Flat key = value file; command-line flags take precedence");
  sub->add_option("--simd", c.simd, "Kernel instruction set: auto, scalar, avx2, neon");
  sub->add_option("--threads", c.threads, "Worker threads for inner loops")->check(CLI::PositiveNumber);
  if (seeded) sub->add_option("--seed", c.seed, "Random seed");
}

// Options given in the config file fill in whatever the command line left unset.
void apply_config(CLI::App* sub, const std::string& path) {
  if (path.empty()) return;
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file '" + path + "'");
  Metadata entries;
  try {
    entries = read_metadata(in);
  } catch (const IoError& e) {
    throw InputError(std::string("config file: ") + e.what());
  }
  for (const auto& [key, value] : entries) {
    CLI::Option* opt = key == "config" ? nullptr : sub->get_option_no_throw("--" + key);
    if (opt == nullptr) throw InputError("config file: unknown key '" + key + "' for " + sub->get_name());
    if (opt->count() > 0) continue;
    try {
      opt->add_result(value);
      opt->run_callback();
    } catch (const CLI::Error& e) {
      throw InputError("config file: bad value for '" + key + "': " + e.what());
    }
  }
}

void select_simd(const std::string& name) {
  if (name == "auto") {
    simd::set_active(simd::best_available());
    return;
  }
  simd::Isa isa;
  if (name == "scalar")
    isa = simd::Isa::scalar;
  else if (name == "avx2")
    isa = simd::Isa::avx2;
  else if (name == "neon")
    isa = simd::Isa::neon;
  else
    throw InputError("unknown --simd value '" + name + "'");
  if (!simd::set_active(isa)) throw InputError("instruction set '" + name + "' is not available on this machine");
}

SpatialDataset load_dataset(const std::string& path) {
  require(!path.empty(), "--data is required");
  SpatialDataset data = read_dataset_csv(path);
  data.validate();
  return data;
}

SpatialDataset training_part(const SpatialDataset& data) {
  if (data.split.empty()) return data;
  const auto rows = data.indices_of(Split::train);
  require(!rows.empty(), "dataset has no training rows");
  return data.rows(rows);
}

std::string meta_get(const Metadata& meta, const std::string& key) {
  const auto it = meta.find(key);
  if (it == meta.end()) throw IoError("metadata is missing '" + key + "'");
  return it->second;
}

std::size_t burn_in_rows(long long flag, const Metadata& meta, std::size_t rows) {
  const std::size_t burn =
      flag >= 0 ? static_cast<std::size_t>(flag) : static_cast<std::size_t>(parse_integer(meta_get(meta, "burn_in"), "burn_in"));
  require(burn < rows, "burn-in leaves no draws");
  return burn;
}

std::string default_meta(const std::string& draws) { return draws + ".meta"; }

int cmd_simulate(const SimulateArgs& a, const Common& c, std::ostream& out) {
  require(!a.out.empty(), "--out is required");
  SimulationConfig cfg;
  cfg.n = a.n;
  const auto beta = parse_list(a.beta, "beta");
  cfg.beta = Eigen::Map<const Eigen::VectorXd>(beta.data(), static_cast<Eigen::Index>(beta.size()));
  cfg.sigma2 = a.sigma2;
  cfg.omega = a.omega;
  cfg.phi = a.phi;
  cfg.family = parse_kernel_family(a.kernel);
  cfg.dims = a.dims;
  cfg.test_fraction = a.test_fraction;
  cfg.sim_neighbors = a.sim_neighbors;
  cfg.seed = c.seed;
  const SpatialDataset data = simulate_dataset(cfg);
  write_dataset_csv(a.out, data);
  out << "wrote " << data.size() << " rows (" << data.indices_of(Split::test).size() << " test) to " << a.out << '\n';
  return 0;
}

int cmd_fit(const FitArgs& a, const Common& c, std::ostream& out) {
  require(!a.out.empty(), "--out is required");
  const SpatialDataset all = load_dataset(a.data);
  const SpatialDataset train = training_part(all);

  AlgoConfig cfg;
  cfg.algorithm = parse_algorithm(a.algorithm);
  cfg.iterations = a.iterations;
  cfg.epochs = a.epochs;
  cfg.batches = a.batches;
  if (cfg.algorithm == Algorithm::fb) {
    if (cfg.epochs == 0 && cfg.iterations > 0 && cfg.batches > 0) {
      // Accept --iterations as the number of batch visits.
      require(cfg.iterations % cfg.batches == 0, "fb: iterations must be a multiple of batches");
      cfg.epochs = cfg.iterations / cfg.batches;
    }
    cfg.iterations = 0;
  }
  cfg.neighbors = a.neighbors;
  cfg.batch_fraction = a.batch_fraction;
  cfg.c = a.c;
  cfg.b_init = a.b_init;
  cfg.b_inc = a.b_inc;
  cfg.scales = {a.scale_omega, a.scale_phi};
  if (a.burn_in >= 0) cfg.burn_in = static_cast<std::size_t>(a.burn_in);
  cfg.adapt = !a.no_adapt;
  cfg.resplit = a.resplit;
  cfg.seed = c.seed;
  cfg.ordering = parse_ordering(a.ordering);
  cfg.threads = c.threads;

  const KernelSpec kernel = KernelSpec::for_locations(parse_kernel_family(a.kernel), train.locations);
  ThetaPriorKind kind;
  if (a.prior == "continuous")
    kind = ThetaPriorKind::continuous;
  else if (a.prior == "discrete")
    kind = ThetaPriorKind::discrete;
  else
    throw InputError("--prior must be continuous or discrete");
  const PriorSpec prior = PriorSpec::defaults(train.num_coefficients(), kernel, kind, a.grid_size);
  cfg.validate(train.size());

  std::optional<CorrectionDistribution> cd;
  if (cfg.algorithm == Algorithm::barker) {
    if (!a.correction.empty()) {
      std::ifstream in(a.correction);
      if (!in) throw IoError("cannot open correction file '" + a.correction + "'");
      cd = read_correction(in);
      require(cd->c() == cfg.c, "correction file was built for c = " + format_double(cd->c()));
    } else {
      cd = estimate_correction_distribution(cfg.c);
    }
  }

  const ChainOutput chain = run_chain(train, cfg, prior, kernel, cd ? &*cd : nullptr);
  write_chain_csv(a.out, chain);

  Metadata meta{
      {"format", "mbgp-chain 1"},
      {"data", a.data},
      {"algorithm", std::string(to_string(cfg.algorithm))},
      {"iterations", str(cfg.iterations)},
      {"epochs", str(cfg.epochs)},
      {"batches", str(cfg.batches)},
      {"neighbors", str(cfg.neighbors)},
      {"batch_fraction", str(cfg.batch_fraction)},
      {"c", str(cfg.c)},
      {"b_init", str(cfg.b_init)},
      {"b_inc", str(cfg.b_inc)},
      {"scale_omega", str(cfg.scales[0])},
      {"scale_phi", str(cfg.scales[1])},
      {"final_scale_omega", str(chain.final_scales[0])},
      {"final_scale_phi", str(chain.final_scales[1])},
      {"burn_in", str(cfg.burn_in_rows())},
      {"adapt", str(cfg.adapt)},
      {"resplit", str(cfg.resplit)},
      {"seed", str(cfg.seed)},
      {"ordering", std::string(to_string(cfg.ordering))},
      {"threads", str(cfg.threads)},
      {"simd", std::string(to_string(simd::active().isa))},
      {"kernel", std::string(to_string(kernel.family))},
      {"phi_min", str(kernel.phi_min)},
      {"phi_max", str(kernel.phi_max)},
      {"prior", a.prior},
      {"grid_size", str(a.grid_size)},
      {"num_coefficients", str(train.num_coefficients())},
      {"dims", str(train.dims())},
      {"n_train", str(train.size())},
      {"rows", str(chain.rows())},
      {"acceptance_rate", str(chain.acceptance_rate(cfg.burn_in_rows()))},
      {"clamped_steps", str(chain.clamped)},
      {"total_wall_ms", str(chain.total_wall_ms())},
  };
  const std::string meta_path = a.meta.empty() ? default_meta(a.out) : a.meta;
  write_metadata_file(meta_path, meta);

  const std::size_t burn = cfg.burn_in_rows();
  const auto kept = chain.draws.bottomRows(chain.draws.rows() - static_cast<Eigen::Index>(burn));
  const std::size_t ncoef = chain.num_coefficients;
  out << std::left << std::setw(10) << "parameter" << std::right << std::setw(14) << "mean" << std::setw(14) << "sd"
      << '\n';
  for (Eigen::Index k = 0; k < kept.cols(); ++k) {
    std::string name = static_cast<std::size_t>(k) < ncoef ? "beta" + std::to_string(k)
                       : static_cast<std::size_t>(k) == ncoef ? "sigma2"
                       : static_cast<std::size_t>(k) == ncoef + 1 ? "omega"
                                                                  : "phi";
    const double m = kept.col(k).mean();
    const double sd = kept.rows() > 1 ? std::sqrt((kept.col(k).array() - m).square().sum() / static_cast<double>(kept.rows() - 1)) : 0.0;
    out << std::left << std::setw(10) << name << std::right << std::setw(14) << std::setprecision(6) << m
        << std::setw(14) << sd << '\n';
  }
  out << "acceptance rate " << chain.acceptance_rate(burn) << ", mean batch size " << chain.mean_batch_size(burn)
      << ", wall time " << chain.total_wall_ms() / 1000.0 << " s\n";
  out << "wrote " << chain.rows() << " draws to " << a.out << " and " << meta_path << '\n';
  return 0;
}

int cmd_predict(const PredictArgs& a, const Common& c, std::ostream& out) {
  require(!a.draws.empty(), "--draws is required");
  require(!a.out.empty(), "--out is required");
  const SpatialDataset all = load_dataset(a.data);
  require(!all.split.empty(), "dataset has no split column, so there is nothing to predict");
  const auto test_rows = all.indices_of(Split::test);
  require(!test_rows.empty(), "dataset has no test rows");
  const SpatialDataset train = training_part(all);
  const SpatialDataset test = all.rows(test_rows);

  const Metadata meta = read_metadata_file(a.meta.empty() ? default_meta(a.draws) : a.meta);
  const KernelSpec kernel = KernelSpec::for_locations(parse_kernel_family(meta_get(meta, "kernel")), train.locations);
  const double phi_min = parse_double(meta_get(meta, "phi_min"), "phi_min");
  const double phi_max = parse_double(meta_get(meta, "phi_max"), "phi_max");
  require(phi_min == kernel.phi_min && phi_max == kernel.phi_max,
          "draws were fitted with range bounds that do not match this dataset's training locations");
  require(parse_integer(meta_get(meta, "num_coefficients"), "num_coefficients") ==
              static_cast<long long>(train.num_coefficients()),
          "draws and dataset differ in the number of coefficients");
  require(parse_integer(meta_get(meta, "dims"), "dims") == static_cast<long long>(train.dims()),
          "draws and dataset differ in location dimension");

  const ChainTable chain = read_chain_csv(a.draws);
  require(chain.draws.cols() == static_cast<Eigen::Index>(train.num_coefficients() + 3),
          "draws file does not match the dataset's covariates");
  const std::size_t burn = burn_in_rows(a.burn_in, meta, static_cast<std::size_t>(chain.draws.rows()));
  const Eigen::MatrixXd kept = chain.draws.bottomRows(chain.draws.rows() - static_cast<Eigen::Index>(burn));

  PredictOptions opt;
  opt.neighbors = a.neighbors ? a.neighbors : static_cast<std::size_t>(parse_integer(meta_get(meta, "neighbors"), "neighbors"));
  if (opt.neighbors == 0) opt.neighbors = 15;
  opt.max_draws = a.max_draws;
  opt.seed = c.seed;
  opt.threads = c.threads;
  const PredictiveSummary summary = predict_at(test, train, kept, kernel, opt);
  write_predictions_csv(a.out, test.locations, test.y, summary);
  out << "wrote predictions at " << test.size() << " locations to " << a.out << '\n';
  return 0;
}

int cmd_score(const ScoreArgs& a, const Common&, std::ostream& out) {
  require(!a.predictions.empty() || !a.draws.empty(), "give --predictions, --draws, or both");
  if (!a.predictions.empty()) {
    const PredictionTable table = read_predictions_csv(a.predictions);
    const PredictionMetrics m = prediction_metrics(table.summary, table.truth);
    if (a.out.empty()) {
      write_metrics(out, a.label, m);
    } else {
      std::ofstream f(a.out);
      if (!f) throw IoError("cannot open '" + a.out + "' for writing");
      write_metrics(f, a.label, m);
      if (!f) throw IoError("failed writing '" + a.out + "'");
      write_metrics(out, a.label, m);
    }
  }
  if (!a.draws.empty()) {
    require(!a.truth.empty(), "--truth is required with --draws");
    const ChainTable chain = read_chain_csv(a.draws);
    const auto truth = parse_list(a.truth, "truth");
    require(static_cast<Eigen::Index>(truth.size()) == chain.draws.cols(),
            "--truth needs one value per chain parameter (beta..., sigma2, omega, phi)");
    std::size_t burn = a.burn_in >= 0 ? static_cast<std::size_t>(a.burn_in) : 0;
    if (a.burn_in < 0) {
      const Metadata meta = read_metadata_file(a.meta.empty() ? default_meta(a.draws) : a.meta);
      burn = burn_in_rows(-1, meta, static_cast<std::size_t>(chain.draws.rows()));
    }
    require(burn < static_cast<std::size_t>(chain.draws.rows()), "burn-in leaves no draws");
    const Eigen::MatrixXd kept = chain.draws.bottomRows(chain.draws.rows() - static_cast<Eigen::Index>(burn));
    const Eigen::Map<const Eigen::VectorXd> t(truth.data(), static_cast<Eigen::Index>(truth.size()));
    std::ostringstream table;
    table << "label,parameter,crps\n";
    const auto ncoef = kept.cols() - 3;
    for (Eigen::Index k = 0; k < kept.cols(); ++k) {
      const Eigen::VectorXd col = kept.col(k);
      const std::string name = k < ncoef ? "beta" + std::to_string(k) : k == ncoef ? "sigma2" : k == ncoef + 1 ? "omega" : "phi";
      table << a.label << ',' << name << ',' << format_double(crps_ensemble({col.data(), static_cast<std::size_t>(col.size())}, t(k))) << '\n';
    }
    table << a.label << ",energy," << format_double(energy_score(kept, t, a.max_draws)) << '\n';
    out << table.str();
    if (!a.param_out.empty()) {
      std::ofstream f(a.param_out);
      if (!f) throw IoError("cannot open '" + a.param_out + "' for writing");
      f << table.str();
      if (!f) throw IoError("failed writing '" + a.param_out + "'");
    }
  }
  return 0;
}

int cmd_correction(const CorrectionArgs& a, const Common&, std::ostream& out) {
  require(!a.out.empty(), "--out is required");
  require(a.c > 0.0 && a.c <= 3.0, "--c must lie in (0, 3]");
  std::optional<double> lambda;
  if (a.lambda >= 0.0) lambda = a.lambda;
  const CorrectionDistribution cd = estimate_correction_distribution(a.c, {}, lambda);
  std::ofstream f(a.out);
  if (!f) throw IoError("cannot open '" + a.out + "' for writing");
  write_correction(f, cd);
  out << "c = " << format_double(cd.c()) << ", lambda = " << format_double(cd.lambda())
      << ", sup-error = " << format_double(cd.sup_error()) << ", wrote " << a.out << '\n';
  return 0;
}

} // namespace

int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Minibatch Gibbs and Metropolis-Hastings samplers for nearest-neighbor Gaussian processes", "mbgp"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Show help for every subcommand");

  Common common;
  SimulateArgs sim;
  FitArgs fit;
  PredictArgs pred;
  ScoreArgs score;
  CorrectionArgs corr;

  auto* s = app.add_subcommand("simulate", "Simulate a spatial dataset on the unit square");
  add_common(s, common, true);
  s->add_option("--n", sim.n, "Number of locations");
  s->add_option("--beta", sim.beta, "Coefficients, intercept first (comma separated)");
  s->add_option("--sigma2", sim.sigma2, "Sill");
  s->add_option("--omega", sim.omega, "Nugget proportion");
  s->add_option("--phi", sim.phi, "Range");
  s->add_option("--kernel", sim.kernel, "exponential, matern32, matern52 or gaussian");
  s->add_option("--dims", sim.dims, "Location dimension");
  s->add_option("--test-fraction", sim.test_fraction, "Share of rows marked test");
  s->add_option("--sim-neighbors", sim.sim_neighbors, "Neighbors for the sequential draw above n = 4000");
  s->add_option("--out", sim.out, "Output dataset CSV");

  auto* f = app.add_subcommand("fit", "Run a sampler on the training rows of a dataset");
  add_common(f, common, true);
  f->add_option("--data", fit.data, "Dataset CSV");
  f->add_option("--out", fit.out, "Output draws CSV");
  f->add_option("--meta", fit.meta, "Metadata sidecar (default: <out>.meta)");
  f->add_option("--algorithm", fit.algorithm, "full, nn, barker or fb");
  f->add_option("--iterations", fit.iterations, "Iterations (full, nn, barker)");
  f->add_option("--epochs", fit.epochs, "Epochs (fb)");
  f->add_option("--batches", fit.batches, "Number of minibatches H (fb)");
  f->add_option("--neighbors", fit.neighbors, "Conditioning set size M");
  f->add_option("--batch-fraction", fit.batch_fraction, "Share of n used by the Barker conjugate steps");
  f->add_option("--c", fit.c, "Barker cutoff c");
  f->add_option("--b-init", fit.b_init, "Initial Barker batch (0: max(1000, 1% of n))");
  f->add_option("--b-inc", fit.b_inc, "Barker batch increment (0: same as --b-init)");
  f->add_option("--scale-omega", fit.scale_omega, "Initial random-walk sd of logit(omega)");
  f->add_option("--scale-phi", fit.scale_phi, "Initial random-walk sd of the transformed range");
  f->add_option("--burn-in", fit.burn_in, "Burn-in rows (default: half)");
  f->add_flag("--no-adapt", fit.no_adapt, "Keep proposal scales fixed");
  f->add_flag("--resplit", fit.resplit, "fb: draw a new split every epoch");
  f->add_option("--prior", fit.prior, "continuous or discrete prior on (omega, phi)");
  f->add_option("--grid-size", fit.grid_size, "Values per parameter of the discrete prior");
  f->add_option("--ordering", fit.ordering, "maxmin, coordinate-sum, random or as-given");
  f->add_option("--kernel", fit.kernel, "exponential, matern32, matern52 or gaussian");
  f->add_option("--correction", fit.correction, "Correction distribution file (Barker); fitted on the fly if absent");

  auto* p = app.add_subcommand("predict", "Predict test rows from posterior draws");
  add_common(p, common, true);
  p->add_option("--data", pred.data, "Dataset CSV (the fit's)");
  p->add_option("--draws", pred.draws, "Draws CSV from fit");
  p->add_option("--meta", pred.meta, "Metadata sidecar (default: <draws>.meta)");
  p->add_option("--out", pred.out, "Output predictions CSV");
  p->add_option("--neighbors", pred.neighbors, "Kriging neighbors (default: the fit's M)");
  p->add_option("--max-draws", pred.max_draws, "Posterior draws used, thinned on a uniform stride");
  p->add_option("--burn-in", pred.burn_in, "Rows to drop (default: the fit's burn-in)");

  auto* sc = app.add_subcommand("score", "Score predictions and/or parameter draws");
  add_common(sc, common, true);
  sc->add_option("--predictions", score.predictions, "Predictions CSV");
  sc->add_option("--out", score.out, "Metrics CSV");
  sc->add_option("--label", score.label, "Row label");
  sc->add_option("--draws", score.draws, "Draws CSV for parameter scores");
  sc->add_option("--meta", score.meta, "Metadata sidecar of the draws");
  sc->add_option("--truth", score.truth, "True parameter values (beta..., sigma2, omega, phi)");
  sc->add_option("--param-out", score.param_out, "Parameter scores CSV");
  sc->add_option("--max-draws", score.max_draws, "Draws kept for the energy score (0: all)");
  sc->add_option("--burn-in", score.burn_in, "Rows to drop (default: from metadata)");

  auto* cd = app.add_subcommand("correction-dist", "Fit and certify the Barker correction distribution");
  add_common(cd, common, false);
  cd->add_option("--c", corr.c, "Normal variance c in (0, 3]");
  cd->add_option("--lambda", corr.lambda, "L1 penalty (default: chosen automatically)");
  cd->add_option("--out", corr.out, "Output file");

  try {
    try {
      app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
      return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
      return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
      app.exit(e, out, err);
      return 2;
    }
    CLI::App* sub = app.get_subcommands().front();
    apply_config(sub, common.config);
    select_simd(common.simd);
    if (sub == s) return cmd_simulate(sim, common, out);
    if (sub == f) return cmd_fit(fit, common, out);
    if (sub == p) return cmd_predict(pred, common, out);
    if (sub == sc) return cmd_score(score, common, out);
    return cmd_correction(corr, common, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return e.exit_code();
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return 4;
  } catch (const std::bad_alloc&) {
    err << "error: out of memory\n";
    return 3;
  }
}

} // namespace mbgp
