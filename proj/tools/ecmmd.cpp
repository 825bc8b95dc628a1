// ecmmd command-line tool.
//
// Exit codes: 0 success, 2 input error, 3 degenerate statistics, 1 anything else.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "ecmmd/calibration.hpp"
#include "ecmmd/csv.hpp"
#include "ecmmd/datagen.hpp"
#include "ecmmd/estimator.hpp"
#include "ecmmd/report.hpp"
#include "ecmmd/resampling.hpp"
#include "ecmmd/simulation.hpp"

namespace {

using namespace ecmmd;

constexpr int kExitInput = 2;
constexpr int kExitDegenerate = 3;

struct CommonFlags {
  std::size_t k = 10;
  std::string kernel;
  double alpha = 0.05;
  std::string mode = "asymptotic";
  std::size_t m = kDefaultResamples;
  std::size_t m_n = kDefaultDerandomizedResamples;
  std::uint64_t seed = 0;
  std::string out;
  bool one_sided = false;
};

void add_common(CLI::App* cmd, CommonFlags& f, const std::string& default_kernel) {
  f.kernel = default_kernel;
  cmd->add_option("--k", f.k, "Number of nearest neighbors")->capture_default_str();
  cmd->add_option("--kernel", f.kernel, "linear | gaussian[:median|:<lambda>]")->capture_default_str();
  cmd->add_option("--alpha", f.alpha, "Significance level")->capture_default_str();
  cmd->add_option("--mode", f.mode, "asymptotic | finite | derandomized")->capture_default_str();
  cmd->add_option("--M", f.m, "Resamples for the finite-sample test")->capture_default_str();
  cmd->add_option("--Mn", f.m_n, "Resamples for the derandomized test")->capture_default_str();
  cmd->add_option("--seed", f.seed, "Random seed")->capture_default_str();
  cmd->add_option("--out", f.out, "Write the JSON report here (default: stdout)");
  cmd->add_flag("--one-sided", f.one_sided, "Reject only for large positive z");
}

TestMode parse_mode(const CommonFlags& f) {
  if (f.mode == "asymptotic") return TestMode::asymptotic();
  if (f.mode == "finite") return TestMode::finite_sample(f.m);
  if (f.mode == "derandomized") return TestMode::derandomized(f.m_n);
  throw InputError("unknown --mode '" + f.mode + "' (asymptotic | finite | derandomized)");
}

TestOptions options_from(const CommonFlags& f) {
  TestOptions o;
  o.mode = parse_mode(f);
  o.kernel = KernelSpec::parse(f.kernel);
  o.k = f.k;
  o.alpha = f.alpha;
  o.seed = f.seed;
  o.alternative = f.one_sided ? Alternative::Greater : Alternative::TwoSided;
  return o;
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::vector<double> parse_numbers(const std::string& s) {
  std::vector<double> out;
  for (const std::string& item : split_list(s)) {
    try {
      out.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw InputError("not a number: '" + item + "'");
    }
  }
  return out;
}

void emit_json(const nlohmann::json& j, const std::string& out, const std::string& summary) {
  if (out.empty()) {
    std::cout << j.dump(2) << '\n';
    if (!summary.empty()) std::cerr << summary << '\n';
    return;
  }
  std::ofstream file(out);
  if (!file) throw InputError("cannot write '" + out + "'");
  file << j.dump(2) << '\n';
  if (!summary.empty()) std::cout << summary << '\n';
}

void emit(const TestReport& report, const std::string& out) {
  emit_json(nlohmann::json(report), out, summary_line(report));
}

double elapsed_ms(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
}

// --- test ---------------------------------------------------------------

struct ColumnFlags {
  std::string x, y, z;
};

void add_columns(CLI::App* cmd, ColumnFlags& c, bool with_x) {
  if (with_x) cmd->add_option("--x-cols", c.x, "Comma-separated X columns (default x_*)");
  cmd->add_option("--y-cols", c.y, "Comma-separated Y columns (default y_*)");
  cmd->add_option("--z-cols", c.z, "Comma-separated Z columns (default z_*)");
}

ColumnMapping mapping_from(const ColumnFlags& c) {
  return ColumnMapping{split_list(c.x), split_list(c.y), split_list(c.z)};
}

void run_test(const std::string& path, const CommonFlags& f, const ColumnFlags& cols) {
  const auto start = std::chrono::steady_clock::now();
  if (f.mode != "asymptotic") {
    throw InputError("'test' runs the asymptotic two-sample test; use 'gof' for resampling modes");
  }
  const TestOptions o = options_from(f);
  const PairedDataset data = to_paired(read_csv(path), mapping_from(cols));
  std::cerr << "loaded " << path << ": n=" << data.size() << " p=" << data.x.cols()
            << " d=" << data.z.cols() << '\n';
  const Kernel kern = o.kernel.kind == KernelKind::Linear
                          ? Kernel::linear()
                          : Kernel::gaussian(o.kernel.bandwidth ? *o.kernel.bandwidth : median_bandwidth(data));
  const EcmmdResult r = asymptotic_test(data, kern, o.k, o.alpha, o.alternative);
  TestReport report = make_report("ecmmd-asymptotic", r, data.z.cols(), kern, o.alpha, o.seed);
  report.wall_ms = elapsed_ms(start);
  emit(report, f.out);
}

// --- gof ----------------------------------------------------------------

struct SamplerFlags {
  std::string kind;  // gaussian | multinomial | columns (default: columns if present)
  std::string mean_coef;
  double mean_intercept = 0.0;
  double variance = 1.0;
};

void run_gof(const std::string& path, const CommonFlags& f, const ColumnFlags& cols, const SamplerFlags& s) {
  const auto start = std::chrono::steady_clock::now();
  TestOptions o = options_from(f);
  const CsvTable table = read_csv(path);
  const GofData data = to_gof(table, mapping_from(cols));
  std::cerr << "loaded " << path << ": n=" << data.size() << " p=" << data.y.cols()
            << " d=" << data.z.cols() << '\n';

  std::string kind = s.kind;
  std::optional<ResampleDraws> columns;
  if (kind.empty() || kind == "columns") {
    columns = resample_columns(table, data.y.cols());
    if (!columns) throw InputError("gof: no --sampler given and no r<m>_<j> resample columns in the file");
    kind = "columns";
  }

  TestReport report;
  if (kind == "columns") {
    const ResampleDraws& draws = *columns;
    const KnnGraph g = KnnGraph::build(data.z, o.k);
    auto resolve = [&](double median) {
      return o.kernel.kind == KernelKind::Linear
                 ? Kernel::linear()
                 : Kernel::gaussian(o.kernel.bandwidth ? *o.kernel.bandwidth : median);
    };
    switch (o.mode.kind) {
      case TestModeKind::Asymptotic: {
        const PairedDataset paired{draws.slots[0], data.y, data.z};
        const Kernel kern = resolve(o.kernel.needs_median() ? median_bandwidth(paired) : 0.0);
        report = make_report("ecmmd-asymptotic", asymptotic_test(paired, kern, g, o.alpha, o.alternative),
                             data.z.cols(), kern, o.alpha, o.seed);
        break;
      }
      case TestModeKind::FiniteSample: {
        const Kernel kern = resolve(o.kernel.needs_median() ? finite_sample_bandwidth(data, draws) : 0.0);
        FiniteSampleResult r = finite_sample_from_draws(data, draws, kern, g);
        r.seed = o.seed;
        report = make_report("ecmmd-finite-sample", r, data.z.cols(), kern, o.alpha);
        break;
      }
      case TestModeKind::Derandomized: {
        const Kernel kern = resolve(o.kernel.needs_median() ? derandomized_bandwidth(data, draws) : 0.0);
        DerandomizedResult r = derandomized_from_draws(data, draws, kern, g, o.alpha, o.alternative);
        r.seed = o.seed;
        report = make_report("ecmmd-derandomized", r, data.z.cols(), kern, o.alpha);
        break;
      }
    }
  } else if (kind == "gaussian") {
    std::vector<double> coef = parse_numbers(s.mean_coef);
    if (coef.empty()) coef.assign(data.z.cols(), 0.0);
    if (coef.size() != data.z.cols()) throw InputError("gof: --mean-coef needs one entry per z column");
    const GaussianSampler sampler = GaussianSampler::affine(s.mean_intercept, coef, s.variance);
    report = conditional_gof_test(data, sampler, o);
  } else if (kind == "multinomial") {
    report = conditional_gof_test(data, MultinomialSampler(data.z.cols()), o);
  } else {
    throw InputError("gof: unknown --sampler '" + kind + "' (gaussian | multinomial | columns)");
  }
  report.wall_ms = elapsed_ms(start);
  emit(report, f.out);
}

// --- calibrate ----------------------------------------------------------

void run_classify(const std::string& path, const CommonFlags& f) {
  const auto start = std::chrono::steady_clock::now();
  const ClassifierPredictions pred = to_classifier(read_csv(path));
  TestReport report = classification_calibration_test(pred, options_from(f));
  report.wall_ms = elapsed_ms(start);
  emit(report, f.out);
}

void run_regress(const std::string& path, const CommonFlags& f, const std::string& conditioning,
                 std::optional<double> variance) {
  const auto start = std::chrono::steady_clock::now();
  const RegressionInput in = to_regression(read_csv(path), variance);
  Conditioning c;
  if (conditioning == "mean") {
    c = Conditioning::MeanOnly;
  } else if (conditioning == "mean-var") {
    c = Conditioning::MeanAndVariance;
  } else {
    throw InputError("unknown --conditioning '" + conditioning + "' (mean | mean-var)");
  }
  TestReport report = regression_calibration_test(in.y, in.model, c, options_from(f));
  report.wall_ms = elapsed_ms(start);
  emit(report, f.out);
}

std::pair<std::vector<double>, std::vector<int>> binary_predictions(const std::string& path) {
  const ClassifierPredictions pred = to_classifier(read_csv(path));
  if (pred.classes() != 2) throw InputError("reliability/isotonic need binary predictions (p_1, p_2)");
  std::vector<double> probs(pred.size());
  std::vector<int> labels(pred.size());
  for (std::size_t i = 0; i < pred.size(); ++i) {
    probs[i] = pred.probs(i, 0);
    labels[i] = pred.labels[i] == 1 ? 1 : 0;
  }
  return {probs, labels};
}

void run_reliability(const std::string& path, std::size_t bins, const std::string& out) {
  const auto [probs, labels] = binary_predictions(path);
  const ReliabilityReport r = reliability_bins(probs, labels, bins);
  char buf[128];
  std::snprintf(buf, sizeof buf, "reliability: n=%zu bins=%zu ece=%.6g", r.n, bins, r.ece);
  emit_json(nlohmann::json(r), out, buf);
}

void run_isotonic(const std::string& path, const std::string& out) {
  const auto [probs, labels] = binary_predictions(path);
  const std::vector<double> y(labels.begin(), labels.end());
  const IsotonicFit fit = isotonic_recalibrate(probs, y);
  const std::vector<double> recal = fit.apply(probs);
  std::vector<int> recal_labels = labels;
  const ReliabilityReport before = reliability_bins(probs, labels, 10);
  const ReliabilityReport after = reliability_bins(recal, recal_labels, 10);
  const nlohmann::json j{{"breakpoints", fit.breakpoints},
                         {"levels", fit.levels},
                         {"ece_before", before.ece},
                         {"ece_after", after.ece}};
  char buf[128];
  std::snprintf(buf, sizeof buf, "isotonic: %zu levels, ece %.6g -> %.6g", fit.levels.size(), before.ece,
                after.ece);
  emit_json(j, out, buf);
}

// --- sim ----------------------------------------------------------------

struct SimFlags {
  std::size_t n = 100;
  std::size_t d = 3;
  double rho = 0.5;
  std::string hypothesis = "null";
  std::size_t n_train = 200;
  std::size_t reps = 100;
  bool intercept = false;
  std::string dump;
};

void add_sim(CLI::App* cmd, SimFlags& s) {
  cmd->add_option("--n", s.n, "Sample size (test size for reg-calib)")->capture_default_str();
  cmd->add_option("--d", s.d, "Covariate dimension (gof)")->capture_default_str();
  cmd->add_option("--rho", s.rho, "Signal strength")->capture_default_str();
  cmd->add_option("--hypothesis", s.hypothesis, "null | alt")->capture_default_str();
  cmd->add_option("--n-train", s.n_train, "Training size (reg-calib)")->capture_default_str();
  cmd->add_option("--reps", s.reps, "Monte Carlo replicates")->capture_default_str();
  cmd->add_flag("--intercept", s.intercept, "Fit the reg-calib OLS with an intercept");
  cmd->add_option("--dump", s.dump, "Write the first replicate's dataset to this CSV");
}

void dump_dataset(const ScenarioSpec& spec, const std::string& path) {
  const std::uint64_t seed = derive_seed(spec.seed, 0);
  switch (spec.scenario) {
    case Scenario::ClassCalib: {
      const ClassifierPredictions p = gen_class_calib(spec.n, spec.rho, spec.hypothesis, seed);
      Matrix m(p.size(), 3);
      for (std::size_t i = 0; i < p.size(); ++i) {
        m(i, 0) = p.probs(i, 0);
        m(i, 1) = p.probs(i, 1);
        m(i, 2) = static_cast<double>(p.labels[i]);
      }
      write_csv(path, {"p_1", "p_2", "label"}, m);
      break;
    }
    case Scenario::RegCalib: {
      const RegCalibData r = gen_reg_calib(spec.n_train, spec.n, spec.rho, seed, spec.hypothesis, spec.with_intercept);
      Matrix m(r.y_test.size(), 3);
      for (std::size_t i = 0; i < r.y_test.size(); ++i) {
        m(i, 0) = r.y_test[i];
        m(i, 1) = r.model.means[i];
        m(i, 2) = r.model.variance(i);
      }
      write_csv(path, {"y", "mean", "var"}, m);
      break;
    }
    case Scenario::GofGaussian: {
      const GofScenario g = gen_gof_gaussian(spec.n, spec.d, spec.rho, seed);
      Matrix m(spec.n, 1 + spec.d);
      for (std::size_t i = 0; i < spec.n; ++i) {
        m(i, 0) = g.data.y(i, 0);
        for (std::size_t j = 0; j < spec.d; ++j) m(i, 1 + j) = g.data.z(i, j);
      }
      std::vector<std::string> header{"y_0"};
      for (const auto& h : numbered("z_", spec.d)) header.push_back(h);
      write_csv(path, header, m);
      break;
    }
    case Scenario::DiscreteOracle: {
      const OracleDraw o = gen_discrete_oracle(spec.n, seed, two_cluster_oracle());
      Matrix m(spec.n, 3);
      for (std::size_t i = 0; i < spec.n; ++i) {
        m(i, 0) = o.data.x(i, 0);
        m(i, 1) = o.data.y(i, 0);
        m(i, 2) = o.data.z(i, 0);
      }
      write_csv(path, {"x_0", "y_0", "z_0"}, m);
      break;
    }
  }
}

void run_sim(Scenario scenario, const SimFlags& s, const CommonFlags& f) {
  const auto start = std::chrono::steady_clock::now();
  ScenarioSpec spec;
  spec.scenario = scenario;
  spec.n = s.n;
  spec.d = s.d;
  spec.rho = s.rho;
  if (s.hypothesis == "null") {
    spec.hypothesis = Hypothesis::Null;
  } else if (s.hypothesis == "alt") {
    spec.hypothesis = Hypothesis::Alt;
  } else {
    throw InputError("unknown --hypothesis '" + s.hypothesis + "' (null | alt)");
  }
  spec.n_train = s.n_train;
  spec.with_intercept = s.intercept;
  spec.test = options_from(f);
  spec.seed = f.seed;
  if (!s.dump.empty()) dump_dataset(spec, s.dump);

  const SimulationSummary summary = run_simulation(spec, s.reps);
  nlohmann::json j = summary;
  j["scenario"] = to_string(scenario);
  j["n"] = spec.n;
  j["rho"] = spec.rho;
  j["k"] = spec.test.k;
  j["mode"] = f.mode;
  j["kernel"] = spec.test.kernel.to_string();
  j["alpha"] = spec.test.alpha;
  j["seed"] = spec.seed;
  j["wall_ms"] = elapsed_ms(start);

  char buf[256];
  if (summary.mean_abs_error) {
    std::snprintf(buf, sizeof buf, "sim %s: reps=%zu population=%.6g mean |t_n - population|=%.4g",
                  to_string(scenario).c_str(), summary.reps, *summary.population, *summary.mean_abs_error);
  } else {
    std::snprintf(buf, sizeof buf, "sim %s: reps=%zu rejection rate=%.4f (%zu degenerate)",
                  to_string(scenario).c_str(), summary.reps, summary.rejection_rate, summary.degenerate);
  }
  emit_json(j, f.out, buf);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Expected conditional MMD: conditional two-sample, goodness-of-fit and calibration tests"};
  app.require_subcommand(1);

  std::string path;

  CommonFlags test_flags;
  ColumnFlags test_cols;
  auto* test = app.add_subcommand("test", "Asymptotic conditional two-sample test on x_*, y_*, z_* columns");
  add_common(test, test_flags, "gaussian:median");
  add_columns(test, test_cols, true);
  test->add_option("data", path, "CSV file")->required();

  CommonFlags gof_flags;
  ColumnFlags gof_cols;
  SamplerFlags sampler;
  auto* gof = app.add_subcommand("gof", "Conditional goodness-of-fit test of y_* | z_* against a sampler");
  add_common(gof, gof_flags, "gaussian:median");
  gof_flags.mode = "finite";
  add_columns(gof, gof_cols, false);
  gof->add_option("--sampler", sampler.kind, "gaussian | multinomial | columns (r<m>_<j> in the CSV)");
  gof->add_option("--mean-coef", sampler.mean_coef, "Gaussian sampler: comma-separated mean coefficients");
  gof->add_option("--mean-intercept", sampler.mean_intercept, "Gaussian sampler: mean intercept");
  gof->add_option("--variance", sampler.variance, "Gaussian sampler: variance")->capture_default_str();
  gof->add_option("data", path, "CSV file")->required();

  auto* calibrate = app.add_subcommand("calibrate", "Calibration audits");
  calibrate->require_subcommand(1);

  CommonFlags classify_flags;
  auto* classify = calibrate->add_subcommand("classify", "Classifier calibration (p_* columns, label)");
  add_common(classify, classify_flags, "linear");
  classify->add_option("data", path, "CSV file")->required();

  CommonFlags regress_flags;
  std::string conditioning = "mean";
  std::optional<double> variance;
  auto* regress = calibrate->add_subcommand("regress", "Gaussian regression calibration (y, mean[, var])");
  add_common(regress, regress_flags, "gaussian:median");
  regress->add_option("--conditioning", conditioning, "mean | mean-var")->capture_default_str();
  regress->add_option("--variance", variance, "Model variance when the file has no var column");
  regress->add_option("data", path, "CSV file")->required();

  std::size_t bins = 10;
  std::string reliability_out;
  auto* reliability = calibrate->add_subcommand("reliability", "Reliability bins and ECE (p_1, p_2, label)");
  reliability->add_option("--bins", bins, "Number of equal-width bins")->capture_default_str();
  reliability->add_option("--out", reliability_out, "Write JSON here (default: stdout)");
  reliability->add_option("data", path, "CSV file")->required();

  std::string isotonic_out;
  auto* isotonic = calibrate->add_subcommand("isotonic", "Isotonic recalibration (p_1, p_2, label)");
  isotonic->add_option("--out", isotonic_out, "Write JSON here (default: stdout)");
  isotonic->add_option("data", path, "CSV file")->required();

  auto* sim = app.add_subcommand("sim", "Monte Carlo reproduction of the simulation designs");
  sim->require_subcommand(1);
  struct SimCommand {
    Scenario scenario;
    const char* name;
    const char* help;
    const char* kernel;
    const char* mode;
    CommonFlags flags;
    SimFlags sim;
    CLI::App* app = nullptr;
  };
  std::vector<std::unique_ptr<SimCommand>> sims;
  sims.push_back(std::make_unique<SimCommand>(
      SimCommand{Scenario::ClassCalib, "class-calib", "Binary classifier calibration design", "linear", "asymptotic", {}, {}}));
  sims.push_back(std::make_unique<SimCommand>(
      SimCommand{Scenario::RegCalib, "reg-calib", "OLS regression calibration design", "gaussian:median", "asymptotic", {}, {}}));
  sims.push_back(std::make_unique<SimCommand>(
      SimCommand{Scenario::GofGaussian, "gof", "Gaussian conditional goodness-of-fit design", "gaussian:median", "finite", {}, {}}));
  sims.push_back(std::make_unique<SimCommand>(
      SimCommand{Scenario::DiscreteOracle, "oracle", "Estimator error against an exact population value", "gaussian:1", "asymptotic", {}, {}}));
  for (auto& s : sims) {
    s->app = sim->add_subcommand(s->name, s->help);
    add_common(s->app, s->flags, s->kernel);
    s->flags.mode = s->mode;
    add_sim(s->app, s->sim);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitInput;
  }

  try {
    if (*test) {
      run_test(path, test_flags, test_cols);
    } else if (*gof) {
      run_gof(path, gof_flags, gof_cols, sampler);
    } else if (*classify) {
      run_classify(path, classify_flags);
    } else if (*regress) {
      run_regress(path, regress_flags, conditioning, variance);
    } else if (*reliability) {
      run_reliability(path, bins, reliability_out);
    } else if (*isotonic) {
      run_isotonic(path, isotonic_out);
    } else {
      for (const auto& s : sims) {
        if (*s->app) run_sim(s->scenario, s->sim, s->flags);
      }
    }
  } catch (const DegenerateError& e) {
    std::cerr << "degenerate: " << e.what() << " (statistic=" << e.statistic() << ")\n";
    return kExitDegenerate;
  } catch (const InputError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return kExitInput;
  } catch (const SamplerError& e) {
    std::cerr << "sampler error: " << e.what() << '\n';
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
