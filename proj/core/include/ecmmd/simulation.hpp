#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ecmmd/calibration.hpp"
#include "ecmmd/datagen.hpp"

namespace ecmmd {

enum class Scenario { ClassCalib, RegCalib, GofGaussian, DiscreteOracle };

std::string to_string(Scenario s);

/// One Monte Carlo design. Replicate r uses derive_seed(seed, r) for both
/// data generation and the test's own draws.
struct ScenarioSpec {
  Scenario scenario = Scenario::ClassCalib;
  std::size_t n = 100;
  std::size_t d = 3;          // GofGaussian covariate dimension
  double rho = 0.5;
  Hypothesis hypothesis = Hypothesis::Null;
  std::size_t n_train = 200;  // RegCalib training size; n is the test size
  bool with_intercept = false;
  TestOptions test;           // mode, kernel, k, alpha (test.seed is ignored)
  std::uint64_t seed = 0;
};

struct SimulationSummary {
  std::size_t reps = 0;
  std::size_t rejections = 0;
  std::size_t degenerate = 0;  // replicates whose studentizer was 0 (not rejections)
  double rejection_rate = 0.0;
  std::vector<double> p_values;    // per replicate; NaN for degenerate ones
  std::vector<double> statistics;  // t_n / D_n / observed eta per replicate
  std::optional<double> population;      // DiscreteOracle only
  std::optional<double> mean_abs_error;  // DiscreteOracle only
};

/// Runs `reps` replicates in parallel; results are stored in replicate order
/// and do not depend on the thread count. For DiscreteOracle the replicate
/// computes t_n (no test) and the summary reports its error to the exact
/// population value.
SimulationSummary run_simulation(const ScenarioSpec& spec, std::size_t reps);

void to_json(nlohmann::json& j, const SimulationSummary& s);

}  // namespace ecmmd
