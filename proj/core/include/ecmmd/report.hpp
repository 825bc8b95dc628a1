#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ecmmd/estimator.hpp"
#include "ecmmd/kernels.hpp"
#include "ecmmd/resampling.hpp"

namespace ecmmd {

struct KernelInfo {
  std::string kind;
  std::optional<double> bandwidth;

  static KernelInfo of(const Kernel& k);
  bool operator==(const KernelInfo&) const = default;
};

/// Serializable outcome of any test run.
///
/// JSON keys: method, n, d, k, kernel{kind, bandwidth}, statistics{...}, z,
/// p_value, alpha, reject, M, seed, wall_ms. Absent optionals are null.
/// statistics holds the method's named scalars (t_n, eta_n, sigma_hat; d_n,
/// tau_hat; p_m) plus eta_values for the finite-sample test.
struct TestReport {
  std::string method;
  std::size_t n = 0;
  std::size_t d = 0;
  std::size_t k = 0;
  KernelInfo kernel;
  std::map<std::string, double> statistics;
  std::vector<double> eta_values;
  std::optional<double> z;
  double p_value = 1.0;
  double alpha = 0.05;
  bool reject = false;
  std::optional<std::size_t> M;
  std::uint64_t seed = 0;
  double wall_ms = 0.0;

  bool operator==(const TestReport&) const = default;
};

void to_json(nlohmann::json& j, const KernelInfo& k);
void from_json(const nlohmann::json& j, KernelInfo& k);
void to_json(nlohmann::json& j, const TestReport& r);
void from_json(const nlohmann::json& j, TestReport& r);

/// Serialized report; two-space indent, keys sorted.
std::string to_json_string(const TestReport& r);

TestReport make_report(const std::string& method, const EcmmdResult& r, std::size_t d,
                       const Kernel& kern, double alpha, std::uint64_t seed);
TestReport make_report(const std::string& method, const FiniteSampleResult& r, std::size_t d,
                       const Kernel& kern, double alpha);
TestReport make_report(const std::string& method, const DerandomizedResult& r, std::size_t d,
                       const Kernel& kern, double alpha);

/// One-line human summary, e.g. "ecmmd-asymptotic: n=100 k=10 z=1.23 p=0.219 (retain at alpha=0.05)".
std::string summary_line(const TestReport& r);

}  // namespace ecmmd
