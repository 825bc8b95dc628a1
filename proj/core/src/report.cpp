#include "ecmmd/report.hpp"

#include <cstdio>

namespace ecmmd {

KernelInfo KernelInfo::of(const Kernel& k) {
  KernelInfo info;
  info.kind = to_string(k.kind());
  if (k.kind() == KernelKind::Gaussian) info.bandwidth = k.bandwidth();
  return info;
}

void to_json(nlohmann::json& j, const KernelInfo& k) {
  j = nlohmann::json{{"kind", k.kind}, {"bandwidth", nullptr}};
  if (k.bandwidth) j["bandwidth"] = *k.bandwidth;
}

void from_json(const nlohmann::json& j, KernelInfo& k) {
  j.at("kind").get_to(k.kind);
  const auto& bw = j.at("bandwidth");
  k.bandwidth = bw.is_null() ? std::nullopt : std::optional<double>(bw.get<double>());
}

void to_json(nlohmann::json& j, const TestReport& r) {
  nlohmann::json stats = nlohmann::json::object();
  for (const auto& [name, value] : r.statistics) stats[name] = value;
  if (!r.eta_values.empty()) stats["eta_values"] = r.eta_values;

  j = nlohmann::json{
      {"method", r.method},
      {"n", r.n},
      {"d", r.d},
      {"k", r.k},
      {"kernel", r.kernel},
      {"statistics", stats},
      {"z", nullptr},
      {"p_value", r.p_value},
      {"alpha", r.alpha},
      {"reject", r.reject},
      {"M", nullptr},
      {"seed", r.seed},
      {"wall_ms", r.wall_ms},
  };
  if (r.z) j["z"] = *r.z;
  if (r.M) j["M"] = *r.M;
}

void from_json(const nlohmann::json& j, TestReport& r) {
  j.at("method").get_to(r.method);
  j.at("n").get_to(r.n);
  j.at("d").get_to(r.d);
  j.at("k").get_to(r.k);
  j.at("kernel").get_to(r.kernel);
  r.statistics.clear();
  r.eta_values.clear();
  for (const auto& [name, value] : j.at("statistics").items()) {
    if (name == "eta_values") {
      value.get_to(r.eta_values);
    } else {
      r.statistics[name] = value.get<double>();
    }
  }
  const auto& z = j.at("z");
  r.z = z.is_null() ? std::nullopt : std::optional<double>(z.get<double>());
  j.at("p_value").get_to(r.p_value);
  j.at("alpha").get_to(r.alpha);
  j.at("reject").get_to(r.reject);
  const auto& m = j.at("M");
  r.M = m.is_null() ? std::nullopt : std::optional<std::size_t>(m.get<std::size_t>());
  j.at("seed").get_to(r.seed);
  j.at("wall_ms").get_to(r.wall_ms);
}

std::string to_json_string(const TestReport& r) { return nlohmann::json(r).dump(2); }

TestReport make_report(const std::string& method, const EcmmdResult& r, std::size_t d,
                       const Kernel& kern, double alpha, std::uint64_t seed) {
  TestReport rep;
  rep.method = method;
  rep.n = r.n;
  rep.d = d;
  rep.k = r.k;
  rep.kernel = KernelInfo::of(kern);
  rep.statistics = {{"t_n", r.t_n}, {"eta_n", r.eta_n}, {"sigma_hat", r.sigma_hat}};
  rep.z = r.z_score;
  rep.p_value = r.p_value;
  rep.alpha = alpha;
  rep.reject = r.reject;
  rep.seed = seed;
  return rep;
}

TestReport make_report(const std::string& method, const FiniteSampleResult& r, std::size_t d,
                       const Kernel& kern, double alpha) {
  TestReport rep;
  rep.method = method;
  rep.n = r.n;
  rep.d = d;
  rep.k = r.k;
  rep.kernel = KernelInfo::of(kern);
  rep.statistics = {{"p_m", r.p_m}, {"eta_observed", r.eta_values.back()}};
  rep.eta_values = r.eta_values;
  rep.p_value = r.p_m;
  rep.alpha = alpha;
  rep.reject = r.p_m <= alpha;
  rep.M = r.m;
  rep.seed = r.seed;
  return rep;
}

TestReport make_report(const std::string& method, const DerandomizedResult& r, std::size_t d,
                       const Kernel& kern, double alpha) {
  TestReport rep;
  rep.method = method;
  rep.n = r.n;
  rep.d = d;
  rep.k = r.k;
  rep.kernel = KernelInfo::of(kern);
  rep.statistics = {{"d_n", r.d_n}, {"tau_hat", r.tau_hat}};
  rep.z = r.z_score;
  rep.p_value = r.p_value;
  rep.alpha = alpha;
  rep.reject = r.reject;
  rep.M = r.m_n;
  rep.seed = r.seed;
  return rep;
}

std::string summary_line(const TestReport& r) {
  char buf[256];
  if (r.z) {
    std::snprintf(buf, sizeof buf, "%s: n=%zu k=%zu z=%.4f p=%.4g (%s at alpha=%g)", r.method.c_str(),
                  r.n, r.k, *r.z, r.p_value, r.reject ? "reject" : "retain", r.alpha);
  } else {
    std::snprintf(buf, sizeof buf, "%s: n=%zu k=%zu p=%.4g (%s at alpha=%g)", r.method.c_str(), r.n,
                  r.k, r.p_value, r.reject ? "reject" : "retain", r.alpha);
  }
  return buf;
}

}  // namespace ecmmd
