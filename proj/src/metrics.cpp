#include "dgmrf/metrics.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace dgmrf {

EvalMask eval_mask_unobserved(const ObservationMask& mask) {
  EvalMask eval(mask.size());
  for (std::size_t i = 0; i < mask.size(); ++i) eval[i] = mask.is_observed(i) ? 0 : 1;
  return eval;
}

EvalMask eval_mask_all(std::size_t n) { return EvalMask(n, 1); }

namespace {

std::size_t check_eval(const NodeVector& a, const NodeVector& b, const EvalMask& eval,
                       const char* op) {
  if (a.size() != b.size() || a.size() != eval.size())
    throw std::invalid_argument(std::string(op) + ": length mismatch");
  std::size_t count = 0;
  for (auto v : eval) count += v ? 1 : 0;
  if (count == 0) throw std::invalid_argument(std::string(op) + ": empty evaluation mask");
  return count;
}

}  // namespace

double rmse(const NodeVector& pred, const NodeVector& truth, const EvalMask& eval) {
  const std::size_t count = check_eval(pred, truth, eval, "rmse");
  double s = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    if (eval[i]) {
      const double d = pred[i] - truth[i];
      s += d * d;
    }
  }
  return std::sqrt(s / static_cast<double>(count));
}

double mae(const NodeVector& pred, const NodeVector& truth, const EvalMask& eval) {
  const std::size_t count = check_eval(pred, truth, eval, "mae");
  double s = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i)
    if (eval[i]) s += std::abs(pred[i] - truth[i]);
  return s / static_cast<double>(count);
}

double crps_gaussian(double mu, double sigma, double y) {
  if (!(sigma > 0.0)) throw std::invalid_argument("crps_gaussian: sigma must be > 0");
  const double z = (y - mu) / sigma;
  const double cdf = 0.5 * std::erfc(-z / std::sqrt(2.0));
  const double pdf = std::exp(-0.5 * z * z) / std::sqrt(2.0 * 3.14159265358979323846);
  return sigma * (z * (2.0 * cdf - 1.0) + 2.0 * pdf - 1.0 / std::sqrt(3.14159265358979323846));
}

double crps_gaussian_mean(const NodeVector& mu, const NodeVector& sigma, const NodeVector& y,
                          const EvalMask& eval) {
  const std::size_t count = check_eval(mu, y, eval, "crps_gaussian_mean");
  if (sigma.size() != mu.size())
    throw std::invalid_argument("crps_gaussian_mean: length mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < mu.size(); ++i)
    if (eval[i]) s += crps_gaussian(mu[i], sigma[i], y[i]);
  return s / static_cast<double>(count);
}

std::string to_json(const MetricReport& r) {
  nlohmann::json j;
  j["model"] = r.model;
  j["dataset"] = r.dataset;
  j["seed"] = r.seed;
  j["rmse"] = r.rmse;
  j["mae"] = r.mae;
  if (std::isfinite(r.crps))
    j["crps"] = r.crps;
  else
    j["crps"] = nullptr;
  j["n_eval"] = r.n_eval;
  return j.dump(2);
}

void save_metric_report(const MetricReport& r, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_metric_report: cannot open " + path);
  out << to_json(r) << '\n';
}

}  // namespace dgmrf
