#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dgmrf/graph.hpp"
#include "dgmrf/types.hpp"

namespace dgmrf {

/// Nodes with a nonzero flag are evaluated.
using EvalMask = std::vector<std::uint8_t>;

/// The usual protocol: evaluate on the unobserved nodes.
EvalMask eval_mask_unobserved(const ObservationMask& mask);
EvalMask eval_mask_all(std::size_t n);

double rmse(const NodeVector& pred, const NodeVector& truth, const EvalMask& eval);
double mae(const NodeVector& pred, const NodeVector& truth, const EvalMask& eval);

/// Closed-form Gaussian CRPS, positive orientation (lower is better):
/// sigma * [ z(2 Phi(z) - 1) + 2 phi(z) - 1/sqrt(pi) ], z = (y - mu)/sigma.
double crps_gaussian(double mu, double sigma, double y);

/// Mean CRPS over the evaluated nodes.
double crps_gaussian_mean(const NodeVector& mu, const NodeVector& sigma, const NodeVector& y,
                          const EvalMask& eval);

struct MetricReport {
  std::string model;
  std::string dataset;
  std::uint64_t seed = 0;
  double rmse = 0.0;
  double mae = 0.0;
  double crps = 0.0;  // NaN when the model has no predictive distribution
  std::size_t n_eval = 0;
};

std::string to_json(const MetricReport& r);
void save_metric_report(const MetricReport& r, const std::string& path);

}  // namespace dgmrf
