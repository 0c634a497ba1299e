#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dgmrf/graph.hpp"
#include "dgmrf/model.hpp"

namespace dgmrf {

enum class LogdetBackend { eigen, power_series };

LogdetBackend logdet_backend_from_string(const std::string& s);
std::string to_string(LogdetBackend b);

/// Eigenvalues lambda' of D^{-1}A plus sum_i log d_i; fixed per graph.
struct EigPreprocess {
  std::uint64_t graph_hash = 0;
  std::vector<double> lambda_prime;  // ascending, in [-1,1]
  double sum_log_degrees = 0.0;

  std::size_t n() const { return lambda_prime.size(); }
};

/// Hutchinson estimates t_k of tr(Atilde^k), k = 1..K, with their
/// per-k standard errors; fixed per (graph, K, n_probes, seed).
struct TracePreprocess {
  std::uint64_t graph_hash = 0;
  std::size_t n = 0;
  std::vector<double> traces;
  std::vector<double> trace_std_errors;
  std::size_t n_probes = 0;
  std::uint64_t seed = 0;
  double sum_log_degrees = 0.0;

  std::size_t K() const { return traces.size(); }
};

EigPreprocess precompute_eigen(const SparseGraph& g, std::size_t dense_cap = 20000);

/// Probe vectors are Rademacher; each probe is pushed through Atilde k times
/// reusing the k-1 result, never materializing matrix powers.
TracePreprocess precompute_traces(const SparseGraph& g, std::size_t K, std::size_t n_probes,
                                  std::uint64_t seed);

/// sum_i gamma log d_i + log|alpha + beta lambda'_i|; exact.
double layer_logdet_eigen(const EigPreprocess& pre, double alpha, double beta, double gamma);

/// N log alpha + gamma sum_i log d_i - sum_k (1/k)(-beta/alpha)^k t_k.
double layer_logdet_power_series(const TracePreprocess& pre, double alpha, double beta,
                                 double gamma);

/// Upper bound on the truncation error of the power series at K terms:
/// N(-log(1-|beta/alpha|) - sum_{k<=K} |beta/alpha|^k / k).
double truncation_bound(double alpha, double beta, std::size_t n, std::size_t K);

/// One of the two pre-processes, whichever the chosen backend needs.
struct LogdetPreprocess {
  std::optional<EigPreprocess> eig;
  std::optional<TracePreprocess> traces;
};

/// Sum of per-layer log-determinants. Also serves the variational layers.
double total_logdet(const std::vector<LayerParams>& layers, LogdetBackend backend,
                    const LogdetPreprocess& pre);

// Pre-process cache files (hexfloat text with a versioned header).
void save_eig_preprocess(const EigPreprocess& pre, const std::string& path);
EigPreprocess load_eig_preprocess(const std::string& path);
void save_trace_preprocess(const TracePreprocess& pre, const std::string& path);
TracePreprocess load_trace_preprocess(const std::string& path);

/// Canonical cache file name under `dir` for this graph and method.
std::string eig_cache_path(const std::string& dir, const SparseGraph& g);
std::string trace_cache_path(const std::string& dir, const SparseGraph& g, std::size_t K,
                             std::size_t n_probes, std::uint64_t seed);

}  // namespace dgmrf
