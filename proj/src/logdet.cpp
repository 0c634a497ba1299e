#include "dgmrf/logdet.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "dgmrf/eigensolver.hpp"
#include "dgmrf/rng.hpp"
#include "dgmrf/text_io.hpp"

namespace dgmrf {

LogdetBackend logdet_backend_from_string(const std::string& s) {
  if (s == "eigen") return LogdetBackend::eigen;
  if (s == "power" || s == "power_series") return LogdetBackend::power_series;
  throw std::invalid_argument("unknown logdet backend '" + s + "'");
}

std::string to_string(LogdetBackend b) {
  return b == LogdetBackend::eigen ? "eigen" : "power_series";
}

EigPreprocess precompute_eigen(const SparseGraph& g, std::size_t dense_cap) {
  EigPreprocess pre;
  pre.graph_hash = g.content_hash();
  pre.lambda_prime = symmetric_eigenvalues(g, dense_cap);
  pre.sum_log_degrees = g.sum_log_degrees();
  return pre;
}

TracePreprocess precompute_traces(const SparseGraph& g, std::size_t K, std::size_t n_probes,
                                  std::uint64_t seed) {
  if (K < 1 || n_probes < 1)
    throw std::invalid_argument("precompute_traces: K and n_probes must be >= 1");
  const std::size_t n = g.n_nodes();

  TracePreprocess pre;
  pre.graph_hash = g.content_hash();
  pre.n = n;
  pre.n_probes = n_probes;
  pre.seed = seed;
  pre.sum_log_degrees = g.sum_log_degrees();
  pre.traces.assign(K, 0.0);
  pre.trace_std_errors.assign(K, 0.0);

  // Welford accumulation of u^T Atilde^k u over probes, per k.
  std::vector<double> mean(K, 0.0), m2(K, 0.0);
  NodeVector v(n), next(n);
  const Rng base = Rng(seed);
  for (std::size_t p = 0; p < n_probes; ++p) {
    Rng rng = base.substream("trace_probe", p);
    const NodeVector u = rng.rademacher_vector(n);
    v = u;
    for (std::size_t k = 0; k < K; ++k) {
      g.normalized_adjacency_apply(v.data(), next.data());
      v.swap(next);
      const double quad = dot(u, v);
      const double delta = quad - mean[k];
      mean[k] += delta / static_cast<double>(p + 1);
      m2[k] += delta * (quad - mean[k]);
    }
  }
  for (std::size_t k = 0; k < K; ++k) {
    pre.traces[k] = mean[k];
    pre.trace_std_errors[k] =
        n_probes > 1 ? std::sqrt(m2[k] / (static_cast<double>(n_probes - 1) *
                                          static_cast<double>(n_probes)))
                     : 0.0;
  }
  return pre;
}

double layer_logdet_eigen(const EigPreprocess& pre, double alpha, double beta, double gamma) {
  double s = gamma * pre.sum_log_degrees;
  for (double lp : pre.lambda_prime) {
    const double lambda = alpha + beta * lp;
    if (std::abs(lambda) < 1e-300)
      throw std::runtime_error("layer_logdet_eigen: singular layer (|beta| >= alpha?)");
    s += std::log(std::abs(lambda));
  }
  return s;
}

double layer_logdet_power_series(const TracePreprocess& pre, double alpha, double beta,
                                 double gamma) {
  const double r = beta / alpha;
  double s = static_cast<double>(pre.n) * std::log(alpha) + gamma * pre.sum_log_degrees;
  double neg_r_pow = 1.0;  // (-r)^k, built incrementally
  for (std::size_t k = 1; k <= pre.K(); ++k) {
    neg_r_pow *= -r;
    s -= neg_r_pow / static_cast<double>(k) * pre.traces[k - 1];
  }
  return s;
}

double truncation_bound(double alpha, double beta, std::size_t n, std::size_t K) {
  const double r = std::abs(beta / alpha);
  if (!(r < 1.0)) throw std::invalid_argument("truncation_bound: need |beta| < alpha");
  double tail = -std::log1p(-r);
  double rp = 1.0;
  for (std::size_t k = 1; k <= K; ++k) {
    rp *= r;
    tail -= rp / static_cast<double>(k);
  }
  // Truncated sums of a convergent positive series can go epsilon-negative.
  return static_cast<double>(n) * std::max(tail, 0.0);
}

double total_logdet(const std::vector<LayerParams>& layers, LogdetBackend backend,
                    const LogdetPreprocess& pre) {
  double s = 0.0;
  if (backend == LogdetBackend::eigen) {
    if (!pre.eig) throw std::invalid_argument("total_logdet: eigen pre-process missing");
    for (const auto& l : layers) {
      const auto [a, b, g] = reparametrize(l);
      s += layer_logdet_eigen(*pre.eig, a, b, g);
    }
  } else {
    if (!pre.traces)
      throw std::invalid_argument("total_logdet: trace pre-process missing");
    for (const auto& l : layers) {
      const auto [a, b, g] = reparametrize(l);
      s += layer_logdet_power_series(*pre.traces, a, b, g);
    }
  }
  return s;
}

namespace {

void write_kv(std::ostream& out, const std::string& key, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%a", v);
  out << key << ' ' << buf << '\n';
}

std::ifstream open_checked(const std::string& path, const std::string& magic) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open pre-process file " + path);
  std::string line;
  std::getline(in, line);
  if (line != magic)
    throw std::runtime_error(path + ": unexpected header '" + line + "'");
  return in;
}

}  // namespace

void save_eig_preprocess(const EigPreprocess& pre, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << "dgmrf-preprocess v1 eigen\n";
  out << "graph_hash " << pre.graph_hash << '\n';
  out << "n " << pre.n() << '\n';
  write_kv(out, "sum_log_degrees", pre.sum_log_degrees);
  char buf[64];
  for (double v : pre.lambda_prime) {
    std::snprintf(buf, sizeof buf, "%a", v);
    out << buf << '\n';
  }
}

EigPreprocess load_eig_preprocess(const std::string& path) {
  auto in = open_checked(path, "dgmrf-preprocess v1 eigen");
  EigPreprocess pre;
  std::string key;
  std::size_t n = 0;
  in >> key >> pre.graph_hash;
  in >> key >> n;
  in >> key;
  if (!read_double(in, pre.sum_log_degrees))
    throw std::runtime_error(path + ": truncated header");
  pre.lambda_prime.resize(n);
  for (auto& v : pre.lambda_prime)
    if (!read_double(in, v)) throw std::runtime_error(path + ": truncated eigenvalue table");
  return pre;
}

void save_trace_preprocess(const TracePreprocess& pre, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << "dgmrf-preprocess v1 traces\n";
  out << "graph_hash " << pre.graph_hash << '\n';
  out << "n " << pre.n << '\n';
  out << "K " << pre.K() << '\n';
  out << "n_probes " << pre.n_probes << '\n';
  out << "seed " << pre.seed << '\n';
  write_kv(out, "sum_log_degrees", pre.sum_log_degrees);
  char buf[128];
  for (std::size_t k = 0; k < pre.K(); ++k) {
    std::snprintf(buf, sizeof buf, "%a %a", pre.traces[k], pre.trace_std_errors[k]);
    out << buf << '\n';
  }
}

TracePreprocess load_trace_preprocess(const std::string& path) {
  auto in = open_checked(path, "dgmrf-preprocess v1 traces");
  TracePreprocess pre;
  std::string key;
  std::size_t K = 0;
  in >> key >> pre.graph_hash;
  in >> key >> pre.n;
  in >> key >> K;
  in >> key >> pre.n_probes;
  in >> key >> pre.seed;
  in >> key;
  if (!read_double(in, pre.sum_log_degrees))
    throw std::runtime_error(path + ": truncated header");
  pre.traces.resize(K);
  pre.trace_std_errors.resize(K);
  for (std::size_t k = 0; k < K; ++k)
    if (!read_double(in, pre.traces[k]) || !read_double(in, pre.trace_std_errors[k]))
      throw std::runtime_error(path + ": truncated trace table");
  return pre;
}

std::string eig_cache_path(const std::string& dir, const SparseGraph& g) {
  std::ostringstream os;
  os << dir << "/eig_" << std::hex << g.content_hash() << ".txt";
  return os.str();
}

std::string trace_cache_path(const std::string& dir, const SparseGraph& g, std::size_t K,
                             std::size_t n_probes, std::uint64_t seed) {
  std::ostringstream os;
  os << dir << "/trace_" << std::hex << g.content_hash() << std::dec << "_K" << K << "_p"
     << n_probes << "_s" << seed << ".txt";
  return os.str();
}

}  // namespace dgmrf
