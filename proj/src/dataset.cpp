#include "dgmrf/dataset.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include "dgmrf/dense.hpp"
#include "dgmrf/metrics.hpp"
#include "dgmrf/text_io.hpp"

namespace dgmrf {

NodeVector sample_dgmrf_prior(const SparseGraph& g, const DgmrfParams& params, Rng& rng,
                              const CgConfig& cg, CgReport* report) {
  const std::size_t n = g.n_nodes();
  NodeVector z = rng.normal_vector(n);
  const NodeVector b_acc = bias_accumulation(g, params);
  for (std::size_t i = 0; i < n; ++i) z[i] -= b_acc[i];
  const NodeVector rhs = g_transpose_apply(g, params, z);
  auto [x, rep] = conjugate_gradient(precision_operator(g, params), rhs, cg);
  if (report) *report = rep;
  return x;
}

DgmrfParams synth_true_params(std::size_t l_true) {
  DgmrfParams params;
  params.layers.assign(l_true, layer_params_for(1.2, -1.0, 1.0, 0.0));
  params.theta_sigma = std::log(0.01);
  return params;
}

namespace {

// Densify Q column by column through the matrix-free precision, then attach
// the exact posterior under noise sigma.
TruePosterior exact_posterior(const SparseGraph& model_graph, const DgmrfParams& params,
                              const NodeVector& y, const ObservationMask& mask) {
  const std::size_t n = model_graph.n_nodes();
  DenseMatrix qt(n, n);
  NodeVector unit(n, 0.0), col(n);
  for (std::size_t j = 0; j < n; ++j) {
    unit[j] = 1.0;
    col = precision_apply(model_graph, params, unit);
    for (std::size_t i = 0; i < n; ++i) qt(i, j) = col[i];
    unit[j] = 0.0;
  }
  const double sigma = params.sigma();
  const double inv_s2 = 1.0 / (sigma * sigma);
  for (std::size_t i = 0; i < n; ++i)
    if (mask.is_observed(i)) qt(i, i) += inv_s2;

  if (!cholesky_in_place(qt))
    throw std::runtime_error("exact_posterior: posterior precision not positive definite");
  NodeVector rhs(n, 0.0);  // prior mean is zero for all synthetic recipes
  for (std::size_t i = 0; i < n; ++i)
    if (mask.is_observed(i)) rhs[i] = inv_s2 * y[i];

  TruePosterior post;
  post.mean = cholesky_solve(qt, rhs);
  post.std = cholesky_inverse_diagonal(qt);
  for (double& v : post.std) v = std::sqrt(v);
  return post;
}

NodeVector add_noise(const NodeVector& x, double sigma, Rng rng) {
  NodeVector y = x;
  for (auto& v : y) v += sigma * rng.normal();
  return y;
}

}  // namespace

Dataset make_synth_dgmrf(std::size_t n, std::size_t l_true, std::uint64_t seed,
                         const SynthConfig& config) {
  if (l_true < 1 || l_true > 4)
    throw std::invalid_argument("make_synth_dgmrf: l_true must be in 1..4");
  const double noise_sigma = 0.01;
  const double frac = 0.25;

  auto [graph, points] = generate_delaunay_graph(n, seed);
  const DgmrfParams true_params = synth_true_params(l_true);
  Rng prior_rng = Rng(seed).substream("prior_sample");
  const NodeVector x = sample_dgmrf_prior(graph, true_params, prior_rng);
  const NodeVector y = add_noise(x, noise_sigma, Rng(seed).substream("obs_noise"));
  ObservationMask mask = generate_mask(n, frac, seed);

  Dataset ds;
  ds.recipe = "dgmrf";
  ds.seed = seed;
  ds.l_true = l_true;
  ds.noise_sigma = noise_sigma;
  ds.fraction_unobserved = frac;
  ds.y = y;
  ds.mask = std::move(mask);
  ds.x_true = x;
  ds.points = std::move(points);
  if (n <= config.true_posterior_cap)
    ds.true_posterior = exact_posterior(graph, true_params, y, ds.mask);
  ds.graph = std::move(graph);
  return ds;
}

Dataset make_dense(std::size_t n, std::uint64_t seed, const SynthConfig& config) {
  const double noise_sigma = 0.01;
  const double frac = 0.25;

  auto [graph, points] = generate_delaunay_graph(n, seed);
  const SparseGraph hop3 = k_hop_graph(graph, 3);
  const DgmrfParams true_params = synth_true_params(1);
  Rng prior_rng = Rng(seed).substream("prior_sample");
  const NodeVector x = sample_dgmrf_prior(hop3, true_params, prior_rng);
  const NodeVector y = add_noise(x, noise_sigma, Rng(seed).substream("obs_noise"));
  ObservationMask mask = generate_mask(n, frac, seed);

  Dataset ds;
  ds.recipe = "dense";
  ds.seed = seed;
  ds.l_true = 1;
  ds.noise_sigma = noise_sigma;
  ds.fraction_unobserved = frac;
  ds.y = y;
  ds.mask = std::move(mask);
  ds.x_true = x;
  ds.points = std::move(points);
  if (n <= config.true_posterior_cap)
    ds.true_posterior = exact_posterior(hop3, true_params, y, ds.mask);
  ds.graph = std::move(graph);
  return ds;
}

Dataset make_mix(std::size_t n, std::uint64_t seed, const SynthConfig& config) {
  const double noise_sigma = 0.01;
  const double frac = 0.5;

  auto [graph, points] = generate_delaunay_graph(n, seed);
  std::vector<SparseGraph> hops;
  hops.reserve(4);
  for (std::size_t i = 1; i <= 4; ++i) hops.push_back(k_hop_graph(graph, i));

  Rng param_rng = Rng(seed).substream("mix_params");
  std::vector<LayerParams> components(4);
  for (auto& p : components) {
    // Resample until |beta| < alpha so every component stays nonsingular.
    for (;;) {
      const double alpha = 0.5 + param_rng.uniform();
      const double beta = -1.1 + param_rng.uniform();
      if (std::abs(beta) < alpha) {
        p = layer_params_for(alpha, beta, 1.0, 0.0);
        break;
      }
    }
  }

  // Dense Q = sum_i G_i^T G_i, built column-wise from the sparse layers.
  DenseMatrix q(n, n);
  NodeVector unit(n, 0.0), gcol(n), col(n);
  for (std::size_t j = 0; j < n; ++j) {
    unit[j] = 1.0;
    for (std::size_t c = 0; c < 4; ++c) {
      layer_apply(hops[c], components[c], unit.data(), gcol.data(), false, false);
      layer_apply(hops[c], components[c], gcol.data(), col.data(), true, false);
      for (std::size_t i = 0; i < n; ++i) q(i, j) += col[i];
    }
    unit[j] = 0.0;
  }

  DenseMatrix chol = q;
  if (!cholesky_in_place(chol))
    throw std::runtime_error("make_mix: mixed precision not positive definite");

  // x ~ N(0, Q^{-1}) via x = L^{-T} z.
  NodeVector x = Rng(seed).substream("prior_sample").normal_vector(n);
  backward_substitute(chol, x);
  const NodeVector y = add_noise(x, noise_sigma, Rng(seed).substream("obs_noise"));
  ObservationMask mask = generate_mask(n, frac, seed);

  const double inv_s2 = 1.0 / (noise_sigma * noise_sigma);
  Dataset ds;
  ds.recipe = "mix";
  ds.seed = seed;
  ds.l_true = 0;
  ds.noise_sigma = noise_sigma;
  ds.fraction_unobserved = frac;
  ds.y = y;
  ds.mask = std::move(mask);
  ds.x_true = x;
  ds.points = std::move(points);
  if (n <= config.true_posterior_cap) {
    DenseMatrix qt = q;
    for (std::size_t i = 0; i < n; ++i)
      if (ds.mask.is_observed(i)) qt(i, i) += inv_s2;
    if (!cholesky_in_place(qt))
      throw std::runtime_error("make_mix: posterior precision not positive definite");
    NodeVector rhs(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
      if (ds.mask.is_observed(i)) rhs[i] = inv_s2 * y[i];
    TruePosterior post;
    post.mean = cholesky_solve(qt, rhs);
    post.std = cholesky_inverse_diagonal(qt);
    for (double& v : post.std) v = std::sqrt(v);
    ds.true_posterior = std::move(post);
  }
  ds.graph = std::move(graph);
  return ds;
}

Dataset make_dataset(const std::string& recipe, std::size_t n, std::size_t l_true,
                     std::uint64_t seed, const SynthConfig& config) {
  if (recipe == "dgmrf") return make_synth_dgmrf(n, l_true, seed, config);
  if (recipe == "dense") return make_dense(n, seed, config);
  if (recipe == "mix") return make_mix(n, seed, config);
  throw std::invalid_argument("make_dataset: unknown recipe '" + recipe + "'");
}

void save_dataset(const Dataset& ds, const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  save_edge_list(ds.graph, dir + "/graph.edges");
  save_node_vector(ds.y, dir + "/y.txt");
  save_mask(ds.mask, dir + "/mask.txt");
  if (ds.x_true) save_node_vector(*ds.x_true, dir + "/x_true.txt");
  if (ds.true_posterior) {
    save_node_vector(ds.true_posterior->mean, dir + "/post_mean.txt");
    save_node_vector(ds.true_posterior->std, dir + "/post_std.txt");
  }
  if (ds.points) save_points_csv(*ds.points, dir + "/points.csv");

  std::ofstream meta(dir + "/meta.txt");
  if (!meta) throw std::runtime_error("save_dataset: cannot open meta file");
  meta << "recipe = " << ds.recipe << '\n';
  meta << "n = " << ds.graph.n_nodes() << '\n';
  meta << "seed = " << ds.seed << '\n';
  meta << "l_true = " << ds.l_true << '\n';
  meta << "noise_sigma = " << format_double(ds.noise_sigma) << '\n';
  meta << "fraction_unobserved = " << format_double(ds.fraction_unobserved) << '\n';
  meta << "graph_hash = " << ds.graph.content_hash() << '\n';
  if (ds.true_posterior) {
    const double floor =
        rmse(ds.true_posterior->mean, ds.y, eval_mask_unobserved(ds.mask));
    meta << "true_posterior_rmse = " << format_double(floor) << '\n';
  }
}

Dataset load_dataset(const std::string& dir) {
  namespace fs = std::filesystem;
  std::ifstream meta(dir + "/meta.txt");
  if (!meta) throw std::runtime_error("load_dataset: cannot open " + dir + "/meta.txt");
  Dataset ds;
  std::size_t n = 0;
  std::string key, eq, value;
  while (meta >> key >> eq >> value) {
    if (key == "recipe") ds.recipe = value;
    else if (key == "n") n = std::stoull(value);
    else if (key == "seed") ds.seed = std::stoull(value);
    else if (key == "l_true") ds.l_true = std::stoull(value);
    else if (key == "noise_sigma") ds.noise_sigma = parse_double(value);
    else if (key == "fraction_unobserved") ds.fraction_unobserved = parse_double(value);
  }
  ds.graph = load_edge_list(dir + "/graph.edges", n);
  ds.y = load_node_vector(dir + "/y.txt");
  ds.mask = load_mask(dir + "/mask.txt");
  if (ds.y.size() != n || ds.mask.size() != n)
    throw std::runtime_error("load_dataset: inconsistent sizes in " + dir);
  if (fs::exists(dir + "/x_true.txt")) ds.x_true = load_node_vector(dir + "/x_true.txt");
  if (fs::exists(dir + "/post_mean.txt")) {
    TruePosterior post;
    post.mean = load_node_vector(dir + "/post_mean.txt");
    post.std = load_node_vector(dir + "/post_std.txt");
    ds.true_posterior = std::move(post);
  }
  if (fs::exists(dir + "/points.csv")) ds.points = load_points_csv(dir + "/points.csv");
  return ds;
}

}  // namespace dgmrf
