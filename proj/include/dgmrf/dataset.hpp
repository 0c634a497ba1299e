#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dgmrf/delaunay.hpp"
#include "dgmrf/graph.hpp"
#include "dgmrf/model.hpp"
#include "dgmrf/rng.hpp"

namespace dgmrf {

struct TruePosterior {
  NodeVector mean;
  NodeVector std;
};

/// A node-regression problem: graph, targets, observation mask, and (for
/// synthetic data) the latent truth and exact posterior.
struct Dataset {
  SparseGraph graph;
  NodeVector y;
  ObservationMask mask;
  std::optional<NodeVector> x_true;
  std::optional<TruePosterior> true_posterior;
  std::optional<std::vector<Point2>> points;

  // Provenance.
  std::string recipe = "file";
  std::uint64_t seed = 0;
  std::size_t l_true = 0;
  double noise_sigma = 0.0;
  double fraction_unobserved = 0.0;
};

/// Draw x from the DGMRF prior: z ~ N(0,I), then solve g(x) = z through the
/// normal equations G^T G x = G^T (z - b_acc) with CG.
NodeVector sample_dgmrf_prior(const SparseGraph& g, const DgmrfParams& params, Rng& rng,
                              const CgConfig& cg = {}, CgReport* report = nullptr);

struct SynthConfig {
  /// Exact posteriors are stored only up to this many nodes.
  std::size_t true_posterior_cap = 5000;
};

/// Delaunay graph, L_true layers with alpha=1.2, beta=-1, gamma=1, b=0,
/// observation noise sigma=0.01, 25% unobserved.
Dataset make_synth_dgmrf(std::size_t n, std::size_t l_true, std::uint64_t seed,
                         const SynthConfig& config = {});

/// Single layer with the same fixed parameters, but on the 3-hop graph of a
/// Delaunay graph; the dataset keeps the base graph. 25% unobserved.
Dataset make_dense(std::size_t n, std::uint64_t seed, const SynthConfig& config = {});

/// GMRF with Q = sum_{i=1..4} G_i^T G_i, each G_i a layer on the i-hop graph
/// with alpha ~ U[0.5,1.5], beta ~ U[-1.1,-0.1], gamma = 1 (component
/// resampled while |beta| >= alpha). Sampled by dense Cholesky. 50% unobserved.
Dataset make_mix(std::size_t n, std::uint64_t seed, const SynthConfig& config = {});

Dataset make_dataset(const std::string& recipe, std::size_t n, std::size_t l_true,
                     std::uint64_t seed, const SynthConfig& config = {});

void save_dataset(const Dataset& ds, const std::string& dir);
Dataset load_dataset(const std::string& dir);

/// The fixed synthetic generator parameters (gamma saturated at theta3=30).
DgmrfParams synth_true_params(std::size_t l_true);

}  // namespace dgmrf
