#pragma once

#include "hodgeflow/graph.hpp"
#include "hodgeflow/hodge.hpp"
#include "hodgeflow/types.hpp"

#include <cstdint>
#include <string_view>
#include <vector>

namespace hodgeflow {

enum class SynthKind { er_od, grid };
enum class Phase { morning, evening };

std::string_view to_string(Phase p);

struct SynthSpec {
  SynthKind kind = SynthKind::grid;
  Index n = 300;  // er_od node count
  Index rows = 20;
  Index cols = 20;
  double edge_prob = 0.5;
  double hub_fraction = 0.05;
  double hub_weight_multiplier = 1.5;
  // Edge probability for pairs touching a hub; negative means
  // edge_prob + 0.4·(1 − edge_prob).
  double hub_edge_prob = -1.0;
  double base_volume = 10.0;   // Poisson mean per direction
  double grid_spacing = 100.0; // meters between lattice neighbors
  std::uint64_t seed = 0;
};

struct OdSample {
  FlowGraph graph;
  Vector fwd;  // volume tail → head
  Vector rev;  // volume head → tail
  std::vector<Index> hubs;
};

// Dense origin–destination analog: Erdős–Rényi base, a hub set with raised
// connectivity, Poisson volumes per direction. Hubs draw extra inbound volume
// in the morning and extra outbound volume in the evening. The graph and hub
// set depend only on the seed.
OdSample er_od_graph(const SynthSpec& spec, Phase phase = Phase::morning);

// 4-neighbor lattice with coordinates at lattice positions × grid_spacing.
FlowGraph grid_network(const SynthSpec& spec);

struct FlowStrengths {
  double gradient = 1.0;  // RMS edge value of each part
  double curl = 0.0;
  double harmonic = 0.0;
  double noise = 0.0;     // per-edge Gaussian sigma
  Index smooth_modes = 6; // low Laplacian eigenvectors mixed into the potential
};

struct PlantedFlow {
  NodeField potential_true;
  EdgeFlow gradient;
  EdgeFlow curl;
  EdgeFlow harmonic;
  EdgeFlow noise;
  EdgeFlow flow;
};

// Smooth potential from the seed alone; evening negates it. Curl, harmonic and
// noise parts are drawn from a stream keyed by (seed, phase).
PlantedFlow planted_flow(const FlowGraph& g, const FlowStrengths& strengths, Phase phase, std::uint64_t seed);

struct DirectedVolumes {
  Vector fwd;
  Vector rev;
};

// Every edge carries v_e = δ/2 + Poisson(base) each way; edges between
// different labels shift δ/2 from the higher-labelled endpoint's direction to
// the lower-labelled one's, so the mean flow stays label-agnostic.
DirectedVolumes planted_community_flows(const FlowGraph& g, const std::vector<Index>& labels, double skew_delta,
                                        std::uint64_t seed, double base_volume = 10.0);

// Splits a net flow into nonnegative directed volumes with fwd − rev = f.
DirectedVolumes volumes_from_net_flow(const EdgeFlow& f, double base_volume, std::uint64_t seed);

// Two interleaved communities on a rows × cols lattice.
std::vector<Index> checkerboard_labels(Index rows, Index cols);

}  // namespace hodgeflow
