#pragma once

#include "hodgeflow/io.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace hodgeflow::cli {

enum ExitCode : int { kOk = 0, kComputeFailure = 1, kUsageError = 2 };

struct RunConfig {
  std::string command;
  std::string input;
  std::string detectors;  // when set, `input` is a segments file
  bool latlon = false;    // detector x, y are lon, lat degrees
  std::string labels;     // optional ground truth for cluster: node_id,label
  std::string output = ".";
  Schema schema = Schema::od;
  IdPolicy ids = IdPolicy::lexicographic;
  ExportFormat format = ExportFormat::json;
  SolverMethod solver = SolverMethod::conjugate_gradient;
  double tol = 1e-10;
  Index k = 2;
  std::optional<Index> struct_dims;
  std::vector<std::string> features = {"struct_only", "struct_mean", "struct_mean_skew"};
  CutVariant variant = CutVariant::ratio_cut;
  std::uint64_t seed = 0;
  double radius = 30.0;
  double alpha = 1.0;
  std::optional<double> sigma;
  std::optional<double> sigma_d;
  std::string slices;  // "FROM..TO", inclusive, HH:MM
  int jobs = 1;

  // synth
  std::string kind = "grid";
  Index rows = 20;
  Index cols = 20;
  Index n = 300;
  double edge_prob = 0.5;
  double hub_fraction = 0.05;
  double noise = 0.5;
  double delta = 10.0;

  Json to_json() const;
};

// Parses argv and dispatches. Returns the process exit code.
int run(int argc, const char* const* argv);

int cmd_decompose(const RunConfig& cfg);
int cmd_metrics(const RunConfig& cfg);
int cmd_cluster(const RunConfig& cfg);
int cmd_synth(const RunConfig& cfg);

// "FROM..TO" in minutes; throws InvalidInput on anything else.
std::pair<int, int> parse_slice_range(const std::string& spec);

// File-name-safe label for a slice timestamp ("08:30" → "0830", "" → "all").
std::string slice_label(const std::string& timestamp);

}  // namespace hodgeflow::cli
