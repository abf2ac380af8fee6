#pragma once

#include "hodgeflow/graph.hpp"
#include "hodgeflow/hodge.hpp"
#include "hodgeflow/metrics.hpp"
#include "hodgeflow/spectral.hpp"
#include "hodgeflow/types.hpp"

#include <json.hpp>

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace hodgeflow {

using Json = nlohmann::ordered_json;

// Input row or file problem. Carries the 1-based line number when known.
class ParseError : public InvalidInput {
public:
  ParseError(const std::string& source, std::size_t line, const std::string& what)
      : InvalidInput(source + (line ? ":" + std::to_string(line) : std::string()) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

private:
  std::size_t line_;
};

enum class Schema { od, bidirectional };
enum class IdPolicy { lexicographic, numeric };

struct FlowSlice {
  std::string timestamp;  // empty when the file has no timestamp column
  FlowGraph graph;
  Vector fwd;  // tail → head volume
  Vector rev;  // head → tail volume

  EdgeFlow net() const { return fwd - rev; }
};

// Per-slice graphs over one shared dense node index.
struct FlowDataset {
  std::vector<std::string> external_ids;  // dense id → external id
  std::vector<FlowSlice> slices;          // ordered by timestamp
};

// CSV schemas (header row required, comma separated, '#' lines skipped):
//  od:            src,dst,volume[,timestamp]
//  bidirectional: src,dst,fwd,rev[,timestamp]
FlowDataset load_edge_flows(const std::filesystem::path& path, Schema schema, IdPolicy ids = IdPolicy::lexicographic);
FlowDataset parse_edge_flows(std::istream& in, Schema schema, IdPolicy ids = IdPolicy::lexicographic,
                             const std::string& source = "<stream>");

// Minutes since midnight for "HH:MM"; nullopt for anything else.
std::optional<int> timestamp_minutes(const std::string& ts);

struct DetectorPoint {
  std::string external_id;
  double x = 0.0;
  double y = 0.0;
  std::string segment_id;
};

struct MergeResult {
  std::map<std::string, Index> node_of;  // detector id → merged node
  std::vector<Point2> centroids;
  double radius = 0.0;

  friend bool operator==(const MergeResult&, const MergeResult&) = default;
};

// Single-linkage clustering with link distance ≤ radius. Nodes are numbered
// by their lexicographically smallest detector id, so the result does not
// depend on input order.
MergeResult merge_detectors(const std::vector<DetectorPoint>& points, double radius);

// Converts (lon, lat) degrees stored in x, y to local planar meters around
// the centroid.
void project_equirectangular(std::vector<DetectorPoint>& points);

struct RoadSegment {
  std::string segment_id;
  std::string det_a;
  std::string det_b;
  double fwd = 0.0;  // det_a → det_b
  double rev = 0.0;
  std::string timestamp;
};

struct RoadNetwork {
  MergeResult merge;
  std::vector<FlowSlice> slices;
  Index dropped_self_edges = 0;
};

RoadNetwork build_road_network(const std::vector<DetectorPoint>& points, const std::vector<RoadSegment>& segments,
                               double radius);

std::vector<DetectorPoint> load_detectors(const std::filesystem::path& path);
std::vector<RoadSegment> load_segments(const std::filesystem::path& path);
std::vector<DetectorPoint> parse_detectors(std::istream& in, const std::string& source = "<stream>");
std::vector<RoadSegment> parse_segments(std::istream& in, const std::string& source = "<stream>");

// Writers emit exactly the schemas the loaders read. Doubles are printed with
// round-trip precision. A non-empty `comment` becomes a leading '#' line.
void write_edge_flows(const std::filesystem::path& path, const FlowDataset& data, Schema schema,
                      const std::string& comment = {});
void write_detectors(const std::filesystem::path& path, const std::vector<DetectorPoint>& points,
                     const std::string& comment = {});
void write_segments(const std::filesystem::path& path, const std::vector<RoadSegment>& segments,
                    const std::string& comment = {});

enum class ExportFormat { json, csv, geojson };

struct ExportInput {
  const FlowGraph& graph;
  const EdgeFlow& flow;
  const HodgeComponents& components;
  const VarianceReport* metrics = nullptr;
  const std::vector<Index>* clusters = nullptr;
  const std::vector<std::string>* external_ids = nullptr;  // dense id → input id, for node records
  Json config;  // echoed into the output
};

// json: one document; csv: <stem>_nodes.csv and <stem>_edges.csv next to
// `path`; geojson: Point and LineString features. Returns the files written.
std::vector<std::filesystem::path> export_results(const ExportInput& in, ExportFormat format,
                                                  const std::filesystem::path& path);

// The document export_results writes for the json format.
Json results_document(const ExportInput& in);

// What can be read back from a json or csv export.
struct ExportedResults {
  FlowGraph graph;
  EdgeFlow flow;
  EdgeFlow gradient;
  EdgeFlow curl;
  EdgeFlow harmonic;
  Vector potential;
  Vector divergence;
  std::vector<Index> clusters;  // -1 where absent
};

ExportedResults load_results(const std::filesystem::path& path, ExportFormat format);

// Writes via a temporary sibling and rename.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

std::string format_double(double v);

}  // namespace hodgeflow
