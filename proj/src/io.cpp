#include "hodgeflow/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>
#include <unordered_map>

namespace hodgeflow {

namespace fs = std::filesystem;

namespace {

// ---------------------------------------------------------------------------
// CSV

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(trim(cur));
  return out;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

class CsvReader {
public:
  CsvReader(std::istream& in, std::string source, const std::vector<std::string>& required,
            const std::vector<std::string>& optional = {})
      : in_(in), source_(std::move(source)) {
    std::vector<std::string> header;
    if (!next_raw(header)) throw ParseError(source_, 0, "missing header row");
    for (std::size_t i = 0; i < header.size(); ++i) column_[header[i]] = i;
    for (const auto& r : required)
      if (!column_.count(r)) throw ParseError(source_, line_, "missing required column '" + r + "'");
    for (const auto& o : optional)
      if (column_.count(o)) present_.insert(o);
  }

  bool next() { return next_raw(row_); }

  bool has(const std::string& col) const { return column_.count(col) > 0; }

  const std::string& get(const std::string& col) const {
    const std::size_t i = column_.at(col);
    if (i >= row_.size()) throw ParseError(source_, line_, "row is missing column '" + col + "'");
    return row_[i];
  }

  double number(const std::string& col) const {
    const std::string& s = get(col);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v))
      throw ParseError(source_, line_, "column '" + col + "': not a number: '" + s + "'");
    return v;
  }

  std::size_t line() const { return line_; }
  const std::string& source() const { return source_; }

private:
  bool next_raw(std::vector<std::string>& out) {
    std::string line;
    while (std::getline(in_, line)) {
      ++line_;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line_ == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
      const std::string t = trim(line);
      if (t.empty() || t[0] == '#') continue;
      out = split_csv(line);
      return true;
    }
    return false;
  }

  std::istream& in_;
  std::string source_;
  std::size_t line_ = 0;
  std::map<std::string, std::size_t> column_;
  std::set<std::string> present_;
  std::vector<std::string> row_;
};

std::ifstream open_input(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path.string(), 0, "cannot open file");
  return in;
}

std::string comment_line(const std::string& comment) {
  if (comment.empty()) return {};
  std::string flat = comment;
  std::replace(flat.begin(), flat.end(), '\n', ' ');
  return "# " + flat + "\n";
}

// Orders slice keys by clock time when every key is "HH:MM".
std::vector<std::string> order_timestamps(const std::set<std::string>& keys) {
  std::vector<std::string> out(keys.begin(), keys.end());
  const bool clock = std::all_of(out.begin(), out.end(), [](const std::string& k) { return timestamp_minutes(k).has_value(); });
  if (clock)
    std::stable_sort(out.begin(), out.end(),
                     [](const std::string& a, const std::string& b) { return *timestamp_minutes(a) < *timestamp_minutes(b); });
  return out;
}

struct PairVolume {
  double fwd = 0.0;
  double rev = 0.0;
};

FlowSlice make_slice(std::string ts, Index n, const std::map<std::pair<Index, Index>, PairVolume>& pairs,
                     std::optional<std::vector<Point2>> coords = std::nullopt) {
  std::vector<std::pair<Index, Index>> raw;
  raw.reserve(pairs.size());
  for (const auto& [key, vol] : pairs) raw.push_back(key);
  FlowSlice s;
  s.timestamp = std::move(ts);
  s.graph = build_graph(raw, n, std::move(coords)).graph;
  s.fwd.resize(s.graph.edge_count());
  s.rev.resize(s.graph.edge_count());
  Index e = 0;
  for (const auto& [key, vol] : pairs) {  // map order == canonical edge order
    s.fwd[e] = vol.fwd;
    s.rev[e] = vol.rev;
    ++e;
  }
  return s;
}

Vector json_vector(const Json& arr, const char* key) {
  Vector v(static_cast<Index>(arr.size()));
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const Json& x = arr[i].at(key);
    v[static_cast<Index>(i)] = x.is_null() ? std::nan("") : x.get<double>();
  }
  return v;
}

}  // namespace

std::string format_double(double v) {
  if (!std::isfinite(v)) return std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

std::optional<int> timestamp_minutes(const std::string& ts) {
  const auto colon = ts.find(':');
  if (colon == std::string::npos || colon == 0 || colon > 2 || ts.size() != colon + 3) return std::nullopt;
  int h = 0, m = 0;
  if (std::from_chars(ts.data(), ts.data() + colon, h).ptr != ts.data() + colon) return std::nullopt;
  if (std::from_chars(ts.data() + colon + 1, ts.data() + ts.size(), m).ptr != ts.data() + ts.size())
    return std::nullopt;
  if (h < 0 || h > 23 || m < 0 || m > 59) return std::nullopt;
  return h * 60 + m;
}

FlowDataset parse_edge_flows(std::istream& in, Schema schema, IdPolicy ids, const std::string& source) {
  const std::vector<std::string> required =
      schema == Schema::od ? std::vector<std::string>{"src", "dst", "volume"}
                           : std::vector<std::string>{"src", "dst", "fwd", "rev"};
  CsvReader csv(in, source, required, {"timestamp"});
  const bool has_ts = csv.has("timestamp");

  struct Row {
    std::string src, dst, ts;
    double a = 0.0, b = 0.0;
    std::size_t line = 0;
  };
  std::vector<Row> rows;
  std::set<std::string> id_set;
  while (csv.next()) {
    Row r{csv.get("src"), csv.get("dst"), has_ts ? csv.get("timestamp") : std::string(), 0.0, 0.0, csv.line()};
    if (r.src.empty() || r.dst.empty()) throw ParseError(source, r.line, "empty node id");
    if (r.src == r.dst) throw ParseError(source, r.line, "self-loop on '" + r.src + "'");
    if (schema == Schema::od) {
      r.a = csv.number("volume");
    } else {
      r.a = csv.number("fwd");
      r.b = csv.number("rev");
    }
    if (r.a < 0.0 || r.b < 0.0) throw ParseError(source, r.line, "negative volume");
    id_set.insert(r.src);
    id_set.insert(r.dst);
    rows.push_back(std::move(r));
  }

  FlowDataset out;
  out.external_ids.assign(id_set.begin(), id_set.end());
  if (ids == IdPolicy::numeric) {
    std::vector<std::pair<long long, std::string>> keyed;
    for (const auto& s : out.external_ids) {
      long long v = 0;
      const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
      if (ec != std::errc() || ptr != s.data() + s.size())
        throw ParseError(source, 0, "numeric id policy but id '" + s + "' is not an integer");
      keyed.emplace_back(v, s);
    }
    std::sort(keyed.begin(), keyed.end());
    for (std::size_t i = 0; i < keyed.size(); ++i) out.external_ids[i] = keyed[i].second;
  }
  std::unordered_map<std::string, Index> dense;
  for (std::size_t i = 0; i < out.external_ids.size(); ++i) dense[out.external_ids[i]] = static_cast<Index>(i);
  const auto n = static_cast<Index>(out.external_ids.size());

  std::map<std::string, std::map<std::pair<Index, Index>, PairVolume>> by_slice;
  std::set<std::tuple<std::string, Index, Index>> seen;
  std::set<std::string> stamps;
  for (const Row& r : rows) {
    const Index u = dense.at(r.src);
    const Index v = dense.at(r.dst);
    // od keys are directed; bidirectional keys are unordered pairs.
    const auto key = schema == Schema::od ? std::make_tuple(r.ts, u, v)
                                          : std::make_tuple(r.ts, std::min(u, v), std::max(u, v));
    if (!seen.insert(key).second)
      throw ParseError(source, r.line, "duplicate key (" + r.src + ", " + r.dst + (has_ts ? ", " + r.ts : "") + ")");
    stamps.insert(r.ts);
    PairVolume& pv = by_slice[r.ts][{std::min(u, v), std::max(u, v)}];
    const bool forward = u < v;
    if (schema == Schema::od) {
      (forward ? pv.fwd : pv.rev) += r.a;
    } else {
      pv.fwd += forward ? r.a : r.b;
      pv.rev += forward ? r.b : r.a;
    }
  }
  for (const std::string& ts : order_timestamps(stamps)) out.slices.push_back(make_slice(ts, n, by_slice[ts]));
  return out;
}

FlowDataset load_edge_flows(const fs::path& path, Schema schema, IdPolicy ids) {
  auto in = open_input(path);
  return parse_edge_flows(in, schema, ids, path.string());
}

MergeResult merge_detectors(const std::vector<DetectorPoint>& points, double radius) {
  if (points.empty()) throw InvalidInput("merge_detectors: no points");
  if (!(radius > 0.0)) throw InvalidInput("merge radius must be positive");

  std::vector<std::size_t> order(points.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return points[a].external_id < points[b].external_id; });
  std::vector<DetectorPoint> pts;
  pts.reserve(points.size());
  for (std::size_t i : order) {
    if (!pts.empty() && pts.back().external_id == points[i].external_id)
      throw InvalidInput("duplicate detector id '" + points[i].external_id + "'");
    if (!std::isfinite(points[i].x) || !std::isfinite(points[i].y))
      throw InvalidInput("detector '" + points[i].external_id + "' has non-finite coordinates");
    pts.push_back(points[i]);
  }

  // Union-find keyed by sorted position; the root is always the smallest member.
  std::vector<std::size_t> parent(pts.size());
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  auto unite = [&](std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  };

  std::map<std::pair<long long, long long>, std::vector<std::size_t>> cells;
  auto cell_of = [&](const DetectorPoint& p) {
    return std::make_pair(static_cast<long long>(std::floor(p.x / radius)),
                          static_cast<long long>(std::floor(p.y / radius)));
  };
  for (std::size_t i = 0; i < pts.size(); ++i) cells[cell_of(pts[i])].push_back(i);
  const double r2 = radius * radius;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const auto [cx, cy] = cell_of(pts[i]);
    for (long long dx = -1; dx <= 1; ++dx)
      for (long long dy = -1; dy <= 1; ++dy) {
        auto it = cells.find({cx + dx, cy + dy});
        if (it == cells.end()) continue;
        for (std::size_t j : it->second) {
          if (j <= i) continue;
          const double ex = pts[i].x - pts[j].x;
          const double ey = pts[i].y - pts[j].y;
          if (ex * ex + ey * ey <= r2) unite(i, j);
        }
      }
  }

  MergeResult out;
  out.radius = radius;
  std::map<std::size_t, Index> node_of_root;
  std::vector<Point2> sums;
  std::vector<double> counts;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const std::size_t root = find(i);
    auto [it, inserted] = node_of_root.try_emplace(root, static_cast<Index>(sums.size()));
    if (inserted) {
      sums.push_back({0.0, 0.0});
      counts.push_back(0.0);
    }
    const auto node = static_cast<std::size_t>(it->second);
    sums[node].x += pts[i].x;
    sums[node].y += pts[i].y;
    counts[node] += 1.0;
    out.node_of[pts[i].external_id] = it->second;
  }
  out.centroids.resize(sums.size());
  for (std::size_t k = 0; k < sums.size(); ++k) out.centroids[k] = {sums[k].x / counts[k], sums[k].y / counts[k]};
  return out;
}

void project_equirectangular(std::vector<DetectorPoint>& points) {
  if (points.empty()) return;
  constexpr double kEarthRadius = 6371008.8;
  constexpr double kDeg = 3.14159265358979323846 / 180.0;
  double lon0 = 0.0, lat0 = 0.0;
  for (const auto& p : points) {
    lon0 += p.x;
    lat0 += p.y;
  }
  lon0 /= static_cast<double>(points.size());
  lat0 /= static_cast<double>(points.size());
  const double c = std::cos(lat0 * kDeg);
  for (auto& p : points) {
    p.x = kEarthRadius * (p.x - lon0) * kDeg * c;
    p.y = kEarthRadius * (p.y - lat0) * kDeg;
  }
}

RoadNetwork build_road_network(const std::vector<DetectorPoint>& points, const std::vector<RoadSegment>& segments,
                               double radius) {
  RoadNetwork out;
  out.merge = merge_detectors(points, radius);
  const auto n = static_cast<Index>(out.merge.centroids.size());

  std::map<std::string, std::map<std::pair<Index, Index>, PairVolume>> by_slice;
  std::set<std::string> stamps;
  for (const RoadSegment& s : segments) {
    auto ia = out.merge.node_of.find(s.det_a);
    auto ib = out.merge.node_of.find(s.det_b);
    if (ia == out.merge.node_of.end() || ib == out.merge.node_of.end())
      throw InvalidInput("segment '" + s.segment_id + "' has unresolvable endpoint id '" +
                         (ia == out.merge.node_of.end() ? s.det_a : s.det_b) + "'");
    if (s.fwd < 0.0 || s.rev < 0.0) throw InvalidInput("segment '" + s.segment_id + "' has a negative volume");
    stamps.insert(s.timestamp);
    const Index u = ia->second;
    const Index v = ib->second;
    if (u == v) {
      ++out.dropped_self_edges;
      continue;
    }
    PairVolume& pv = by_slice[s.timestamp][{std::min(u, v), std::max(u, v)}];
    pv.fwd += u < v ? s.fwd : s.rev;
    pv.rev += u < v ? s.rev : s.fwd;
  }
  for (const std::string& ts : order_timestamps(stamps))
    out.slices.push_back(make_slice(ts, n, by_slice[ts], out.merge.centroids));
  return out;
}

std::vector<DetectorPoint> parse_detectors(std::istream& in, const std::string& source) {
  CsvReader csv(in, source, {"detector_id", "x", "y", "segment_id"});
  std::vector<DetectorPoint> out;
  while (csv.next()) out.push_back({csv.get("detector_id"), csv.number("x"), csv.number("y"), csv.get("segment_id")});
  return out;
}

std::vector<RoadSegment> parse_segments(std::istream& in, const std::string& source) {
  CsvReader csv(in, source, {"segment_id", "det_a", "det_b", "fwd", "rev", "timestamp"});
  std::vector<RoadSegment> out;
  while (csv.next()) {
    RoadSegment s{csv.get("segment_id"), csv.get("det_a"), csv.get("det_b"), csv.number("fwd"), csv.number("rev"),
                  csv.get("timestamp")};
    if (s.fwd < 0.0 || s.rev < 0.0) throw ParseError(source, csv.line(), "negative volume");
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<DetectorPoint> load_detectors(const fs::path& path) {
  auto in = open_input(path);
  return parse_detectors(in, path.string());
}

std::vector<RoadSegment> load_segments(const fs::path& path) {
  auto in = open_input(path);
  return parse_segments(in, path.string());
}

void write_edge_flows(const fs::path& path, const FlowDataset& data, Schema schema, const std::string& comment) {
  const bool ts = std::any_of(data.slices.begin(), data.slices.end(), [](const FlowSlice& s) { return !s.timestamp.empty(); });
  std::ostringstream os;
  os << comment_line(comment);
  os << (schema == Schema::od ? "src,dst,volume" : "src,dst,fwd,rev") << (ts ? ",timestamp" : "") << "\n";
  for (const FlowSlice& s : data.slices) {
    const std::string suffix = ts ? "," + csv_field(s.timestamp) : std::string();
    for (Index e = 0; e < s.graph.edge_count(); ++e) {
      const std::string& a = data.external_ids.at(static_cast<std::size_t>(s.graph.edge(e).tail));
      const std::string& b = data.external_ids.at(static_cast<std::size_t>(s.graph.edge(e).head));
      if (schema == Schema::od) {
        os << csv_field(a) << ',' << csv_field(b) << ',' << format_double(s.fwd[e]) << suffix << "\n";
        os << csv_field(b) << ',' << csv_field(a) << ',' << format_double(s.rev[e]) << suffix << "\n";
      } else {
        os << csv_field(a) << ',' << csv_field(b) << ',' << format_double(s.fwd[e]) << ','
           << format_double(s.rev[e]) << suffix << "\n";
      }
    }
  }
  write_file_atomic(path, os.str());
}

void write_detectors(const fs::path& path, const std::vector<DetectorPoint>& points, const std::string& comment) {
  std::ostringstream os;
  os << comment_line(comment) << "detector_id,x,y,segment_id\n";
  for (const auto& p : points)
    os << csv_field(p.external_id) << ',' << format_double(p.x) << ',' << format_double(p.y) << ','
       << csv_field(p.segment_id) << "\n";
  write_file_atomic(path, os.str());
}

void write_segments(const fs::path& path, const std::vector<RoadSegment>& segments, const std::string& comment) {
  std::ostringstream os;
  os << comment_line(comment) << "segment_id,det_a,det_b,fwd,rev,timestamp\n";
  for (const auto& s : segments)
    os << csv_field(s.segment_id) << ',' << csv_field(s.det_a) << ',' << csv_field(s.det_b) << ','
       << format_double(s.fwd) << ',' << format_double(s.rev) << ',' << csv_field(s.timestamp) << "\n";
  write_file_atomic(path, os.str());
}

// ---------------------------------------------------------------------------
// Export

Json results_document(const ExportInput& in) {
  const FlowGraph& g = in.graph;
  const HodgeComponents& c = in.components;
  if (in.flow.size() != g.edge_count()) throw InvalidInput("export: flow length does not match graph");
  const Vector d = divergence(g, in.flow).values;
  if (in.clusters && static_cast<Index>(in.clusters->size()) != g.node_count())
    throw InvalidInput("export: cluster labels do not match node count");

  Json doc;
  Json nodes = Json::array();
  for (Index v = 0; v < g.node_count(); ++v) {
    Json node;
    node["id"] = v;
    if (in.external_ids) node["external_id"] = in.external_ids->at(static_cast<std::size_t>(v));
    node["potential"] = c.potential.values[v];
    node["divergence"] = d[v];
    node["cluster"] = in.clusters ? Json((*in.clusters)[static_cast<std::size_t>(v)]) : Json(nullptr);
    if (g.has_coords()) {
      node["x"] = g.coords()[static_cast<std::size_t>(v)].x;
      node["y"] = g.coords()[static_cast<std::size_t>(v)].y;
    }
    nodes.push_back(std::move(node));
  }
  Json edges = Json::array();
  for (Index e = 0; e < g.edge_count(); ++e) {
    edges.push_back({{"tail", g.edge(e).tail},
                     {"head", g.edge(e).head},
                     {"flow", in.flow[e]},
                     {"grad", c.gradient[e]},
                     {"curl", c.curl_adjoint[e]},
                     {"harmonic", c.harmonic[e]}});
  }
  Json metrics;
  metrics["energies"] = {{"gradient", c.energies.gradient},
                         {"curl", c.energies.curl},
                         {"harmonic", c.energies.harmonic}};
  if (in.metrics) {
    const VarianceReport& r = *in.metrics;
    metrics["local_p"] = r.local_p;
    metrics["local_d"] = r.local_d;
    metrics["global_p"] = r.global_p;
    metrics["global_d"] = r.global_d;
    auto opt = [](const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); };
    metrics["spectral_local_p"] = opt(r.spectral_local_p);
    metrics["spectral_local_d"] = opt(r.spectral_local_d);
    metrics["spectral_global_p"] = opt(r.spectral_global_p);
    metrics["spectral_global_d"] = opt(r.spectral_global_d);
  }
  doc["nodes"] = std::move(nodes);
  doc["edges"] = std::move(edges);
  doc["metrics"] = std::move(metrics);
  if (!in.config.is_null()) doc["config"] = in.config;
  return doc;
}

std::vector<fs::path> export_results(const ExportInput& in, ExportFormat format, const fs::path& path) {
  const FlowGraph& g = in.graph;
  if (format == ExportFormat::json) {
    write_file_atomic(path, results_document(in).dump(2) + "\n");
    return {path};
  }

  const Json doc = results_document(in);
  if (format == ExportFormat::geojson) {
    if (!g.has_coords()) throw InvalidInput("geojson export needs node coordinates");
    Json features = Json::array();
    for (const Json& node : doc["nodes"]) {
      Json props = {{"id", node["id"]},
                    {"external_id", node.contains("external_id") ? node["external_id"] : Json(nullptr)},
                    {"potential", node["potential"]},
                    {"divergence", node["divergence"]},
                    {"cluster", node["cluster"]}};
      features.push_back({{"type", "Feature"},
                          {"geometry", {{"type", "Point"}, {"coordinates", {node["x"], node["y"]}}}},
                          {"properties", std::move(props)}});
    }
    for (const Json& edge : doc["edges"]) {
      const Point2& a = g.coords()[edge["tail"].get<std::size_t>()];
      const Point2& b = g.coords()[edge["head"].get<std::size_t>()];
      features.push_back({{"type", "Feature"},
                          {"geometry", {{"type", "LineString"}, {"coordinates", {{a.x, a.y}, {b.x, b.y}}}}},
                          {"properties", edge}});
    }
    Json fc = {{"type", "FeatureCollection"}, {"features", std::move(features)}};
    fc["metrics"] = doc["metrics"];
    if (!in.config.is_null()) fc["config"] = in.config;
    write_file_atomic(path, fc.dump(2) + "\n");
    return {path};
  }

  const fs::path stem = path.parent_path() / path.stem();
  const fs::path nodes_path = stem.string() + "_nodes.csv";
  const fs::path edges_path = stem.string() + "_edges.csv";
  const std::string comment = in.config.is_null() ? std::string() : comment_line("config=" + in.config.dump());

  std::ostringstream nodes;
  nodes << comment << "id,potential,divergence,cluster" << (g.has_coords() ? ",x,y" : "") << "\n";
  for (const Json& node : doc["nodes"]) {
    nodes << node["id"].get<Index>() << ',' << format_double(node["potential"].get<double>()) << ','
          << format_double(node["divergence"].get<double>()) << ','
          << (node["cluster"].is_null() ? std::string() : std::to_string(node["cluster"].get<Index>()));
    if (g.has_coords())
      nodes << ',' << format_double(node["x"].get<double>()) << ',' << format_double(node["y"].get<double>());
    nodes << "\n";
  }
  std::ostringstream edges;
  edges << comment << "tail,head,flow,grad,curl,harmonic\n";
  for (Index e = 0; e < g.edge_count(); ++e) {
    edges << g.edge(e).tail << ',' << g.edge(e).head << ',' << format_double(in.flow[e]) << ','
          << format_double(in.components.gradient[e]) << ',' << format_double(in.components.curl_adjoint[e]) << ','
          << format_double(in.components.harmonic[e]) << "\n";
  }
  write_file_atomic(nodes_path, nodes.str());
  write_file_atomic(edges_path, edges.str());
  return {nodes_path, edges_path};
}

ExportedResults load_results(const fs::path& path, ExportFormat format) {
  ExportedResults out;
  std::vector<std::pair<Index, Index>> raw;
  std::optional<std::vector<Point2>> coords;
  Index n = 0;

  if (format == ExportFormat::json) {
    auto in = open_input(path);
    Json doc;
    try {
      doc = Json::parse(in);
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(path.string(), 0, e.what());
    }
    const Json& nodes = doc.at("nodes");
    const Json& edges = doc.at("edges");
    n = static_cast<Index>(nodes.size());
    out.potential = json_vector(nodes, "potential");
    out.divergence = json_vector(nodes, "divergence");
    for (const Json& node : nodes) {
      out.clusters.push_back(node.at("cluster").is_null() ? -1 : node.at("cluster").get<Index>());
      if (node.contains("x")) {
        if (!coords) coords.emplace();
        coords->push_back({node.at("x").get<double>(), node.at("y").get<double>()});
      }
    }
    for (const Json& e : edges) raw.emplace_back(e.at("tail").get<Index>(), e.at("head").get<Index>());
    out.flow = json_vector(edges, "flow");
    out.gradient = json_vector(edges, "grad");
    out.curl = json_vector(edges, "curl");
    out.harmonic = json_vector(edges, "harmonic");
  } else if (format == ExportFormat::csv) {
    const fs::path stem = path.parent_path() / path.stem();
    const fs::path nodes_path = stem.string() + "_nodes.csv";
    const fs::path edges_path = stem.string() + "_edges.csv";
    {
      auto in = open_input(nodes_path);
      CsvReader csv(in, nodes_path.string(), {"id", "potential", "divergence", "cluster"});
      const bool xy = csv.has("x") && csv.has("y");
      std::vector<double> pot, div;
      while (csv.next()) {
        if (static_cast<Index>(csv.number("id")) != n) throw ParseError(csv.source(), csv.line(), "node ids not dense");
        pot.push_back(csv.number("potential"));
        div.push_back(csv.number("divergence"));
        out.clusters.push_back(csv.get("cluster").empty() ? -1 : static_cast<Index>(csv.number("cluster")));
        if (xy) {
          if (!coords) coords.emplace();
          coords->push_back({csv.number("x"), csv.number("y")});
        }
        ++n;
      }
      out.potential = Eigen::Map<const Vector>(pot.data(), static_cast<Index>(pot.size()));
      out.divergence = Eigen::Map<const Vector>(div.data(), static_cast<Index>(div.size()));
    }
    auto in = open_input(edges_path);
    CsvReader csv(in, edges_path.string(), {"tail", "head", "flow", "grad", "curl", "harmonic"});
    std::vector<double> f, gr, cu, ha;
    while (csv.next()) {
      raw.emplace_back(static_cast<Index>(csv.number("tail")), static_cast<Index>(csv.number("head")));
      f.push_back(csv.number("flow"));
      gr.push_back(csv.number("grad"));
      cu.push_back(csv.number("curl"));
      ha.push_back(csv.number("harmonic"));
    }
    auto vec = [](const std::vector<double>& v) { return Vector(Eigen::Map<const Vector>(v.data(), static_cast<Index>(v.size()))); };
    out.flow = vec(f);
    out.gradient = vec(gr);
    out.curl = vec(cu);
    out.harmonic = vec(ha);
  } else {
    throw InvalidInput("geojson exports are not loadable");
  }

  BuildResult built = build_graph(raw, n, std::move(coords));
  for (std::size_t i = 0; i < raw.size(); ++i)
    if (built.flipped[i] || built.edge_of[i] != static_cast<Index>(i))
      throw ParseError(path.string(), 0, "exported edges are not in canonical order");
  out.graph = std::move(built.graph);
  return out;
}

void write_file_atomic(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
  }
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw InvalidInput("cannot write '" + path.string() + "'");
    os << content;
    if (!os.flush()) throw InvalidInput("write failed for '" + path.string() + "'");
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw InvalidInput("cannot write '" + path.string() + "'");
  }
}

}  // namespace hodgeflow
