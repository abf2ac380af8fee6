#include "commands.hpp"

#include "hodgeflow/embed.hpp"
#include "hodgeflow/hodge.hpp"
#include "hodgeflow/metrics.hpp"
#include "hodgeflow/spectral.hpp"
#include "hodgeflow/synth.hpp"

#include <CLI11.hpp>

#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <thread>

namespace hodgeflow::cli {

namespace fs = std::filesystem;

namespace {

const char* schema_name(Schema s) { return s == Schema::od ? "od" : "bidirectional"; }

const char* format_name(ExportFormat f) {
  switch (f) {
    case ExportFormat::json: return "json";
    case ExportFormat::csv: return "csv";
    case ExportFormat::geojson: return "geojson";
  }
  return "json";
}

const char* format_extension(ExportFormat f) {
  switch (f) {
    case ExportFormat::json: return ".json";
    case ExportFormat::csv: return ".csv";
    case ExportFormat::geojson: return ".geojson";
  }
  return ".json";
}

Json optional_json(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

// Non-finite values (undefined metrics) become null.
Json number(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

struct Loaded {
  std::vector<std::string> ids;
  std::vector<FlowSlice> slices;
  Index dropped_self_edges = 0;
};

Loaded load_input(const RunConfig& cfg) {
  if (cfg.input.empty()) throw InvalidInput("--input is required");
  Loaded out;
  if (!cfg.detectors.empty()) {
    std::vector<DetectorPoint> points = load_detectors(cfg.detectors);
    if (cfg.latlon) project_equirectangular(points);
    RoadNetwork net = build_road_network(points, load_segments(cfg.input), cfg.radius);
    out.ids.resize(net.merge.centroids.size());
    // node_of iterates in id order, so the first hit is the smallest member id
    for (const auto& [det, node] : net.merge.node_of)
      if (out.ids[static_cast<std::size_t>(node)].empty()) out.ids[static_cast<std::size_t>(node)] = det;
    out.slices = std::move(net.slices);
    out.dropped_self_edges = net.dropped_self_edges;
    if (out.dropped_self_edges > 0)
      std::cerr << "warning: dropped " << out.dropped_self_edges << " segment(s) whose endpoints merged\n";
  } else {
    FlowDataset data = load_edge_flows(cfg.input, cfg.schema, cfg.ids);
    out.ids = std::move(data.external_ids);
    out.slices = std::move(data.slices);
  }

  if (!cfg.slices.empty()) {
    const auto [from, to] = parse_slice_range(cfg.slices);
    std::vector<FlowSlice> kept;
    for (FlowSlice& s : out.slices) {
      const auto t = timestamp_minutes(s.timestamp);
      if (t && *t >= from && *t <= to) kept.push_back(std::move(s));
    }
    if (kept.empty()) throw InvalidInput("no slices in range " + cfg.slices);
    out.slices = std::move(kept);
  }
  if (out.slices.empty()) throw InvalidInput("input has no rows");
  return out;
}

struct SliceOutcome {
  bool ok = false;
  std::string message;
  Json summary;
};

// Runs `fn` over every slice with at most `jobs` workers. Results are
// collected by slice index, so output does not depend on scheduling.
std::vector<SliceOutcome> for_each_slice(const Loaded& data, int jobs,
                                         const std::function<Json(const FlowSlice&)>& fn) {
  std::vector<SliceOutcome> out(data.slices.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < data.slices.size(); i = next++) {
      const FlowSlice& s = data.slices[i];
      try {
        if (s.graph.edge_count() == 0) throw InvalidInput("slice has no edges");
        out[i].summary = fn(s);
        out[i].ok = true;
      } catch (const std::exception& e) {
        out[i].message = "slice '" + s.timestamp + "': " + e.what();
      }
    }
  };
  const auto n = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(std::max(jobs, 1)), data.slices.size()));
  std::vector<std::thread> pool;
  for (int t = 1; t < n; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  return out;
}

int report(const std::vector<SliceOutcome>& outcomes) {
  int code = kOk;
  for (const auto& o : outcomes)
    if (!o.ok) {
      std::cerr << "error: " << o.message << "\n";
      code = kComputeFailure;
    }
  return code;
}

SolverOptions solver_options(const RunConfig& cfg) {
  SolverOptions opts;
  opts.method = cfg.solver;
  opts.tol = cfg.tol;
  return opts;
}

Json slice_config(const RunConfig& cfg, const FlowSlice& s) {
  Json c = cfg.to_json();
  c["slice"] = s.timestamp;
  return c;
}

std::map<std::string, Index> load_truth(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path, 0, "cannot open file");
  std::string line;
  std::size_t lineno = 0;
  std::map<std::string, std::string> raw;
  bool header = true;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw ParseError(path, lineno, "expected node_id,label");
    if (header) {
      if (line.substr(0, comma) != "node_id") throw ParseError(path, lineno, "header must be node_id,label");
      header = false;
      continue;
    }
    if (!raw.emplace(line.substr(0, comma), line.substr(comma + 1)).second)
      throw ParseError(path, lineno, "duplicate node id");
  }
  std::map<std::string, Index> codes;
  for (const auto& [id, label] : raw) codes.emplace(label, 0);
  Index next = 0;
  for (auto& [label, code] : codes) code = next++;
  std::map<std::string, Index> out;
  for (const auto& [id, label] : raw) out[id] = codes[label];
  return out;
}

double median_edge_length(const FlowGraph& g) {
  Vector len(g.edge_count());
  for (Index e = 0; e < g.edge_count(); ++e) {
    const Point2& a = g.coords()[static_cast<std::size_t>(g.edge(e).tail)];
    const Point2& b = g.coords()[static_cast<std::size_t>(g.edge(e).head)];
    len[e] = std::hypot(a.x - b.x, a.y - b.y);
  }
  return median_nonzero(len);
}

std::string padded(Index v, Index count, const char* prefix) {
  const int width = static_cast<int>(std::to_string(std::max<Index>(count - 1, 0)).size());
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%s%0*lld", prefix, width, static_cast<long long>(v));
  return buf;
}

}  // namespace

Json RunConfig::to_json() const {
  Json j;
  j["command"] = command;
  if (command == "synth") {
    j["kind"] = kind;
    j["rows"] = rows;
    j["cols"] = cols;
    j["n"] = n;
    j["edge_prob"] = edge_prob;
    j["hub_fraction"] = hub_fraction;
    j["noise"] = noise;
    j["delta"] = delta;
    j["seed"] = seed;
    return j;
  }
  j["input"] = input;
  j["detectors"] = detectors;
  j["latlon"] = latlon;
  j["labels"] = labels;
  j["output"] = output;
  j["schema"] = schema_name(schema);
  j["ids"] = ids == IdPolicy::numeric ? "numeric" : "lexicographic";
  j["format"] = format_name(format);
  j["solver"] = solver == SolverMethod::dense_pseudoinverse ? "dense" : "cg";
  j["tol"] = tol;
  j["k"] = k;
  j["struct_dims"] = struct_dims ? Json(*struct_dims) : Json(nullptr);
  j["features"] = features;
  j["variant"] = variant == CutVariant::ratio_cut ? "ratio_cut" : "normalized_cut";
  j["seed"] = seed;
  j["radius"] = radius;
  j["alpha"] = alpha;
  j["sigma"] = optional_json(sigma);
  j["sigma_d"] = optional_json(sigma_d);
  j["slices"] = slices;
  j["jobs"] = jobs;
  return j;
}

std::pair<int, int> parse_slice_range(const std::string& spec) {
  const auto dots = spec.find("..");
  if (dots == std::string::npos) throw InvalidInput("--slices expects FROM..TO, got '" + spec + "'");
  const auto from = timestamp_minutes(spec.substr(0, dots));
  const auto to = timestamp_minutes(spec.substr(dots + 2));
  if (!from || !to) throw InvalidInput("--slices bounds must be HH:MM, got '" + spec + "'");
  if (*from > *to) throw InvalidInput("--slices range is empty: " + spec);
  return {*from, *to};
}

std::string slice_label(const std::string& timestamp) {
  if (timestamp.empty()) return "all";
  std::string out;
  for (char c : timestamp)
    if (std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_') out += c;
  return out.empty() ? "slice" : out;
}

int cmd_decompose(const RunConfig& cfg) {
  const Loaded data = load_input(cfg);
  const SolverOptions opts = solver_options(cfg);
  const auto outcomes = for_each_slice(data, cfg.jobs, [&](const FlowSlice& s) {
    const EdgeFlow f = s.net();
    const HodgeComponents c = hodge_decompose(s.graph, f, opts);
    const fs::path path = fs::path(cfg.output) / ("decompose_" + slice_label(s.timestamp) + format_extension(cfg.format));
    ExportInput in{s.graph, f, c, nullptr, nullptr, &data.ids, slice_config(cfg, s)};
    Json files = Json::array();
    for (const auto& p : export_results(in, cfg.format, path)) files.push_back(p.string());
    return Json{{"slice", s.timestamp}, {"files", files}};
  });
  for (const auto& o : outcomes)
    if (o.ok)
      for (const auto& f : o.summary["files"]) std::cout << "wrote " << f.get<std::string>() << "\n";
  return report(outcomes);
}

int cmd_metrics(const RunConfig& cfg) {
  const Loaded data = load_input(cfg);
  const SolverOptions opts = solver_options(cfg);
  const auto outcomes = for_each_slice(data, cfg.jobs, [&](const FlowSlice& s) {
    const VarianceReport r = variance_report(s.graph, s.net(), opts);
    const Vector& p = r.potential.values;
    const Vector& d = r.divergence.values;
    Json j;
    Json warnings = Json::array();
    j["slice"] = s.timestamp;
    j["nodes"] = s.graph.node_count();
    j["edges"] = s.graph.edge_count();
    j["local_p"] = r.local_p;
    j["local_d"] = r.local_d;
    j["global_p"] = r.global_p;
    j["global_d"] = r.global_d;
    j["spectral_local_p"] = optional_json(r.spectral_local_p);
    j["spectral_local_d"] = optional_json(r.spectral_local_d);
    j["spectral_global_p"] = optional_json(r.spectral_global_p);
    j["spectral_global_d"] = optional_json(r.spectral_global_d);
    j["local_p_lt_local_d"] = r.local_p < r.local_d;
    j["global_p_gt_global_d"] = r.global_p > r.global_d;
    // Correlation-type metrics are undefined on degenerate fields; report null.
    auto guarded = [&](const char* name, const std::function<Json()>& f) {
      try {
        j[name] = f();
      } catch (const InvalidInput& e) {
        j[name] = nullptr;
        warnings.push_back(std::string(name) + ": " + e.what());
      }
    };
    guarded("assortativity_p", [&] { return number(assortativity(s.graph, p)); });
    guarded("assortativity_d", [&] { return number(assortativity(s.graph, d)); });
    guarded("spearman", [&] { return number(rank_correlation(p, d)); });
    guarded("piecewise_fit", [&] {
      const PiecewiseFit fit = piecewise_fit(p, d);
      const double gap = std::abs(fit.slope_neg - fit.slope_pos) /
                         std::max(std::abs(fit.slope_neg), std::abs(fit.slope_pos));
      return Json{{"slope_neg", number(fit.slope_neg)},
                  {"slope_pos", number(fit.slope_pos)},
                  {"intercept", number(fit.intercept)},
                  {"r2", number(fit.r2)},
                  {"slope_gap", number(gap)}};
    });
    j["warnings"] = warnings;
    return j;
  });

  Json doc;
  doc["config"] = cfg.to_json();
  doc["slices"] = Json::array();
  std::ostringstream csv;
  csv << "# config=" << cfg.to_json().dump() << "\n";
  csv << "slice,local_p,local_d,global_p,global_d\n";
  for (const auto& o : outcomes) {
    if (!o.ok) continue;
    doc["slices"].push_back(o.summary);
    csv << o.summary["slice"].get<std::string>() << ',' << format_double(o.summary["local_p"].get<double>()) << ','
        << format_double(o.summary["local_d"].get<double>()) << ','
        << format_double(o.summary["global_p"].get<double>()) << ','
        << format_double(o.summary["global_d"].get<double>()) << "\n";
    std::cout << "slice " << (o.summary["slice"].get<std::string>().empty() ? "all" : o.summary["slice"].get<std::string>())
              << ": local_p=" << o.summary["local_p"] << " local_d=" << o.summary["local_d"]
              << " spearman=" << o.summary["spearman"] << "\n";
  }
  const fs::path out(cfg.output);
  write_file_atomic(out / "metrics.json", doc.dump(2) + "\n");
  write_file_atomic(out / "metrics.csv", csv.str());
  std::cout << "wrote " << (out / "metrics.json").string() << "\nwrote " << (out / "metrics.csv").string() << "\n";
  return report(outcomes);
}

int cmd_cluster(const RunConfig& cfg) {
  std::vector<std::optional<FeatureSet>> sets;  // nullopt = gaussian kernel path
  for (const std::string& name : cfg.features) {
    if (name == "kernel") {
      sets.emplace_back(std::nullopt);
    } else if (auto f = parse_feature_set(name)) {
      sets.emplace_back(*f);
    } else {
      throw InvalidInput("unknown feature set '" + name + "'; allowed: " + feature_set_names() + "|kernel");
    }
  }
  if (sets.empty()) throw InvalidInput("--features is empty");
  if (cfg.k < 1) throw InvalidInput("--k must be at least 1");
  if (cfg.alpha < 0.0 || cfg.alpha > 1.0) throw InvalidInput("--alpha must lie in [0, 1]");
  const std::optional<std::map<std::string, Index>> truth =
      cfg.labels.empty() ? std::nullopt : std::optional(load_truth(cfg.labels));
  const Loaded data = load_input(cfg);

  const auto outcomes = for_each_slice(data, cfg.jobs, [&](const FlowSlice& s) {
    const Index n = s.graph.node_count();
    std::vector<Index> truth_labels;
    if (truth) {
      for (Index v = 0; v < n; ++v) {
        auto it = truth->find(data.ids[static_cast<std::size_t>(v)]);
        if (it == truth->end()) throw InvalidInput("no label for node '" + data.ids[static_cast<std::size_t>(v)] + "'");
        truth_labels.push_back(it->second);
      }
    }

    Json rows = Json::array();
    std::vector<std::vector<Index>> all_labels;
    for (std::size_t i = 0; i < sets.size(); ++i) {
      ClusterAssignment a;
      Matrix points;
      if (sets[i]) {
        const EmbeddingMatrix emb =
            flow_embedding(s.graph, s.fwd, s.rev, cfg.struct_dims.value_or(cfg.k), *sets[i], cfg.seed);
        for (const auto& w : emb.warnings) std::cerr << "warning: slice '" << s.timestamp << "': " << w << "\n";
        a = kmeans(emb.z, cfg.k, cfg.seed);
        points = emb.z;
      } else {
        const Vector m = symmetrize_mean(s.fwd, s.rev);
        SimilarityMatrix sim = gaussian_similarity(s.graph, m, cfg.sigma.value_or(median_nonzero(m)));
        if (cfg.alpha < 1.0) {
          if (!s.graph.has_coords()) throw InvalidInput("--alpha < 1 needs node coordinates");
          sim = blend_distance(sim, s.graph.coords(), cfg.sigma_d.value_or(median_edge_length(s.graph)), cfg.alpha);
        }
        a = spectral_cluster(sim, cfg.k, cfg.variant, cfg.seed);
        points = spectral_embedding(sim, cfg.k, cfg.variant, false).vectors;
      }
      Json row;
      row["feature_set"] = cfg.features[i];
      row["k"] = cfg.k;
      row["inertia"] = a.inertia;
      row["silhouette"] = silhouette(points, a.labels);
      row["ari"] = truth ? Json(adjusted_rand_index(truth_labels, a.labels)) : Json(nullptr);
      rows.push_back(row);
      all_labels.push_back(a.labels);
    }

    const std::string label = slice_label(s.timestamp);
    const std::string comment = "# config=" + slice_config(cfg, s).dump() + "\n";
    std::ostringstream labels_csv;
    labels_csv << comment << "node_id";
    for (const auto& name : cfg.features) labels_csv << ',' << name;
    labels_csv << "\n";
    for (Index v = 0; v < n; ++v) {
      labels_csv << data.ids[static_cast<std::size_t>(v)];
      for (const auto& l : all_labels) labels_csv << ',' << l[static_cast<std::size_t>(v)];
      labels_csv << "\n";
    }
    std::ostringstream table;
    table << comment << "feature_set,k,inertia,silhouette,ari\n";
    for (const Json& r : rows)
      table << r["feature_set"].get<std::string>() << ',' << cfg.k << ',' << format_double(r["inertia"].get<double>())
            << ',' << format_double(r["silhouette"].get<double>()) << ','
            << (r["ari"].is_null() ? std::string() : format_double(r["ari"].get<double>())) << "\n";
    const fs::path out(cfg.output);
    write_file_atomic(out / ("cluster_" + label + "_labels.csv"), labels_csv.str());
    write_file_atomic(out / ("cluster_" + label + ".csv"), table.str());
    return Json{{"slice", s.timestamp}, {"results", rows}};
  });

  Json doc;
  doc["config"] = cfg.to_json();
  doc["slices"] = Json::array();
  for (const auto& o : outcomes) {
    if (!o.ok) continue;
    doc["slices"].push_back(o.summary);
    std::cout << "slice " << slice_label(o.summary["slice"].get<std::string>()) << "\n";
    for (const Json& r : o.summary["results"])
      std::cout << "  " << r["feature_set"].get<std::string>() << " silhouette=" << r["silhouette"]
                << " ari=" << r["ari"] << "\n";
  }
  write_file_atomic(fs::path(cfg.output) / "cluster.json", doc.dump(2) + "\n");
  return report(outcomes);
}

int cmd_synth(const RunConfig& cfg) {
  SynthSpec spec;
  spec.rows = cfg.rows;
  spec.cols = cfg.cols;
  spec.n = cfg.n;
  spec.edge_prob = cfg.edge_prob;
  spec.hub_fraction = cfg.hub_fraction;
  spec.seed = cfg.seed;
  const std::string comment = "config=" + cfg.to_json().dump();
  const fs::path out(cfg.output);
  std::vector<fs::path> written;

  if (cfg.kind == "grid") {
    spec.kind = SynthKind::grid;
    const FlowGraph g = grid_network(spec);
    FlowStrengths strengths;
    strengths.noise = cfg.noise;
    const PlantedFlow planted = planted_flow(g, strengths, Phase::morning, cfg.seed);
    // Evening volumes are the morning ones reversed, so net flow and potential flip exactly.
    const DirectedVolumes am = volumes_from_net_flow(spec.base_volume * planted.flow, spec.base_volume, cfg.seed);

    constexpr double kDetectorOffset = 3.0;
    std::vector<DetectorPoint> detectors;
    std::vector<RoadSegment> segments;
    const Index m = g.edge_count();
    for (Index e = 0; e < m; ++e) {
      const Point2& a = g.coords()[static_cast<std::size_t>(g.edge(e).tail)];
      const Point2& b = g.coords()[static_cast<std::size_t>(g.edge(e).head)];
      const double len = std::hypot(b.x - a.x, b.y - a.y);
      const double ux = (b.x - a.x) / len;
      const double uy = (b.y - a.y) / len;
      const std::string seg = padded(e, m, "s");
      const std::string da = padded(e, m, "d") + "a";
      const std::string db = padded(e, m, "d") + "b";
      detectors.push_back({da, a.x + kDetectorOffset * ux, a.y + kDetectorOffset * uy, seg});
      detectors.push_back({db, b.x - kDetectorOffset * ux, b.y - kDetectorOffset * uy, seg});
    }
    for (const char* ts : {"08:30", "18:30"}) {
      const bool evening = std::string(ts) == "18:30";
      for (Index e = 0; e < m; ++e)
        segments.push_back({padded(e, m, "s"), padded(e, m, "d") + "a", padded(e, m, "d") + "b",
                            evening ? am.rev[e] : am.fwd[e], evening ? am.fwd[e] : am.rev[e], ts});
    }
    write_detectors(out / "detectors.csv", detectors, comment);
    write_segments(out / "segments.csv", segments, comment);
    written = {out / "detectors.csv", out / "segments.csv"};
  } else if (cfg.kind == "er_od") {
    spec.kind = SynthKind::er_od;
    FlowDataset data;
    for (Index v = 0; v < spec.n; ++v) data.external_ids.push_back(padded(v, spec.n, "n"));
    for (Phase ph : {Phase::morning, Phase::evening}) {
      OdSample od = er_od_graph(spec, ph);
      data.slices.push_back({ph == Phase::morning ? "08:30" : "18:30", std::move(od.graph), od.fwd, od.rev});
    }
    write_edge_flows(out / "od.csv", data, Schema::od, comment);
    written = {out / "od.csv"};
  } else if (cfg.kind == "community") {
    spec.kind = SynthKind::grid;
    FlowGraph g = grid_network(spec);
    const std::vector<Index> labels = checkerboard_labels(spec.rows, spec.cols);
    const DirectedVolumes vol = planted_community_flows(g, labels, cfg.delta, cfg.seed, spec.base_volume);
    FlowDataset data;
    for (Index v = 0; v < g.node_count(); ++v) data.external_ids.push_back(padded(v, g.node_count(), "n"));
    data.slices.push_back({"", std::move(g), vol.fwd, vol.rev});
    write_edge_flows(out / "flows.csv", data, Schema::bidirectional, comment);
    std::ostringstream os;
    os << "# " << comment << "\nnode_id,label\n";
    for (std::size_t v = 0; v < labels.size(); ++v) os << data.external_ids[v] << ',' << labels[v] << "\n";
    write_file_atomic(out / "labels.csv", os.str());
    written = {out / "flows.csv", out / "labels.csv"};
  } else {
    throw InvalidInput("unknown synth kind '" + cfg.kind + "'; allowed: grid|er_od|community");
  }
  for (const auto& p : written) std::cout << "wrote " << p.string() << "\n";
  return kOk;
}

int run(int argc, const char* const* argv) {
  CLI::App app{"Hodge decomposition, potential metrics and flow-aware clustering for traffic networks", "hodgeflow"};
  app.require_subcommand(1);
  RunConfig cfg;

  std::string schema = "od", ids = "lexicographic", format = "json", solver = "cg", variant = "ratio_cut";
  std::optional<Index> struct_dims;
  std::optional<double> sigma, sigma_d;

  auto analysis = [&](CLI::App* sub) {
    sub->add_option("--input", cfg.input, "Edge flow CSV, or segments CSV with --detectors")->required();
    sub->add_option("--detectors", cfg.detectors, "Detector CSV; switches input to road segments");
    sub->add_flag("--latlon", cfg.latlon, "Detector coordinates are lon/lat degrees");
    sub->add_option("--output", cfg.output, "Output directory")->capture_default_str();
    sub->add_option("--schema", schema, "Edge flow schema")->check(CLI::IsMember({"od", "bidirectional"}))->capture_default_str();
    sub->add_option("--ids", ids, "Node id ordering")->check(CLI::IsMember({"lexicographic", "numeric"}))->capture_default_str();
    sub->add_option("--solver", solver, "Potential solver")->check(CLI::IsMember({"dense", "cg"}))->capture_default_str();
    sub->add_option("--tol", cfg.tol, "Relative residual tolerance")->check(CLI::PositiveNumber)->capture_default_str();
    sub->add_option("--seed", cfg.seed, "Random seed")->capture_default_str();
    sub->add_option("--radius", cfg.radius, "Detector merge radius in meters")->check(CLI::PositiveNumber)->capture_default_str();
    sub->add_option("--slices", cfg.slices, "Timestamp range FROM..TO (HH:MM, inclusive)");
    sub->add_option("--jobs", cfg.jobs, "Slices processed in parallel")->check(CLI::Range(1, 1024))->capture_default_str();
  };

  CLI::App* decompose = app.add_subcommand("decompose", "Hodge decomposition per slice");
  analysis(decompose);
  decompose->add_option("--format", format, "Export format")->check(CLI::IsMember({"json", "csv", "geojson"}))->capture_default_str();

  CLI::App* metrics = app.add_subcommand("metrics", "Potential/divergence variance metrics per slice");
  analysis(metrics);

  CLI::App* cluster = app.add_subcommand("cluster", "Spectral clustering with flow features");
  analysis(cluster);
  cluster->add_option("--k", cfg.k, "Number of clusters")->capture_default_str();
  cluster->add_option("--struct-dims", struct_dims, "Structural embedding dimension (default: k)");
  cluster->add_option("--features", cfg.features, "Feature sets: " + feature_set_names() + "|kernel")
      ->delimiter(',')
      ->capture_default_str();
  cluster->add_option("--labels", cfg.labels, "Ground-truth labels CSV (node_id,label) for ARI");
  cluster->add_option("--variant", variant, "Cut objective for the kernel path")
      ->check(CLI::IsMember({"ratio_cut", "normalized_cut"}))
      ->capture_default_str();
  cluster->add_option("--sigma", sigma, "Volume kernel bandwidth (default: median mean volume)")->check(CLI::PositiveNumber);
  cluster->add_option("--sigma-d", sigma_d, "Distance kernel bandwidth (default: median edge length)")->check(CLI::PositiveNumber);
  cluster->add_option("--alpha", cfg.alpha, "Flow weight in the flow/distance blend")->check(CLI::Range(0.0, 1.0))->capture_default_str();

  CLI::App* synth = app.add_subcommand("synth", "Write synthetic fixtures");
  synth->add_option("--kind", cfg.kind, "grid|er_od|community")->check(CLI::IsMember({"grid", "er_od", "community"}))->capture_default_str();
  synth->add_option("--output", cfg.output, "Output directory")->capture_default_str();
  synth->add_option("--seed", cfg.seed, "Random seed")->capture_default_str();
  synth->add_option("--rows", cfg.rows, "Grid rows")->capture_default_str();
  synth->add_option("--cols", cfg.cols, "Grid columns")->capture_default_str();
  synth->add_option("--n", cfg.n, "er_od node count")->capture_default_str();
  synth->add_option("--p", cfg.edge_prob, "er_od edge probability")->capture_default_str();
  synth->add_option("--hub-fraction", cfg.hub_fraction, "er_od hub fraction")->capture_default_str();
  synth->add_option("--noise", cfg.noise, "grid edge noise sigma")->check(CLI::NonNegativeNumber)->capture_default_str();
  synth->add_option("--delta", cfg.delta, "community skew delta")->check(CLI::NonNegativeNumber)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsageError;
  }

  cfg.command = app.get_subcommands().front()->get_name();
  cfg.schema = schema == "od" ? Schema::od : Schema::bidirectional;
  cfg.ids = ids == "numeric" ? IdPolicy::numeric : IdPolicy::lexicographic;
  cfg.format = format == "csv" ? ExportFormat::csv : format == "geojson" ? ExportFormat::geojson : ExportFormat::json;
  cfg.solver = solver == "dense" ? SolverMethod::dense_pseudoinverse : SolverMethod::conjugate_gradient;
  cfg.variant = variant == "normalized_cut" ? CutVariant::normalized_cut : CutVariant::ratio_cut;
  cfg.struct_dims = struct_dims;
  cfg.sigma = sigma;
  cfg.sigma_d = sigma_d;

  try {
    if (cfg.command == "decompose") return cmd_decompose(cfg);
    if (cfg.command == "metrics") return cmd_metrics(cfg);
    if (cfg.command == "cluster") return cmd_cluster(cfg);
    return cmd_synth(cfg);
  } catch (const InvalidInput& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsageError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kComputeFailure;
  }
}

}  // namespace hodgeflow::cli
