// Command-line front end. Exit codes: 0 success, 1 validation failure,
// 2 I/O failure. Reports are JSON (stdout unless --report is given); all
// diagnostics go to stderr. Angles in files are radians.

#include "f3d/compare.hpp"
#include "f3d/detection.hpp"
#include "f3d/errors.hpp"
#include "f3d/generator.hpp"
#include "f3d/io.hpp"
#include "f3d/losses.hpp"
#include "f3d/metrics.hpp"
#include "f3d/rotation_bins.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

namespace fs = std::filesystem;
using nlohmann::json;
using namespace f3d;

namespace {

constexpr double kDeg = 180.0 / std::numbers::pi;

// Non-finite values have no JSON form; they are written as null.
json num(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

json read_json_file(const fs::path& path) {
  const Bytes raw = read_file(path);
  try {
    return parse_json(std::string_view(reinterpret_cast<const char*>(raw.data()), raw.size()));
  } catch (const ParseError& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
}

FactoredScene load_scene(const fs::path& path) {
  try {
    return read_scene(path);
  } catch (const ParseError& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
}

void emit(const json& report, const std::string& path) {
  const std::string text = report.dump(2) + "\n";
  if (path.empty() || path == "-") {
    std::cout << text;
  } else {
    write_file_atomic(path, text);
  }
}

void emit_csv(const std::string& text, const std::string& path) {
  if (!path.empty()) write_file_atomic(path, text);
}

/// Runs fn(i) for i in [0, n) on up to `jobs` threads. Callers write results
/// by index so output order never depends on scheduling.
template <typename F>
void parallel_for(std::size_t n, int jobs, F&& fn) {
  const std::size_t workers = std::clamp<std::size_t>(jobs > 0 ? jobs : 1, 1, std::max<std::size_t>(n, 1));
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i; !failed && (i = next++) < n;) {
        try {
          fn(i);
        } catch (...) {
          if (!failed.exchange(true)) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

GeneratorConfig base_config(const std::string& config_path, std::uint64_t seed, int downsample) {
  GeneratorConfig cfg = config_path.empty() ? GeneratorConfig{} : generator_config_from_json(read_json_file(config_path));
  cfg.seed = seed;
  if (downsample > 1) cfg.camera = cfg.camera.downsampled(downsample);
  cfg.validate();
  return cfg;
}

// Scene i of a seeded batch uses seed + i.
GeneratedScene generate_nth(GeneratorConfig cfg, std::size_t i) {
  cfg.seed += i;
  return generate_scene(cfg);
}

void read_quaternion_list(const fs::path& path, std::vector<UnitQuaternion>& out) {
  const json doc = read_json_file(path);
  if (!doc.is_array()) throw ParseError(path.string() + ": expected an array of [w, x, y, z]", "/");
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const json& q = doc[i];
    const std::string where = "/" + std::to_string(i);
    if (!q.is_array() || q.size() != 4 || !std::all_of(q.begin(), q.end(), [](const json& v) { return v.is_number(); })) {
      throw ParseError(path.string() + ": expected [w, x, y, z]", where);
    }
    try {
      out.emplace_back(q[0].get<double>(), q[1].get<double>(), q[2].get<double>(), q[3].get<double>());
    } catch (const ParseError&) {
      throw;
    } catch (const ValidationError& e) {
      throw ParseError(path.string() + ": " + e.what(), where);
    }
  }
}

json errors_json(const ComponentErrors& e) {
  return {{"shape_iou", num(e.shape_iou)},
          {"rotation", num(e.rotation)},
          {"translation", num(e.translation)},
          {"scale", num(e.scale)},
          {"box_iou", e.box_iou ? num(*e.box_iou) : json(nullptr)}};
}

json summary_json(const SummaryStats& s) {
  return {{"median", num(s.median)},
          {"fraction_within", s.fraction_within},
          {"threshold", s.threshold},
          {"direction", s.direction == ThresholdDirection::below ? "below" : "above"},
          {"count", s.count}};
}

json thresholds_json(const ThresholdTuple& t) {
  auto opt = [](const std::optional<double>& v) { return v ? json(*v) : json(nullptr); };
  return {{"box_iou", opt(t.box_iou)},
          {"shape_iou", opt(t.shape_iou)},
          {"rotation", opt(t.rotation)},
          {"translation", opt(t.translation)},
          {"scale", opt(t.scale)}};
}

void require_same_count(const std::vector<std::string>& pred, const std::vector<std::string>& gt) {
  if (pred.size() != gt.size()) {
    throw ValidationError("--pred and --gt must list the same number of scenes (" + std::to_string(pred.size()) +
                          " vs " + std::to_string(gt.size()) + ")");
  }
}

// ---------------------------------------------------------------------------

struct GenArgs {
  std::uint64_t seed = 0;
  int count = 1;
  std::string out_dir;
  std::string config;
  int downsample = 1;
  bool external_assets = false;
  int jobs = 1;
  std::string report;
};

int run_gen(const GenArgs& a) {
  const GeneratorConfig cfg = base_config(a.config, a.seed, a.downsample);
  fs::create_directories(a.out_dir);
  std::vector<json> entries(static_cast<std::size_t>(a.count));
  parallel_for(entries.size(), a.jobs, [&](std::size_t i) {
    const GeneratedScene g = generate_nth(cfg, i);
    char name[32];
    std::snprintf(name, sizeof name, "scene_%04zu.json", i);
    write_scene(fs::path(a.out_dir) / name, g.scene, a.external_assets);
    entries[i] = {{"file", name},
                  {"seed", cfg.seed + i},
                  {"objects", g.scene.objects.size()},
                  {"requested_objects", g.requested_objects},
                  {"placement_shortfall", g.placement_shortfall}};
  });
  emit({{"command", "gen"}, {"seed", a.seed}, {"count", a.count}, {"config", generator_config_to_json(cfg)},
        {"scenes", entries}},
       a.report);
  return 0;
}

struct RenderArgs {
  std::string scene;
  std::string kind = "depth";
  std::string mode = "analytic";
  std::string out;
  double tau = kDefaultTau;
  std::string report;
};

int run_render(const RenderArgs& a) {
  const FactoredScene scene = load_scene(a.scene);
  std::size_t nonempty = 0;
  int width = scene.camera.width, height = scene.camera.height;
  if (a.kind == "layout") {
    Layout layout;
    if (scene.layout) {
      layout = *scene.layout;
    } else if (scene.room) {
      layout = room_layout(scene.camera, *scene.room);
    } else {
      throw ValidationError("scene has neither a layout nor a room");
    }
    nonempty = std::count_if(layout.disparity.begin(), layout.disparity.end(), [](double d) { return d > 0.0; });
    write_layout_pfm(a.out, layout);
  } else {
    const DepthMap depth = a.mode == "voxel" ? render_depth_voxel(scene, a.tau) : render_depth_analytic(scene, true);
    nonempty = std::count_if(depth.depth.begin(), depth.depth.end(), [](double d) { return d > 0.0; });
    if (a.kind == "disparity") {
      write_layout_pfm(a.out, depth_to_disparity(depth));
    } else {
      write_depth_pfm(a.out, depth);
    }
  }
  emit({{"command", "render"}, {"kind", a.kind}, {"mode", a.kind == "layout" ? "layout" : a.mode},
        {"width", width}, {"height", height}, {"nonempty_pixels", nonempty}},
       a.report);
  return 0;
}

struct ConvertArgs {
  std::string scene;
  std::string depth;
  std::string camera;
  std::string to;
  std::string out;
  bool analytic = false;
  bool include_layout = false;
  double tau = kDefaultTau;
  std::string report;
};

int run_convert(const ConvertArgs& a) {
  json report = {{"command", "convert"}, {"to", a.to}};
  if (!a.depth.empty()) {
    Camera cam;
    if (!a.camera.empty()) {
      cam = camera_from_json(read_json_file(a.camera));
    } else if (!a.scene.empty()) {
      cam = load_scene(a.scene).camera;
    } else {
      throw ValidationError("converting a depth map needs --camera or --scene");
    }
    const DepthMap depth = read_depth_pfm(a.depth, cam);
    const std::vector<Vec3> points = depth_to_pointcloud(depth);
    report["points"] = points.size();
    if (a.to == "voxels") {
      const PointVoxelization v = pointcloud_to_voxels(points);
      write_fvox(a.out, v.grid);
      report["occupied"] = v.grid.count_occupied(a.tau);
      report["ignored_points"] = v.ignored_points;
    } else if (a.to == "points") {
      std::string csv = "x,y,z\n";
      for (const Vec3& p : points) csv += fmt(p.x()) + "," + fmt(p.y()) + "," + fmt(p.z()) + "\n";
      write_file_atomic(a.out, csv);
    } else {
      throw ValidationError("a depth map converts to 'voxels' or 'points', not '" + a.to + "'");
    }
  } else {
    if (a.scene.empty()) throw ValidationError("convert needs --scene or --depth");
    const FactoredScene scene = load_scene(a.scene);
    if (a.to == "scene-voxels") {
      ComposeOptions opt;
      opt.tau = a.tau;
      opt.include_layout = a.include_layout;
      const VoxelGrid grid = a.analytic ? analytic_scene_voxels(scene) : compose_scene_voxels(scene, GridSpec::scene_default(), opt);
      write_fvox(a.out, grid);
      report["occupied"] = grid.count_occupied(a.tau);
    } else if (a.to == "depth") {
      const DepthMap depth = render_depth_voxel(scene, a.tau);
      write_depth_pfm(a.out, depth);
      report["nonempty_pixels"] = std::count_if(depth.depth.begin(), depth.depth.end(), [](double d) { return d > 0.0; });
    } else {
      throw ValidationError("a scene converts to 'scene-voxels' or 'depth', not '" + a.to + "'");
    }
  }
  emit(report, a.report);
  return 0;
}

struct EvalArgs {
  std::vector<std::string> pred;
  std::vector<std::string> gt;
  double tau = kDefaultTau;
  std::string report;
  std::string csv;
  int jobs = 1;
};

int run_eval(const EvalArgs& a) {
  require_same_count(a.pred, a.gt);
  std::vector<std::vector<ComponentErrors>> per_scene(a.pred.size());
  parallel_for(a.pred.size(), a.jobs, [&](std::size_t i) {
    const FactoredScene pred = load_scene(a.pred[i]);
    const FactoredScene gt = load_scene(a.gt[i]);
    if (pred.objects.size() != gt.objects.size()) {
      throw ValidationError(a.pred[i] + ": object count differs from " + a.gt[i] + "; objects pair by index");
    }
    for (std::size_t k = 0; k < gt.objects.size(); ++k)
      per_scene[i].push_back(component_errors(pred.objects[k], gt.objects[k], a.tau));
  });

  json objects = json::array();
  std::vector<double> shape, rot, trans, scale, box;
  std::string csv = "scene,object,shape_iou,rotation,translation,scale,box_iou\n";
  for (std::size_t i = 0; i < per_scene.size(); ++i)
    for (std::size_t k = 0; k < per_scene[i].size(); ++k) {
      const ComponentErrors& e = per_scene[i][k];
      json row = errors_json(e);
      row["scene"] = i;
      row["object"] = k;
      objects.push_back(row);
      shape.push_back(e.shape_iou);
      rot.push_back(e.rotation);
      trans.push_back(e.translation);
      scale.push_back(e.scale);
      if (e.box_iou) box.push_back(*e.box_iou);
      csv += std::to_string(i) + "," + std::to_string(k) + "," + fmt(e.shape_iou) + "," + fmt(e.rotation) + "," +
             fmt(e.translation) + "," + fmt(e.scale) + "," + (e.box_iou ? fmt(*e.box_iou) : "") + "\n";
    }
  if (shape.empty()) throw ValidationError("no objects to evaluate");

  json summary = {
      {"shape_iou", summary_json(summarize(shape, DefaultThresholds::shape_iou, ThresholdDirection::above))},
      {"rotation", summary_json(summarize(rot, DefaultThresholds::rotation, ThresholdDirection::below))},
      {"translation", summary_json(summarize(trans, DefaultThresholds::translation, ThresholdDirection::below))},
      {"scale", summary_json(summarize(scale, DefaultThresholds::scale, ThresholdDirection::below))},
      {"box_iou", box.empty() ? json(nullptr)
                              : summary_json(summarize(box, DefaultThresholds::box_iou, ThresholdDirection::above))}};
  emit({{"command", "eval"}, {"units", {{"rotation", "rad"}, {"translation", "m"}, {"scale", "log2"}}},
        {"objects", objects}, {"summary", summary}},
       a.report);
  emit_csv(csv, a.csv);

  if (!a.report.empty() && a.report != "-") {
    const auto s = summary;
    std::printf("objects: %zu\n", shape.size());
    std::printf("shape IoU     median %.4f   within %.1f%%\n", s["shape_iou"]["median"].get<double>(),
                100 * s["shape_iou"]["fraction_within"].get<double>());
    std::printf("rotation      median %.2f deg (human-readable; reports use rad)   within %.1f%%\n",
                kDeg * s["rotation"]["median"].get<double>(), 100 * s["rotation"]["fraction_within"].get<double>());
    std::printf("translation   median %.4f m   within %.1f%%\n", s["translation"]["median"].get<double>(),
                100 * s["translation"]["fraction_within"].get<double>());
    std::printf("scale         median %.4f   within %.1f%%\n", s["scale"]["median"].get<double>(),
                100 * s["scale"]["fraction_within"].get<double>());
  }
  return 0;
}

struct ApArgs {
  std::vector<std::string> pred;
  std::vector<std::string> gt;
  double box = DefaultThresholds::box_iou;
  double shape = DefaultThresholds::shape_iou;
  double rot = DefaultThresholds::rotation;
  double trans = DefaultThresholds::translation;
  double scale = DefaultThresholds::scale;
  double tau = kDefaultTau;
  bool per_class = false;
  std::string report;
  std::string csv;
  std::string pr_csv;
};

int run_ap(const ApArgs& a) {
  require_same_count(a.pred, a.gt);
  std::vector<DetectionImage> images;
  for (std::size_t i = 0; i < a.pred.size(); ++i)
    images.push_back({load_scene(a.pred[i]).objects, load_scene(a.gt[i]).objects});
  for (std::size_t i = 0; i < images.size(); ++i)
    for (const SceneObject& d : images[i].detections)
      if (!d.score) throw ValidationError(a.pred[i] + ": every detection needs a score");

  ThresholdTuple base{a.box, a.shape, a.rot, a.trans, a.scale};
  base.validate();
  const EvalOptions options{a.tau, a.per_class};
  const std::vector<ApRow> rows = ap_sweep(images, base, options);
  const EvalOutcome full = evaluate_dataset(images, base, options);

  json jrows = json::array();
  std::string csv = "relaxation,ap\n";
  for (const ApRow& r : rows) {
    jrows.push_back({{"name", r.name}, {"thresholds", thresholds_json(r.thresholds)}, {"ap", r.ap}});
    csv += r.name + "," + fmt(r.ap) + "\n";
  }
  std::string pr = "rank,image,detection,score,true_positive,precision,recall\n";
  for (std::size_t k = 0; k < full.matches.size(); ++k) {
    const DetectionMatch& m = full.matches[k];
    pr += std::to_string(k) + "," + std::to_string(m.image) + "," + std::to_string(m.detection) + "," + fmt(m.score) +
          "," + (m.true_positive ? "1" : "0") + "," + fmt(full.precision[k]) + "," + fmt(full.recall[k]) + "\n";
  }
  std::size_t detections = 0;
  for (const auto& im : images) detections += im.detections.size();
  emit({{"command", "ap"}, {"images", images.size()}, {"detections", detections},
        {"ground_truth", full.num_ground_truth}, {"per_class", a.per_class}, {"thresholds", thresholds_json(base)},
        {"rows", jrows}},
       a.report);
  emit_csv(csv, a.csv);
  emit_csv(pr, a.pr_csv);
  return 0;
}

struct CompareArgs {
  std::vector<std::string> gt;
  std::uint64_t seed = 0;
  int count = 0;
  std::string config;
  int downsample = 1;
  int icp_iterations = 50;
  double icp_tol = 1e-6;
  int jobs = 1;
  std::string report;
  std::string csv;
};

int run_compare(const CompareArgs& a) {
  if (a.gt.empty() == (a.count <= 0)) throw ValidationError("compare-reps takes either --gt files or --count scenes");
  const std::size_t n = a.gt.empty() ? static_cast<std::size_t>(a.count) : a.gt.size();
  const GeneratorConfig cfg = a.gt.empty() ? base_config(a.config, a.seed, a.downsample) : GeneratorConfig{};
  const IcpConfig icp_cfg{a.icp_iterations, a.icp_tol};
  std::vector<SceneComparison> results(n);
  parallel_for(n, a.jobs, [&](std::size_t i) {
    const FactoredScene gt = a.gt.empty() ? generate_nth(cfg, i).scene : load_scene(a.gt[i]);
    results[i] = compare_representations(gt, oracle_representations(gt), icp_cfg);
  });

  static constexpr const char* kTasks[] = {"visible_depth", "scene_iou", "object_fitness", "modal_layout",
                                           "amodal_layout"};
  json scenes = json::array();
  std::array<std::array<std::vector<double>, 5>, 3> pooled;
  for (std::size_t i = 0; i < n; ++i) {
    json entry = {{"scene", i}};
    for (Representation r : kRepresentations) {
      const TaskScores& s = results[i][r];
      json fits = json::array();
      for (double f : s.object_fitness) fits.push_back(num(f));
      entry[std::string(to_string(r))] = {{"visible_depth", num(s.visible_depth)},
                                          {"scene_iou", s.scene_iou},
                                          {"object_fitness", fits},
                                          {"modal_layout", num(s.modal_layout)},
                                          {"amodal_layout", num(s.amodal_layout)}};
      auto& p = pooled[static_cast<std::size_t>(r)];
      p[0].push_back(s.visible_depth);
      p[1].push_back(s.scene_iou);
      p[2].insert(p[2].end(), s.object_fitness.begin(), s.object_fitness.end());
      p[3].push_back(s.modal_layout);
      p[4].push_back(s.amodal_layout);
    }
    scenes.push_back(entry);
  }

  std::string csv = "task,representation,value,cumulative_fraction\n";
  json medians;
  for (Representation r : kRepresentations)
    for (std::size_t t = 0; t < 5; ++t) {
      const auto& values = pooled[static_cast<std::size_t>(r)][t];
      if (values.empty()) continue;
      for (const auto& [v, f] : cumulative_curve(values))
        csv += std::string(kTasks[t]) + "," + std::string(to_string(r)) + "," + fmt(v) + "," + fmt(f) + "\n";
      medians[kTasks[t]][std::string(to_string(r))] =
          num(summarize(values, 0.0, ThresholdDirection::below).median);
    }
  emit({{"command", "compare-reps"}, {"scenes", scenes}, {"medians", medians},
        {"units", {{"visible_depth", "m"}, {"modal_layout", "m"}, {"amodal_layout", "m"}}}},
       a.report);
  emit_csv(csv, a.csv);
  return 0;
}

struct GradArgs {
  std::uint64_t seed = 0;
  int points = 100;
  double tol = 1e-5;
  double step = 1e-6;
  std::string report;
};

int run_grad(const GradArgs& a) {
  const GradCheckReport r = run_gradient_suite(a.seed, a.points, a.tol, a.step);
  json entries = json::array();
  for (const GradCheckEntry& e : r.entries) {
    entries.push_back(
        {{"kernel", e.kernel}, {"points", e.points}, {"max_rel_error", e.max_rel_error}, {"passed", e.passed}});
  }
  emit({{"command", "grad-check"}, {"seed", r.seed}, {"tolerance", r.tolerance}, {"step", r.step},
        {"passed", r.passed()}, {"kernels", entries}},
       a.report);
  if (!r.passed()) {
    std::cerr << "gradient check failed\n";
    return 1;
  }
  return 0;
}

struct BinsArgs {
  std::string input;
  std::vector<std::string> scenes;
  std::uint64_t seed = 0;
  int bins = kDefaultBinCount;
  int max_iterations = 100;
  std::string out;
  std::string binset;
  std::string report;
};

int run_bins_fit(const BinsArgs& a) {
  std::vector<UnitQuaternion> samples;
  if (!a.input.empty()) read_quaternion_list(a.input, samples);
  for (const std::string& s : a.scenes)
    for (const SceneObject& o : load_scene(s).objects) samples.push_back(o.pose.rotation());
  const BinSet bins = cluster_quaternions(samples, a.seed, {a.bins, a.max_iterations});
  json doc = binset_to_json(bins);
  doc["samples"] = samples.size();
  emit(doc, a.out);
  return 0;
}

int run_bins_assign(const BinsArgs& a) {
  const BinSet bins = binset_from_json(read_json_file(a.binset));
  std::vector<UnitQuaternion> samples;
  read_quaternion_list(a.input, samples);
  json assignments = json::array();
  for (const UnitQuaternion& q : samples) assignments.push_back(assign_bin(q, bins));
  emit({{"command", "bins-assign"}, {"bins", bins.representatives.size()}, {"assignments", assignments}}, a.report);
  return 0;
}

struct AssignArgs {
  std::string proposals;
  std::string scene;
  double fg = 0.7;
  double bg = 0.3;
  std::string report;
};

int run_assign(const AssignArgs& a) {
  const json doc = read_json_file(a.proposals);
  if (!doc.is_array()) throw ParseError(a.proposals + ": expected an array of proposals", "/");
  std::vector<Box2D> boxes;
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const std::string where = "/" + std::to_string(i);
    const json& p = doc[i];
    const json& b = p.is_object() && p.contains("box") ? p["box"] : p;
    if (!b.is_array() || b.size() != 4 || !std::all_of(b.begin(), b.end(), [](const json& v) { return v.is_number(); })) {
      throw ParseError(a.proposals + ": expected a box [xmin, ymin, xmax, ymax]", where);
    }
    boxes.push_back({b[0].get<double>(), b[1].get<double>(), b[2].get<double>(), b[3].get<double>()});
    if (!(boxes.back().xmax > boxes.back().xmin && boxes.back().ymax > boxes.back().ymin)) {
      throw ParseError(a.proposals + ": box has no area", where);
    }
  }
  const FactoredScene scene = load_scene(a.scene);
  std::vector<Box2D> gt;
  for (std::size_t k = 0; k < scene.objects.size(); ++k) {
    if (!scene.objects[k].box2d) throw ValidationError(a.scene + ": object " + std::to_string(k) + " has no 2D box");
    gt.push_back(*scene.objects[k].box2d);
  }
  const auto labels = assign_proposals(boxes, gt, {a.fg, a.bg});
  json out = json::array();
  for (const ProposalLabel& l : labels) {
    const char* kind = l.kind == ProposalKind::foreground ? "foreground"
                       : l.kind == ProposalKind::background ? "background"
                                                              : "ignore";
    out.push_back({{"kind", kind}, {"gt", l.gt ? json(*l.gt) : json(nullptr)}, {"max_iou", l.max_iou}});
  }
  emit({{"command", "assign"}, {"labels", out}}, a.report);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Factored 3D scene toolkit"};
  app.require_subcommand(1);

  GenArgs gen;
  auto* gen_cmd = app.add_subcommand("gen", "Generate synthetic factored scenes");
  gen_cmd->add_option("--seed", gen.seed, "Base seed; scene i uses seed + i");
  gen_cmd->add_option("--count", gen.count, "Number of scenes")->check(CLI::PositiveNumber);
  gen_cmd->add_option("--out-dir", gen.out_dir, "Output directory")->required();
  gen_cmd->add_option("--config", gen.config, "Generator config JSON");
  gen_cmd->add_option("--downsample", gen.downsample, "Integer camera downsampling factor")->check(CLI::PositiveNumber);
  gen_cmd->add_flag("--external-assets", gen.external_assets, "Write voxels and layouts as FVOX/PFM files");
  gen_cmd->add_option("--jobs", gen.jobs, "Worker threads")->check(CLI::PositiveNumber);
  gen_cmd->add_option("--report", gen.report, "Report path (default stdout)");

  RenderArgs render;
  auto* render_cmd = app.add_subcommand("render", "Render depth, disparity or layout from a scene");
  render_cmd->add_option("--scene", render.scene)->required();
  render_cmd->add_option("--kind", render.kind)->check(CLI::IsMember({"depth", "disparity", "layout"}));
  render_cmd->add_option("--mode", render.mode)->check(CLI::IsMember({"analytic", "voxel"}));
  render_cmd->add_option("--out", render.out, "Output PFM")->required();
  render_cmd->add_option("--tau", render.tau)->check(CLI::Range(0.0, 1.0));
  render_cmd->add_option("--report", render.report);

  ConvertArgs convert;
  auto* convert_cmd = app.add_subcommand("convert", "Convert between scene, depth, voxel and point representations");
  convert_cmd->add_option("--scene", convert.scene, "Factored scene JSON");
  convert_cmd->add_option("--depth", convert.depth, "Depth PFM");
  convert_cmd->add_option("--camera", convert.camera, "Camera JSON for --depth");
  convert_cmd->add_option("--to", convert.to)->required()->check(
      CLI::IsMember({"scene-voxels", "depth", "voxels", "points"}));
  convert_cmd->add_option("--out", convert.out)->required();
  convert_cmd->add_flag("--analytic", convert.analytic, "Voxelize analytic parts instead of resampling shapes");
  convert_cmd->add_flag("--include-layout", convert.include_layout, "Add layout shells to scene voxels");
  convert_cmd->add_option("--tau", convert.tau)->check(CLI::Range(0.0, 1.0));
  convert_cmd->add_option("--report", convert.report);

  EvalArgs eval;
  auto* eval_cmd = app.add_subcommand("eval", "Per-object component errors and summaries");
  eval_cmd->add_option("--pred", eval.pred)->required();
  eval_cmd->add_option("--gt", eval.gt)->required();
  eval_cmd->add_option("--tau", eval.tau)->check(CLI::Range(0.0, 1.0));
  eval_cmd->add_option("--report", eval.report);
  eval_cmd->add_option("--csv", eval.csv);
  eval_cmd->add_option("--jobs", eval.jobs)->check(CLI::PositiveNumber);

  ApArgs ap;
  auto* ap_cmd = app.add_subcommand("ap", "Detection AP and threshold relaxation sweep");
  ap_cmd->add_option("--pred", ap.pred)->required();
  ap_cmd->add_option("--gt", ap.gt)->required();
  ap_cmd->add_option("--box", ap.box);
  ap_cmd->add_option("--shape", ap.shape);
  ap_cmd->add_option("--rot", ap.rot, "Radians");
  ap_cmd->add_option("--trans", ap.trans, "Meters");
  ap_cmd->add_option("--scale", ap.scale, "log2 units");
  ap_cmd->add_option("--tau", ap.tau)->check(CLI::Range(0.0, 1.0));
  ap_cmd->add_flag("--per-class", ap.per_class);
  ap_cmd->add_option("--report", ap.report);
  ap_cmd->add_option("--csv", ap.csv);
  ap_cmd->add_option("--pr-csv", ap.pr_csv, "Precision-recall of the full tuple");

  CompareArgs cmp;
  auto* cmp_cmd = app.add_subcommand("compare-reps", "Score factored, depth and voxel representations");
  cmp_cmd->add_option("--gt", cmp.gt, "Ground-truth scenes");
  cmp_cmd->add_option("--seed", cmp.seed);
  cmp_cmd->add_option("--count", cmp.count, "Generate this many scenes instead of --gt");
  cmp_cmd->add_option("--config", cmp.config);
  cmp_cmd->add_option("--downsample", cmp.downsample)->check(CLI::PositiveNumber);
  cmp_cmd->add_option("--icp-iterations", cmp.icp_iterations)->check(CLI::PositiveNumber);
  cmp_cmd->add_option("--icp-tol", cmp.icp_tol);
  cmp_cmd->add_option("--jobs", cmp.jobs)->check(CLI::PositiveNumber);
  cmp_cmd->add_option("--report", cmp.report);
  cmp_cmd->add_option("--csv", cmp.csv, "Cumulative error curves");

  GradArgs grad;
  auto* grad_cmd = app.add_subcommand("grad-check", "Finite-difference check of every loss kernel");
  grad_cmd->add_option("--seed", grad.seed);
  grad_cmd->add_option("--points", grad.points)->check(CLI::PositiveNumber);
  grad_cmd->add_option("--tol", grad.tol);
  grad_cmd->add_option("--step", grad.step);
  grad_cmd->add_option("--report", grad.report);

  BinsArgs bins;
  auto* bins_cmd = app.add_subcommand("bins", "Rotation bins");
  bins_cmd->require_subcommand(1);
  auto* fit_cmd = bins_cmd->add_subcommand("fit", "Cluster quaternions into bins");
  fit_cmd->add_option("--input", bins.input, "JSON array of [w, x, y, z]");
  fit_cmd->add_option("--scenes", bins.scenes, "Scenes whose object rotations are clustered");
  fit_cmd->add_option("--seed", bins.seed);
  fit_cmd->add_option("--bins", bins.bins)->check(CLI::PositiveNumber);
  fit_cmd->add_option("--max-iterations", bins.max_iterations)->check(CLI::PositiveNumber);
  fit_cmd->add_option("--out", bins.out, "Bin set JSON (default stdout)");
  auto* assign_bin_cmd = bins_cmd->add_subcommand("assign", "Assign quaternions to bins");
  assign_bin_cmd->add_option("--binset", bins.binset)->required();
  assign_bin_cmd->add_option("--input", bins.input)->required();
  assign_bin_cmd->add_option("--report", bins.report);

  AssignArgs assign;
  auto* assign_cmd = app.add_subcommand("assign", "Label 2D proposals against ground-truth boxes");
  assign_cmd->add_option("--proposals", assign.proposals, "JSON array of boxes or {box, score}")->required();
  assign_cmd->add_option("--scene", assign.scene)->required();
  assign_cmd->add_option("--fg", assign.fg);
  assign_cmd->add_option("--bg", assign.bg);
  assign_cmd->add_option("--report", assign.report);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (gen_cmd->parsed()) return run_gen(gen);
    if (render_cmd->parsed()) return run_render(render);
    if (convert_cmd->parsed()) return run_convert(convert);
    if (eval_cmd->parsed()) return run_eval(eval);
    if (ap_cmd->parsed()) return run_ap(ap);
    if (cmp_cmd->parsed()) return run_compare(cmp);
    if (grad_cmd->parsed()) return run_grad(grad);
    if (fit_cmd->parsed()) {
      if (bins.input.empty() && bins.scenes.empty()) throw ValidationError("bins fit needs --input or --scenes");
      return run_bins_fit(bins);
    }
    if (assign_bin_cmd->parsed()) return run_bins_assign(bins);
    if (assign_cmd->parsed()) return run_assign(assign);
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
