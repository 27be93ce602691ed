// Command line front end for the single-view reconstruction and grasp
// planning pipeline. Subcommands mirror the pipeline stages so every
// intermediate artifact can be produced and inspected independently.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "graspkit/grid_io.hpp"
#include "graspkit/mesh_io.hpp"
#include "graspkit/mise.hpp"
#include "graspkit/pipeline.hpp"
#include "graspkit/plan_io.hpp"
#include "graspkit/tsdf.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace graspkit;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitStage = 3;

fs::path resolve_out(const std::string& out_flag) {
  fs::path out = out_flag.empty() ? fs::path(".") : fs::path(out_flag);
  if (out.is_relative()) {
    if (const char* root = std::getenv("GRASPKIT_OUT_ROOT")) {
      out = fs::path(root) / out;
    }
  }
  fs::create_directories(out);
  return out;
}

void apply_config_json(const json& j, PipelineConfig& cfg) {
  if (j.contains("scene")) {
    const json& s = j["scene"];
    if (s.contains("category")) cfg.scene.category = category_from_string(s["category"]);
    cfg.scene.seed = s.value("seed", cfg.scene.seed);
    cfg.scene.randomize_params = s.value("randomize_params", cfg.scene.randomize_params);
    cfg.scene.object_x = s.value("object_x", cfg.scene.object_x);
    cfg.scene.object_y = s.value("object_y", cfg.scene.object_y);
    cfg.scene.object_yaw = s.value("object_yaw", cfg.scene.object_yaw);
    if (s.contains("params")) {
      const json& p = s["params"];
      ShapeParams& sp = cfg.scene.params;
      sp.radius = p.value("radius", sp.radius);
      sp.height = p.value("height", sp.height);
      sp.wall_thickness = p.value("wall_thickness", sp.wall_thickness);
      sp.base_thickness = p.value("base_thickness", sp.base_thickness);
      sp.handle_radius = p.value("handle_radius", sp.handle_radius);
      sp.handle_tube_radius = p.value("handle_tube_radius", sp.handle_tube_radius);
      sp.neck_radius = p.value("neck_radius", sp.neck_radius);
      sp.target_edge = p.value("target_edge", sp.target_edge);
      sp.profile_noise = p.value("profile_noise", sp.profile_noise);
    }
  }
  if (j.contains("camera")) {
    const json& c = j["camera"];
    if (c.contains("position")) {
      cfg.camera.position = Vec3(c["position"][0], c["position"][1], c["position"][2]);
    }
    cfg.camera.yaw = deg_to_rad(c.value("yaw_deg", rad_to_deg(cfg.camera.yaw)));
    cfg.camera.pitch = deg_to_rad(c.value("pitch_deg", rad_to_deg(cfg.camera.pitch)));
    cfg.camera.depth_noise_sigma = c.value("depth_noise_sigma", cfg.camera.depth_noise_sigma);
    CameraIntrinsics& in = cfg.camera.intrinsics;
    in.fx = c.value("fx", in.fx);
    in.fy = c.value("fy", in.fy);
    in.cx = c.value("cx", in.cx);
    in.cy = c.value("cy", in.cy);
    in.width = c.value("width", in.width);
    in.height = c.value("height", in.height);
  }
  if (j.contains("grid")) {
    const json& g = j["grid"];
    cfg.grid.resolution = g.value("resolution", cfg.grid.resolution);
    cfg.grid.voxel_size = g.value("voxel_size", cfg.grid.voxel_size);
    cfg.grid.truncation = g.value("truncation", cfg.grid.truncation);
    if (g.contains("origin")) {
      cfg.grid.origin = Vec3(g["origin"][0], g["origin"][1], g["origin"][2]);
    }
  }
  if (j.contains("completer")) {
    const json& c = j["completer"];
    if (c.contains("strategy")) cfg.completer.strategy = strategy_from_string(c["strategy"]);
    cfg.completer.handle_radius_factor =
        c.value("handle_radius_factor", cfg.completer.handle_radius_factor);
    cfg.completer.base_fill_rows = c.value("base_fill_rows", cfg.completer.base_fill_rows);
  }
  if (j.contains("criterion")) cfg.criterion = criterion_from_string(j["criterion"]);
  if (j.contains("workspace")) {
    const json& w = j["workspace"];
    WorkspaceConfig& ws = cfg.workspace;
    ws.table_height = w.value("table_height", ws.table_height);
    ws.min_side_grasp_z = w.value("min_side_grasp_z", ws.min_side_grasp_z);
    ws.approach_offset = w.value("approach_offset", ws.approach_offset);
    ws.travel_distance = w.value("travel_distance", ws.travel_distance);
    ws.palm_to_fingertip = w.value("palm_to_fingertip", ws.palm_to_fingertip);
    ws.wrist_to_fingertip = w.value("wrist_to_fingertip", ws.wrist_to_fingertip);
    ws.lift_side = w.value("lift_side", ws.lift_side);
    ws.lift_top = w.value("lift_top", ws.lift_top);
    if (w.contains("inclination_threshold_deg")) {
      ws.inclination_threshold = deg_to_rad(w["inclination_threshold_deg"].get<double>());
    }
    if (w.contains("idle_position")) {
      ws.idle_position = Vec3(w["idle_position"][0], w["idle_position"][1],
                              w["idle_position"][2]);
    }
  }
  if (j.contains("metric_samples")) cfg.metric_samples = j["metric_samples"].get<std::size_t>();
  if (j.contains("mise")) {
    const json& m = j["mise"];
    cfg.mise_iso = m.value("iso", cfg.mise_iso);
    cfg.mise_initial_res = m.value("initial_resolution", cfg.mise_initial_res);
    cfg.mise_refinement_steps = m.value("refinement_steps", cfg.mise_refinement_steps);
  }
  if (j.contains("posture_knn")) cfg.posture_knn = j["posture_knn"].get<int>();
}

PipelineConfig load_pipeline_config(const std::string& config_path) {
  PipelineConfig cfg;
  if (config_path.empty()) return cfg;
  std::ifstream is(config_path);
  if (!is) throw InvalidParams("cannot open config: " + config_path);
  json j;
  try {
    is >> j;
  } catch (const std::exception& e) {
    throw InvalidParams("bad config json: " + std::string(e.what()));
  }
  apply_config_json(j, cfg);
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"single-view shape completion and anthropomorphic grasp planning"};
  app.require_subcommand(1);
  app.fallthrough();  // global flags may follow the subcommand name

  std::string config_path, out_flag, completer_flag, criterion_flag;
  std::uint64_t seed = 0;
  bool seed_set = false;
  int jobs = 1;

  app.add_option("--config", config_path, "pipeline config JSON");
  app.add_option("--out", out_flag, "output directory (under $GRASPKIT_OUT_ROOT when relative)");
  app.add_option_function<std::uint64_t>(
         "--seed", [&](std::uint64_t v) { seed = v; seed_set = true; }, "scene seed override");
  app.add_option("--completer", completer_flag, "revolution|mirror|partial");
  app.add_option("--criterion", criterion_flag, "confidence|arbitrary");
  app.add_option("--jobs", jobs, "worker threads for bench");

  // render: synthesize a scene and write depth/mask/ground-truth files.
  auto* cmd_render = app.add_subcommand("render", "render single-view depth of a synthetic scene");

  // complete: depth+mask -> canonical TSDF -> occupancy grids.
  auto* cmd_complete = app.add_subcommand("complete", "voxelize and complete a rendered view");
  std::string in_dir_flag;
  cmd_complete->add_option("--in", in_dir_flag, "directory with depth.f32/mask.u8/poses.json");

  // mesh: occupancy grid -> PLY mesh.
  auto* cmd_mesh = app.add_subcommand("mesh", "extract a mesh from an occupancy grid dump");
  std::string grid_path, mesh_out;
  double iso = 0.5;
  cmd_mesh->add_option("--grid", grid_path, "occupancy .grid file")->required();
  cmd_mesh->add_option("--mesh-out", mesh_out, "output mesh (.ply)");
  cmd_mesh->add_option("--iso", iso, "iso level (0,1)");

  // metrics: two meshes -> shape accuracy JSON (+ optional CSV row).
  auto* cmd_metrics = app.add_subcommand("metrics", "shape accuracy between two meshes");
  std::string pred_path, gt_path, csv_append;
  std::size_t n_samples = 100000;
  std::uint64_t metric_seed = 7;
  cmd_metrics->add_option("pred", pred_path, "predicted mesh")->required();
  cmd_metrics->add_option("gt", gt_path, "ground-truth mesh")->required();
  cmd_metrics->add_option("--samples", n_samples, "surface samples per mesh");
  cmd_metrics->add_option("--metric-seed", metric_seed, "sampling seed");
  cmd_metrics->add_option("--csv", csv_append, "append a CSV row to this file");

  // label: posture transfer / reference export.
  auto* cmd_label = app.add_subcommand("label", "grasping-posture label transfer");
  std::string label_in, label_ref, label_out, make_refs_dir;
  int knn = 5;
  cmd_label->add_option("--mesh", label_in, "canonical mesh to label (.ply)");
  cmd_label->add_option("--reference", label_ref, "labeled reference .ply (default: built-in)");
  cmd_label->add_option("--mesh-out", label_out, "labeled output .ply");
  cmd_label->add_option("--k", knn, "nearest neighbors for the vote");
  cmd_label->add_option("--make-references", make_refs_dir,
                        "write the three built-in labeled references to this directory");
  std::string label_category = "cup";
  cmd_label->add_option("--category", label_category, "cup|bottle|bowl");

  // plan: labeled+confident base-frame mesh -> grasp plan JSON (+ sim).
  auto* cmd_plan = app.add_subcommand("plan", "select a grasp and plan waypoints");
  std::string plan_mesh, plan_object;
  cmd_plan->add_option("--mesh", plan_mesh, "labeled base-frame mesh (.ply)")->required();
  cmd_plan->add_option("--object", plan_object, "collision mesh for simulation (.ply/.obj)");

  // pipeline: everything end to end.
  auto* cmd_pipeline = app.add_subcommand("pipeline", "run the full pipeline");

  // bench: seeded suite, report JSON + CSV.
  auto* cmd_bench = app.add_subcommand("bench", "run a seeded benchmark suite");
  std::string bench_category = "cup";
  int bench_objects = 5, bench_trials = 10;
  cmd_bench->add_option("--category", bench_category, "cup|bottle|bowl");
  cmd_bench->add_option("--objects", bench_objects, "object instances");
  cmd_bench->add_option("--trials", bench_trials, "poses per object");

  CLI11_PARSE(app, argc, argv);

  try {
    PipelineConfig cfg = load_pipeline_config(config_path);
    if (seed_set) cfg.scene.seed = seed;
    if (!completer_flag.empty()) cfg.completer.strategy = strategy_from_string(completer_flag);
    if (!criterion_flag.empty()) cfg.criterion = criterion_from_string(criterion_flag);

    try {
      if (cmd_render->parsed() || cmd_pipeline->parsed() || cmd_complete->parsed()) {
        cfg.out_dir = resolve_out(out_flag);
      }

      if (cmd_render->parsed()) {
        // Reuse the pipeline scene synthesis, then keep only capture files.
        const ShapeParams params =
            cfg.scene.randomize_params ? randomized_params(cfg.scene.category, cfg.scene.seed)
                                       : cfg.scene.params;
        const TriMesh object = generate_object(cfg.scene.category, params, cfg.scene.seed);
        const Aabb box = bounding_box(object);
        SimilarityPose pose;
        pose.rotation = Rotation3::about_z(cfg.scene.object_yaw);
        pose.translation = Vec3(cfg.scene.object_x, cfg.scene.object_y,
                                cfg.workspace.table_height - box.lo.z());
        const Frame cam = camera_frame(cfg.camera.position, cfg.camera.yaw, cfg.camera.pitch);
        RenderOptions ropts;
        ropts.depth_noise_sigma = cfg.camera.depth_noise_sigma;
        ropts.noise_seed = cfg.scene.seed;
        const auto [depth, mask] = render_depth(object, pose, cam, cfg.camera.intrinsics, ropts);
        save_depth(depth, cfg.camera.intrinsics, cfg.out_dir / "depth.f32");
        save_mask(mask, cfg.out_dir / "mask.u8");
        save_obj(transformed(object, pose), cfg.out_dir / "object_base.obj");

        json poses;
        const double s0 = canonical_scale(object);
        const Mat3 r_obj = pose.rotation.matrix();
        const Vec3 t = s0 * (r_obj.transpose() * (cam.origin - pose.translation));
        const Mat3 r = r_obj.transpose() * cam.axes.matrix();
        json rows = json::array();
        for (int i = 0; i < 3; ++i) rows.push_back({r(i, 0), r(i, 1), r(i, 2)});
        poses["cam_to_cano"] = {{"scale", s0},
                                {"rotation_row_major", rows},
                                {"translation", {t.x(), t.y(), t.z()}}};
        std::ofstream os(cfg.out_dir / "poses.json");
        os << poses.dump(2) << "\n";
        std::cout << "wrote " << (cfg.out_dir / "depth.f32").string() << "\n";
      } else if (cmd_complete->parsed()) {
        const fs::path in_dir = in_dir_flag.empty() ? cfg.out_dir : fs::path(in_dir_flag);
        auto [depth, intr] = load_depth(in_dir / "depth.f32");
        const SegmentationMask mask = load_mask(in_dir / "mask.u8", depth.width, depth.height);
        std::ifstream ps(in_dir / "poses.json");
        if (!ps) throw InvalidParams("missing poses.json beside the depth raster");
        json poses;
        ps >> poses;
        const json& p = poses.at("cam_to_cano");
        SimilarityPose cam_to_cano;
        cam_to_cano.scale = p.at("scale").get<double>();
        Mat3 r;
        for (int i = 0; i < 3; ++i) {
          for (int c = 0; c < 3; ++c) r(i, c) = p.at("rotation_row_major")[i][c].get<double>();
        }
        cam_to_cano.rotation = Rotation3(r);
        cam_to_cano.translation = Vec3(p.at("translation")[0], p.at("translation")[1],
                                       p.at("translation")[2]);

        const PointCloud cloud_cam = backproject(depth, mask, intr);
        PointCloud cloud_cano;
        for (const Vec3& q : cloud_cam.points) {
          cloud_cano.points.push_back(apply_similarity(cam_to_cano, q));
        }
        const TsdfVolume tsdf = voxelize_tsdf(cloud_cano, cam_to_cano.translation, cfg.grid);
        const OccupancyGrid occ = complete(tsdf, cfg.completer);
        save_tsdf(tsdf, cfg.out_dir / "tsdf.grid");
        save_occupancy(occ, cfg.out_dir / "occupancy.grid");
        std::cout << "wrote " << (cfg.out_dir / "occupancy.grid").string() << "\n";
      } else if (cmd_mesh->parsed()) {
        const OccupancyGrid occ = load_occupancy(grid_path);
        TriMesh mesh = extract_mesh_mise(occ, iso, cfg.mise_initial_res,
                                         cfg.mise_refinement_steps);
        compute_vertex_normals(mesh);
        mesh.confidence.resize(mesh.vertices.size());
        for (std::size_t i = 0; i < mesh.vertices.size(); ++i) {
          try {
            mesh.confidence[i] = static_cast<float>(vertex_confidence(occ, mesh.vertices[i]));
          } catch (const OutOfBounds&) {
            mesh.confidence[i] = 0.0f;
          }
        }
        const fs::path out = mesh_out.empty() ? fs::path(grid_path).replace_extension(".ply")
                                              : fs::path(mesh_out);
        save_ply(mesh, out);
        std::cout << "wrote " << out.string() << " (" << mesh.vertices.size()
                  << " vertices)\n";
      } else if (cmd_metrics->parsed()) {
        const TriMesh pred = load_mesh(pred_path);
        const TriMesh gt = load_mesh(gt_path);
        const SampledSurface sp = sample_surface(pred, n_samples, metric_seed);
        const SampledSurface sg = sample_surface(gt, n_samples, metric_seed + 1);
        const ShapeMetrics m = shape_metrics(sp, sg);
        json j = {{"chamfer_l1", m.chamfer_l1},
                  {"accuracy", m.accuracy},
                  {"completeness", m.completeness},
                  {"normal_consistency", m.normal_consistency},
                  {"n_samples", n_samples},
                  {"seed", metric_seed}};
        std::cout << j.dump(2) << "\n";
        if (!csv_append.empty()) {
          const bool fresh = !fs::exists(csv_append);
          std::ofstream os(csv_append, std::ios::app);
          os.precision(17);
          if (fresh) os << "pred,gt,chamfer_l1,accuracy,completeness,normal_consistency\n";
          os << pred_path << ',' << gt_path << ',' << m.chamfer_l1 << ',' << m.accuracy
             << ',' << m.completeness << ',' << m.normal_consistency << '\n';
        }
      } else if (cmd_label->parsed()) {
        if (!make_refs_dir.empty()) {
          fs::create_directories(make_refs_dir);
          for (Category c : {Category::Cup, Category::Bottle, Category::Bowl}) {
            const LabeledCanonicalMesh ref = make_reference(c);
            const fs::path p = fs::path(make_refs_dir) / (to_string(c) + "_reference.ply");
            save_labeled_reference(ref, p);
            std::cout << "wrote " << p.string() << " (" << ref.mesh.vertices.size()
                      << " vertices)\n";
          }
        } else {
          if (label_in.empty() || label_out.empty()) {
            throw InvalidParams("label: --mesh and --mesh-out are required");
          }
          TriMesh target = load_mesh(label_in);
          const LabeledCanonicalMesh ref =
              label_ref.empty() ? make_reference(category_from_string(label_category))
                                : load_labeled_reference(label_ref);
          transfer_postures(target, ref, knn);
          save_ply(target, label_out);
          std::cout << "wrote " << label_out << "\n";
        }
      } else if (cmd_plan->parsed()) {
        const TriMesh mesh = load_mesh(plan_mesh);
        const auto candidates = filter_candidates(mesh, cfg.workspace);
        const GraspCandidate cand = select_candidate(candidates, cfg.criterion, cfg.scene.seed);
        const GraspPlan plan = plan_grasp(cand, cfg.workspace);
        const fs::path out = resolve_out(out_flag) / "plan.json";
        save_plan(plan, cfg.workspace, out);
        json extra;
        if (!plan_object.empty()) {
          const SimResult sim = simulate_grasp(plan, load_mesh(plan_object), cfg.workspace);
          extra["feasible"] = sim.feasible;
          extra["failure_reason"] = to_string(sim.reason);
          extra["contact_rays"] = sim.contact_rays;
        }
        std::cout << "wrote " << out.string();
        if (!extra.empty()) std::cout << " " << extra.dump();
        std::cout << "\n";
      } else if (cmd_pipeline->parsed()) {
        const PipelineResult res = run_pipeline(cfg);
        json j = {{"feasible", res.sim.feasible},
                  {"failure_reason", to_string(res.sim.reason)},
                  {"chamfer_l1", res.metrics.chamfer_l1},
                  {"completeness", res.metrics.completeness},
                  {"normal_consistency", res.metrics.normal_consistency},
                  {"out_dir", cfg.out_dir.string()}};
        std::cout << j.dump(2) << "\n";
      } else if (cmd_bench->parsed()) {
        BenchSpec spec;
        spec.category = category_from_string(bench_category);
        spec.objects = bench_objects;
        spec.trials = bench_trials;
        spec.base = cfg;
        spec.base.metric_samples = std::min<std::size_t>(cfg.metric_samples, 20000);
        spec.seed = cfg.scene.seed;
        spec.jobs = jobs;
        const ExperimentReport report = run_benchmark(spec);
        const fs::path out = resolve_out(out_flag);
        save_report_json(report, out / "report.json");
        save_report_csv(report, out / "report.csv");
        for (const CompleterAggregate& a : report.aggregates) {
          std::cout << a.completer << ": " << a.feasible << "/" << a.rows
                    << " feasible\n";
        }
        std::cout << "wrote " << (out / "report.json").string() << "\n";
      }
    } catch (const InvalidParams&) {
      throw;
    } catch (const UnknownStrategy&) {
      throw;
    } catch (const Error& e) {
      std::cerr << "stage failure: " << e.what() << "\n";
      return kExitStage;
    }
  } catch (const Error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  }
  return kExitOk;
}
