#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "graspkit/completion.hpp"
#include "graspkit/grasp.hpp"
#include "graspkit/metrics.hpp"
#include "graspkit/posture.hpp"
#include "graspkit/scene.hpp"

namespace graspkit {

// One synthetic tabletop scene: a seeded procedural object posed on the
// table, viewed by the fixed camera.
struct SceneSpec {
  Category category = Category::Cup;
  ShapeParams params = default_params(Category::Cup);
  bool randomize_params = false;  // draw params from the seed instead
  std::uint64_t seed = 0;
  double object_x = -0.45, object_y = 0.50;  // on-table position
  double object_yaw = 0.7;                   // radians about +Z
};

// The camera sits across the table from the robot's grasping side, looking
// back at the workspace pitched downward; the grasp-facing surfaces are
// therefore occluded in the single view.
struct CameraSpec {
  Vec3 position{-1.15, 0.50, 0.588};
  double yaw = 0.0;                       // +X forward
  double pitch = deg_to_rad(30.0);        // downward
  CameraIntrinsics intrinsics{};          // 640x480 default
  double depth_noise_sigma = 0.0;
};

struct PipelineConfig {
  SceneSpec scene;
  CameraSpec camera;
  GridSpec grid;
  Completer completer;
  SelectionCriterion criterion = SelectionCriterion::MaxConfidence;
  WorkspaceConfig workspace;
  double mise_iso = 0.5;
  int mise_initial_res = 32;
  int mise_refinement_steps = 2;
  int posture_knn = 5;
  std::size_t metric_samples = 100000;
  std::uint64_t metric_seed = 7;
  std::filesystem::path out_dir;  // empty: keep everything in memory
};

struct PipelineResult {
  TriMesh completed_canonical;  // labeled, confident, canonical frame
  TriMesh completed_base;       // robot base frame
  TriMesh ground_truth_canonical;
  std::optional<GraspPlan> plan;
  SimResult sim;
  ShapeMetrics metrics;
  std::string plan_failure;     // set when no candidate could be planned
  int candidates_considered = 0;
};

// Full single-view pipeline: synthesize -> render -> backproject ->
// canonicalize -> voxelize -> complete -> extract -> confidence -> label ->
// plan -> simulate -> evaluate. Deterministic given the config. Stage
// failures raise StageError with the stage name.
PipelineResult run_pipeline(const PipelineConfig& cfg);

struct BenchSpec {
  Category category = Category::Cup;
  int objects = 5;
  int trials = 10;  // seeded poses per object
  std::vector<CompletionStrategy> completers{CompletionStrategy::RevolutionPrior,
                                             CompletionStrategy::PartialOnly};
  PipelineConfig base;   // shared camera/grid/workspace/criterion settings
  std::uint64_t seed = 0;
  int jobs = 1;
};

struct TrialRow {
  int object_id = 0;
  int trial = 0;
  std::string completer;
  std::string criterion;
  std::string approach;   // empty when no plan
  std::string posture;    // empty when no plan
  bool feasible = false;
  std::string failure_reason;
  bool has_metrics = false;
  ShapeMetrics metrics;
  std::string error_stage;  // non-empty when the pipeline aborted
};

struct CompleterAggregate {
  std::string completer;
  int rows = 0;
  int feasible = 0;
  int mw_rows = 0, mw_feasible = 0;
  int tripod_rows = 0, tripod_feasible = 0;
  double mean_chamfer = 0, mean_completeness = 0, mean_normal_consistency = 0;
};

struct ExperimentReport {
  BenchSpec spec;
  std::vector<TrialRow> rows;
  std::vector<CompleterAggregate> aggregates;  // one per completer, spec order
};

// Seeded benchmark over objects x poses x completers. Per-row failures are
// recorded, never fatal. Row order is by (object, trial, completer)
// regardless of the worker count.
ExperimentReport run_benchmark(const BenchSpec& spec);

void save_report_json(const ExperimentReport& report, const std::filesystem::path& path);
void save_report_csv(const ExperimentReport& report, const std::filesystem::path& path);

// Aggregates recomputed from rows (report invariant check and reporting).
std::vector<CompleterAggregate> aggregate_rows(const BenchSpec& spec,
                                               const std::vector<TrialRow>& rows);

}  // namespace graspkit
