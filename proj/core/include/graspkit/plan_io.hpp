#pragma once

#include <filesystem>

#include "graspkit/grasp.hpp"

namespace graspkit {

// Stable 64-bit FNV-1a hash of the workspace configuration, embedded in plan
// files so a plan can be matched to the constants it was computed under.
std::string workspace_config_hash(const WorkspaceConfig& cfg);

void save_plan(const GraspPlan& plan, const WorkspaceConfig& cfg,
               const std::filesystem::path& path);
GraspPlan load_plan(const std::filesystem::path& path);

}  // namespace graspkit
