#pragma once

// Scores one scene's factored, depth and voxel representations against the
// same ground truth on five tasks: visible depth, scene occupancy, object
// alignment, modal layout and amodal layout.

#include "f3d/registration.hpp"
#include "f3d/renderer.hpp"

#include <array>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

namespace f3d {

struct RepresentationSet {
  FactoredScene factored;
  DepthMap depth;
  VoxelGrid voxels{GridSpec::scene_default()};
};

/// Ground-truth-derived inputs: the scene itself, its analytic modal depth,
/// and its analytic object occupancy.
RepresentationSet oracle_representations(const FactoredScene& gt, const GridSpec& spec = GridSpec::scene_default());

struct TaskScores {
  double visible_depth = 0.0;  ///< meters, +inf for an empty prediction
  double scene_iou = 0.0;
  std::vector<double> object_fitness;  ///< one per ground-truth object
  double modal_layout = 0.0;           ///< meters
  double amodal_layout = 0.0;          ///< meters
};

enum class Representation { factored, depth, voxels };
inline constexpr std::array<Representation, 3> kRepresentations = {Representation::factored, Representation::depth,
                                                                   Representation::voxels};
std::string_view to_string(Representation r);

struct SceneComparison {
  std::array<TaskScores, 3> scores;  ///< indexed by Representation
  const TaskScores& operator[](Representation r) const { return scores[static_cast<std::size_t>(r)]; }
};

/// The ground truth needs a room so it can be rendered analytically.
SceneComparison compare_representations(const FactoredScene& gt, const RepresentationSet& pred,
                                        const IcpConfig& icp_config = {}, double tau = kDefaultTau);

/// World-space centers of the object's occupied canonical voxels.
std::vector<Vec3> object_points(const SceneObject& object, double tau = kDefaultTau);

/// Sorted values paired with the fraction of values at or below each.
std::vector<std::pair<double, double>> cumulative_curve(std::span<const double> values);

}  // namespace f3d
