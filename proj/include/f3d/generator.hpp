#pragma once

// Deterministic synthetic indoor scenes with exact ground truth.

#include "f3d/scene.hpp"

#include <array>
#include <cstdint>

namespace f3d {

struct Range {
  double lo = 0.0;
  double hi = 0.0;
};

struct GeneratorConfig {
  std::uint64_t seed = 0;
  int min_objects = 1;
  int max_objects = 4;
  /// Room interior relative to the camera: lateral distance to each side wall,
  /// distance to the wall behind and ahead, camera height and room height.
  Range side_wall{1.8, 2.5};
  Range back_wall{0.3, 1.0};
  Range front_wall{4.2, 5.0};
  Range camera_height{1.0, 1.2};
  Range room_height{2.4, 2.8};
  /// Sampling weights over kObjectClasses (bed, chair, desk, sofa, table, television).
  std::array<double, 6> class_weights{1.0, 1.0, 1.0, 1.0, 1.0, 1.0};
  int max_placement_attempts = 200;
  Camera camera = Camera::default_camera();

  /// Throws ValidationError for empty ranges or unusable weights.
  void validate() const;
};

struct GeneratedScene {
  FactoredScene scene;
  int requested_objects = 0;
  /// Set when fewer objects than requested could be placed.
  bool placement_shortfall = false;
};

/// Room-only layout is rendered analytically; objects stand on the floor,
/// rotate about the vertical axis only, and have pairwise disjoint world
/// bounding boxes that stay inside the room and the default scene grid.
/// Identical configs produce bit-identical scenes.
GeneratedScene generate_scene(const GeneratorConfig& cfg);

}  // namespace f3d
