#pragma once

// The factored scene: an amodal layout plus posed per-object shapes.
//
// Canonical object frame: upright and front-facing with y down like the
// camera, so the object's base is the y = +0.5 face and its front is the
// z = -0.5 face (facing a camera that looks down +z).

#include "f3d/geometry.hpp"
#include "f3d/voxel_grid.hpp"

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace f3d {

enum class ObjectClass { bed, chair, desk, sofa, table, television };

inline constexpr std::array<ObjectClass, 6> kObjectClasses{ObjectClass::bed,  ObjectClass::chair,
                                                           ObjectClass::desk, ObjectClass::sofa,
                                                           ObjectClass::table, ObjectClass::television};

std::string_view to_string(ObjectClass c);
/// Throws ValidationError for unknown names.
ObjectClass object_class_from_string(std::string_view name);

/// Pixel-space box, xmin < xmax and ymin < ymax.
struct Box2D {
  double xmin = 0.0;
  double ymin = 0.0;
  double xmax = 0.0;
  double ymax = 0.0;

  double area() const { return (xmax - xmin) * (ymax - ymin); }
  bool operator==(const Box2D&) const = default;
};

double box_iou(const Box2D& a, const Box2D& b);

struct SceneObject {
  VoxelGrid shape{GridSpec::canonical()};
  Pose pose;
  /// Foreground probability f. Detections without a score are rejected by evaluation.
  std::optional<double> score = 1.0;
  std::optional<ObjectClass> label;
  std::optional<Box2D> box2d;
  /// Analytic canonical-frame parts, present for synthetic ground truth.
  std::vector<Cuboid> parts;

  bool operator==(const SceneObject&) const = default;
};

/// Amodal disparity (1/m) of the scene without objects. 0 marks pixels with no surface.
struct Layout {
  int width = 0;
  int height = 0;
  std::vector<double> disparity;

  double at(int col, int row) const { return disparity[static_cast<std::size_t>(row) * width + col]; }
  bool operator==(const Layout&) const = default;
};

struct FactoredScene {
  Camera camera;
  std::optional<Layout> layout;
  /// Camera-frame room interior, synthetic ground truth only.
  std::optional<Cuboid> room;
  std::vector<SceneObject> objects;

  bool operator==(const FactoredScene&) const = default;
};

/// Checks every object, layout and camera invariant; throws ValidationError.
void validate(const FactoredScene& scene);
void validate(const SceneObject& object, const Camera& camera);

/// Parameters of the synthetic shape families, in canonical units.
struct ShapeParams {
  double slab = 0.1;  ///< table/desk top, chair seat, television depth; [0.02, 0.4] (television: <= 0.1)
  double leg = 0.06;  ///< leg cross-section; [0.02, 0.2]
  double back = 0.1;  ///< backrest, headboard and sofa arm thickness; [0.02, 0.3]
};

/// Canonical-frame cuboid parts for a class:
///   bed = mattress slab + headboard, chair = seat + back + 4 legs,
///   desk/table = top + 4 legs, sofa = seat + back + 2 arms, television = thin slab.
std::vector<Cuboid> parametric_shape(ObjectClass kind, const ShapeParams& params = {});

struct ComposeOptions {
  double tau = kDefaultTau;
  Sampling sampling = Sampling::trilinear;
  /// Add the layout as occupied boundary shells (room faces, else backprojected layout).
  bool include_layout = false;
};

/// Cell-wise maximum of every object resampled into the scene grid.
VoxelGrid compose_scene_voxels(const FactoredScene& scene, const GridSpec& scene_spec = GridSpec::scene_default(),
                               const ComposeOptions& options = {});

/// Scene voxels straight from the analytic parts of every object: a cell is
/// occupied iff its center, mapped into an object's canonical frame, lies in
/// one of that object's parts. Objects without parts are skipped.
VoxelGrid analytic_scene_voxels(const FactoredScene& scene, const GridSpec& scene_spec = GridSpec::scene_default());

/// Distance along the camera ray through pixel (u, v) to the room wall it
/// exits through; the ray has unit z so the result is z-depth. nullopt if the
/// camera is not strictly inside the room.
std::optional<double> room_depth(const Camera& cam, const Cuboid& room, double u, double v);

/// Amodal layout of an axis-aligned room: disparity = 1 / room_depth per pixel.
Layout room_layout(const Camera& cam, const Cuboid& room);

/// Projected bounding box of the posed canonical cube, clipped to the image;
/// nullopt when a corner is behind the camera or the clipped box is degenerate.
std::optional<Box2D> projected_box(const Camera& cam, const Pose& pose);

}  // namespace f3d
