#pragma once

// File formats: FVOX voxel grids, PFM depth/disparity maps, scene JSON
// documents, bin sets and generator configs.
//
// FVOX layout (little-endian):
//   "FVOX" | u32 version (1) | u32 nx, ny, nz | u32 frame (0 canonical, 1 scene)
//   | f64 extent min xyz, max xyz | f32 occupancy[nx*ny*nz], x fastest.

#include "f3d/generator.hpp"
#include "f3d/renderer.hpp"
#include "f3d/rotation_bins.hpp"
#include "f3d/scene.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace f3d {

using Bytes = std::vector<std::uint8_t>;

inline constexpr int kSceneFormatVersion = 1;
inline constexpr std::uint32_t kFvoxVersion = 1;
inline constexpr std::size_t kFvoxHeaderSize = 72;

std::string base64_encode(std::span<const std::uint8_t> bytes);
/// Throws ParseError naming the offending character offset.
Bytes base64_decode(std::string_view text);

Bytes read_file(const std::filesystem::path& path);
/// Writes to a sibling temporary file and renames it into place.
void write_file_atomic(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);
void write_file_atomic(const std::filesystem::path& path, std::string_view text);

Bytes encode_fvox(const VoxelGrid& grid);
VoxelGrid decode_fvox(std::span<const std::uint8_t> bytes);
void write_fvox(const std::filesystem::path& path, const VoxelGrid& grid);
VoxelGrid read_fvox(const std::filesystem::path& path);

/// Single-channel float image, rows stored top to bottom in memory.
struct PfmImage {
  int width = 0;
  int height = 0;
  std::vector<float> values;
};

/// "Pf" header, scale -1 (little-endian), rows bottom-up as the format requires.
Bytes encode_pfm(const PfmImage& image);
/// Accepts either endianness.
PfmImage decode_pfm(std::span<const std::uint8_t> bytes);

PfmImage to_pfm(int width, int height, std::span<const double> values);
void write_depth_pfm(const std::filesystem::path& path, const DepthMap& depth);
DepthMap read_depth_pfm(const std::filesystem::path& path, const Camera& camera);
void write_layout_pfm(const std::filesystem::path& path, const Layout& layout);
Layout read_layout_pfm(const std::filesystem::path& path);

struct SceneWriteOptions {
  /// When set, the layout and object voxels are written as PFM/FVOX files in
  /// this directory and referenced by relative path instead of inlined.
  std::optional<std::filesystem::path> asset_dir;
  std::string asset_prefix = "scene";
};

/// Inline payloads are exact: the layout as base64 little-endian f64, voxels
/// as base64 FVOX.
nlohmann::json scene_to_json(const FactoredScene& scene, const SceneWriteOptions& options = {},
                             const std::filesystem::path& document_dir = {});
/// Relative references resolve against `document_dir`. Errors carry the JSON
/// pointer of the bad field.
FactoredScene scene_from_json(const nlohmann::json& doc, const std::filesystem::path& document_dir = {});

std::string serialize_scene(const FactoredScene& scene);
/// Syntax errors report the byte offset.
FactoredScene parse_scene(std::string_view text, const std::filesystem::path& document_dir = {});

void write_scene(const std::filesystem::path& path, const FactoredScene& scene, bool external_assets = false);
FactoredScene read_scene(const std::filesystem::path& path);

nlohmann::json binset_to_json(const BinSet& bins);
BinSet binset_from_json(const nlohmann::json& doc);

/// Missing keys keep their defaults.
GeneratorConfig generator_config_from_json(const nlohmann::json& doc);
nlohmann::json generator_config_to_json(const GeneratorConfig& cfg);

nlohmann::json camera_to_json(const Camera& cam);
Camera camera_from_json(const nlohmann::json& doc, const std::string& where = "");

/// Parses JSON text, converting syntax errors to ParseError with the byte offset.
nlohmann::json parse_json(std::string_view text);

}  // namespace f3d
