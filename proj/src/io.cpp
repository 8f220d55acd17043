#include "f3d/io.hpp"

#include "f3d/errors.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <random>
#include <sstream>

namespace f3d {

using nlohmann::json;
namespace fs = std::filesystem;

static_assert(std::endian::native == std::endian::little, "binary formats assume a little-endian host");

// ---------------------------------------------------------------------------
// base64

namespace {

constexpr char kAlphabet[] = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";

int decode_char(char c) {
  if (c >= 'A' && c <= 'Z') return c - 'A';
  if (c >= 'a' && c <= 'z') return c - 'a' + 26;
  if (c >= '0' && c <= '9') return c - '0' + 52;
  if (c == '+') return 62;
  if (c == '/') return 63;
  return -1;
}

}  // namespace

std::string base64_encode(std::span<const std::uint8_t> bytes) {
  std::string out;
  out.reserve((bytes.size() + 2) / 3 * 4);
  for (std::size_t i = 0; i < bytes.size(); i += 3) {
    const std::uint32_t b0 = bytes[i];
    const std::uint32_t b1 = i + 1 < bytes.size() ? bytes[i + 1] : 0;
    const std::uint32_t b2 = i + 2 < bytes.size() ? bytes[i + 2] : 0;
    const std::uint32_t v = (b0 << 16) | (b1 << 8) | b2;
    out.push_back(kAlphabet[(v >> 18) & 63]);
    out.push_back(kAlphabet[(v >> 12) & 63]);
    out.push_back(i + 1 < bytes.size() ? kAlphabet[(v >> 6) & 63] : '=');
    out.push_back(i + 2 < bytes.size() ? kAlphabet[v & 63] : '=');
  }
  return out;
}

Bytes base64_decode(std::string_view text) {
  if (text.size() % 4 != 0) throw ParseError("base64 length is not a multiple of 4", "offset " + std::to_string(text.size()));
  Bytes out;
  out.reserve(text.size() / 4 * 3);
  for (std::size_t i = 0; i < text.size(); i += 4) {
    int v[4];
    int pad = 0;
    for (int k = 0; k < 4; ++k) {
      const char c = text[i + k];
      if (c == '=' && i + 4 == text.size() && k >= 2) {
        v[k] = 0;
        ++pad;
        continue;
      }
      v[k] = decode_char(c);
      if (v[k] < 0 || pad > 0) throw ParseError("invalid base64 character", "offset " + std::to_string(i + k));
    }
    const std::uint32_t word = (v[0] << 18) | (v[1] << 12) | (v[2] << 6) | v[3];
    out.push_back(static_cast<std::uint8_t>(word >> 16));
    if (pad < 2) out.push_back(static_cast<std::uint8_t>(word >> 8));
    if (pad < 1) out.push_back(static_cast<std::uint8_t>(word));
  }
  return out;
}

// ---------------------------------------------------------------------------
// files

Bytes read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  Bytes data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("failed reading '" + path.string() + "'");
  return data;
}

void write_file_atomic(const fs::path& path, std::span<const std::uint8_t> bytes) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + tmp.string() + "' for writing");
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("failed writing '" + tmp.string() + "'");
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw IoError("cannot rename '" + tmp.string() + "' to '" + path.string() + "': " + ec.message());
}

void write_file_atomic(const fs::path& path, std::string_view text) {
  write_file_atomic(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

// ---------------------------------------------------------------------------
// FVOX

namespace {

template <typename T>
void put(Bytes& out, T value) {
  std::uint8_t raw[sizeof(T)];
  std::memcpy(raw, &value, sizeof(T));
  out.insert(out.end(), raw, raw + sizeof(T));
}

template <typename T>
T get(std::span<const std::uint8_t> in, std::size_t& offset, const char* what) {
  if (offset + sizeof(T) > in.size()) {
    throw ParseError(std::string("truncated data while reading ") + what, "byte " + std::to_string(offset));
  }
  T value;
  std::memcpy(&value, in.data() + offset, sizeof(T));
  offset += sizeof(T);
  return value;
}

}  // namespace

Bytes encode_fvox(const VoxelGrid& grid) {
  Bytes out{'F', 'V', 'O', 'X'};
  out.reserve(kFvoxHeaderSize + 4 * grid.dims().count());
  put<std::uint32_t>(out, kFvoxVersion);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(grid.dims().nx));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(grid.dims().ny));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(grid.dims().nz));
  put<std::uint32_t>(out, grid.frame() == Frame::canonical ? 0u : 1u);
  for (int a = 0; a < 3; ++a) put<double>(out, grid.spec().extent().min[a]);
  for (int a = 0; a < 3; ++a) put<double>(out, grid.spec().extent().max[a]);
  for (float v : grid.occupancy()) put<float>(out, v);
  return out;
}

VoxelGrid decode_fvox(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 4 || std::memcmp(bytes.data(), "FVOX", 4) != 0) throw ParseError("bad FVOX magic", "byte 0");
  std::size_t off = 4;
  const auto version = get<std::uint32_t>(bytes, off, "version");
  if (version != kFvoxVersion) throw ParseError("unsupported FVOX version " + std::to_string(version), "byte 4");
  GridDims dims;
  const std::size_t dims_at = off;
  dims.nx = static_cast<int>(get<std::uint32_t>(bytes, off, "dims"));
  dims.ny = static_cast<int>(get<std::uint32_t>(bytes, off, "dims"));
  dims.nz = static_cast<int>(get<std::uint32_t>(bytes, off, "dims"));
  if (dims.nx <= 0 || dims.ny <= 0 || dims.nz <= 0 || dims.count() > (std::size_t{1} << 30)) {
    throw ParseError("invalid FVOX dims", "byte " + std::to_string(dims_at));
  }
  const std::size_t frame_at = off;
  const auto tag = get<std::uint32_t>(bytes, off, "frame");
  if (tag > 1) throw ParseError("invalid FVOX frame tag", "byte " + std::to_string(frame_at));
  Box3 extent;
  for (int a = 0; a < 3; ++a) extent.min[a] = get<double>(bytes, off, "extent");
  for (int a = 0; a < 3; ++a) extent.max[a] = get<double>(bytes, off, "extent");
  const std::size_t expected = kFvoxHeaderSize + 4 * dims.count();
  if (bytes.size() != expected) {
    throw ParseError("FVOX payload size mismatch: expected " + std::to_string(expected) + " bytes, got " +
                         std::to_string(bytes.size()),
                     "byte " + std::to_string(std::min(bytes.size(), expected)));
  }
  std::vector<float> occ(dims.count());
  std::memcpy(occ.data(), bytes.data() + kFvoxHeaderSize, 4 * occ.size());
  try {
    return VoxelGrid(GridSpec(tag == 0 ? Frame::canonical : Frame::scene, dims, extent), std::move(occ));
  } catch (const ParseError&) {
    throw;
  } catch (const ValidationError& e) {
    throw ParseError(std::string("invalid FVOX grid: ") + e.what(), "byte " + std::to_string(dims_at));
  }
}

void write_fvox(const fs::path& path, const VoxelGrid& grid) { write_file_atomic(path, encode_fvox(grid)); }

VoxelGrid read_fvox(const fs::path& path) { return decode_fvox(read_file(path)); }

// ---------------------------------------------------------------------------
// PFM

Bytes encode_pfm(const PfmImage& image) {
  if (image.width <= 0 || image.height <= 0 ||
      image.values.size() != static_cast<std::size_t>(image.width) * image.height) {
    throw ValidationError("PFM image size mismatch");
  }
  const std::string header = "Pf\n" + std::to_string(image.width) + " " + std::to_string(image.height) + "\n-1.0\n";
  Bytes out(header.begin(), header.end());
  for (int row = image.height - 1; row >= 0; --row)
    for (int col = 0; col < image.width; ++col)
      put<float>(out, image.values[static_cast<std::size_t>(row) * image.width + col]);
  return out;
}

PfmImage decode_pfm(std::span<const std::uint8_t> bytes) {
  std::size_t off = 0;
  auto token = [&](const char* what) {
    while (off < bytes.size() && std::isspace(bytes[off])) ++off;
    const std::size_t start = off;
    while (off < bytes.size() && !std::isspace(bytes[off])) ++off;
    if (start == off) throw ParseError(std::string("truncated PFM header, expected ") + what, "byte " + std::to_string(start));
    return std::pair(std::string(bytes.begin() + start, bytes.begin() + off), start);
  };
  const auto [magic, magic_at] = token("magic");
  if (magic != "Pf") {
    throw ParseError(magic == "PF" ? "three-channel PFM is not supported" : "bad PFM magic", "byte 0");
  }
  PfmImage img;
  const auto [w, w_at] = token("width");
  const auto [h, h_at] = token("height");
  const auto [scale_text, scale_at] = token("scale");
  try {
    img.width = std::stoi(w);
    img.height = std::stoi(h);
  } catch (const std::exception&) {
    throw ParseError("invalid PFM dimensions", "byte " + std::to_string(w_at));
  }
  double scale = 0.0;
  try {
    scale = std::stod(scale_text);
  } catch (const std::exception&) {
    throw ParseError("invalid PFM scale", "byte " + std::to_string(scale_at));
  }
  if (img.width <= 0 || img.height <= 0) throw ParseError("invalid PFM dimensions", "byte " + std::to_string(w_at));
  if (scale == 0.0 || !std::isfinite(scale)) throw ParseError("invalid PFM scale", "byte " + std::to_string(scale_at));
  // Exactly one whitespace byte separates the header from the raster.
  if (off >= bytes.size()) throw ParseError("truncated PFM header", "byte " + std::to_string(off));
  ++off;
  const std::size_t n = static_cast<std::size_t>(img.width) * img.height;
  if (bytes.size() - off != 4 * n) {
    throw ParseError("PFM raster size mismatch: expected " + std::to_string(4 * n) + " bytes, got " +
                         std::to_string(bytes.size() - off),
                     "byte " + std::to_string(std::min(bytes.size(), off + 4 * n)));
  }
  const bool big_endian = scale > 0.0;
  img.values.resize(n);
  for (int row = img.height - 1; row >= 0; --row)
    for (int col = 0; col < img.width; ++col) {
      std::uint32_t raw;
      std::memcpy(&raw, bytes.data() + off, 4);
      off += 4;
      if (big_endian) raw = __builtin_bswap32(raw);
      img.values[static_cast<std::size_t>(row) * img.width + col] = std::bit_cast<float>(raw);
    }
  return img;
}

PfmImage to_pfm(int width, int height, std::span<const double> values) {
  PfmImage img{width, height, {}};
  img.values.reserve(values.size());
  for (double v : values) img.values.push_back(static_cast<float>(v));
  return img;
}

void write_depth_pfm(const fs::path& path, const DepthMap& depth) {
  write_file_atomic(path, encode_pfm(to_pfm(depth.width(), depth.height(), depth.depth)));
}

DepthMap read_depth_pfm(const fs::path& path, const Camera& camera) {
  const PfmImage img = decode_pfm(read_file(path));
  if (img.width != camera.width || img.height != camera.height) {
    throw ValidationError("depth map '" + path.string() + "' does not match the camera size");
  }
  return DepthMap(camera, std::vector<double>(img.values.begin(), img.values.end()));
}

void write_layout_pfm(const fs::path& path, const Layout& layout) {
  write_file_atomic(path, encode_pfm(to_pfm(layout.width, layout.height, layout.disparity)));
}

Layout read_layout_pfm(const fs::path& path) {
  const PfmImage img = decode_pfm(read_file(path));
  return {img.width, img.height, std::vector<double>(img.values.begin(), img.values.end())};
}

// ---------------------------------------------------------------------------
// JSON helpers

json parse_json(std::string_view text) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("malformed JSON: ") + e.what(), "byte " + std::to_string(e.byte));
  }
}

namespace {

const json& field(const json& obj, const char* key, const std::string& where) {
  if (!obj.is_object()) throw ParseError("expected an object", where.empty() ? "/" : where);
  const auto it = obj.find(key);
  if (it == obj.end()) throw ParseError(std::string("missing field '") + key + "'", where + "/" + key);
  return *it;
}

double number(const json& v, const std::string& where) {
  if (!v.is_number()) throw ParseError("expected a number", where);
  return v.get<double>();
}

double number(const json& obj, const char* key, const std::string& where) {
  return number(field(obj, key, where), where + "/" + key);
}

int integer(const json& obj, const char* key, const std::string& where) {
  const json& v = field(obj, key, where);
  if (!v.is_number_integer()) throw ParseError("expected an integer", where + "/" + key);
  return v.get<int>();
}

std::vector<double> numbers(const json& v, std::size_t n, const std::string& where) {
  if (!v.is_array() || v.size() != n) throw ParseError("expected an array of " + std::to_string(n) + " numbers", where);
  std::vector<double> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(number(v[i], where + "/" + std::to_string(i)));
  return out;
}

Vec3 vec3(const json& obj, const char* key, const std::string& where) {
  const auto v = numbers(field(obj, key, where), 3, where + "/" + key);
  return {v[0], v[1], v[2]};
}

json vec_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

// Converts a ValidationError raised while building a value into a ParseError at `where`.
template <typename F>
auto at(const std::string& where, F&& make) {
  try {
    return make();
  } catch (const ParseError&) {
    throw;
  } catch (const ValidationError& e) {
    throw ParseError(e.what(), where);
  }
}

json cuboid_json(const Cuboid& c) { return {{"center", vec_json(c.center)}, {"half_extents", vec_json(c.half_extents)}}; }

Cuboid cuboid_from(const json& j, const std::string& where) {
  return at(where, [&] { return Cuboid(vec3(j, "center", where), vec3(j, "half_extents", where)); });
}

std::string file_name(const std::string& prefix, const std::string& suffix) { return prefix + suffix; }

}  // namespace

json camera_to_json(const Camera& cam) {
  return {{"fx", cam.fx}, {"fy", cam.fy}, {"cx", cam.cx}, {"cy", cam.cy}, {"width", cam.width}, {"height", cam.height}};
}

Camera camera_from_json(const json& j, const std::string& where) {
  Camera cam{number(j, "fx", where), number(j, "fy", where), number(j, "cx", where),
             number(j, "cy", where), integer(j, "width", where), integer(j, "height", where)};
  at(where, [&] {
    cam.validate();
    return 0;
  });
  return cam;
}

// ---------------------------------------------------------------------------
// scenes

json scene_to_json(const FactoredScene& scene, const SceneWriteOptions& options, const fs::path& document_dir) {
  validate(scene);
  json doc;
  doc["format"] = "f3d-scene";
  doc["version"] = kSceneFormatVersion;
  doc["camera"] = camera_to_json(scene.camera);
  if (scene.room) doc["room"] = cuboid_json(*scene.room);
  if (scene.layout) {
    const Layout& l = *scene.layout;
    if (options.asset_dir) {
      const std::string name = file_name(options.asset_prefix, "_layout.pfm");
      write_layout_pfm(*options.asset_dir / name, l);
      doc["layout"] = {{"pfm", fs::relative(*options.asset_dir / name, document_dir.empty() ? fs::path(".") : document_dir)
                                   .generic_string()}};
    } else {
      Bytes raw;
      raw.reserve(8 * l.disparity.size());
      for (double d : l.disparity) put<double>(raw, d);
      doc["layout"] = {{"width", l.width}, {"height", l.height}, {"encoding", "f64le-base64"},
                       {"data", base64_encode(raw)}};
    }
  }
  json objects = json::array();
  for (std::size_t i = 0; i < scene.objects.size(); ++i) {
    const SceneObject& o = scene.objects[i];
    json jo;
    jo["class"] = o.label ? json(std::string(to_string(*o.label))) : json(nullptr);
    jo["pose"] = {{"scale", vec_json(o.pose.scale())},
                  {"rotation", json::array({o.pose.rotation().w(), o.pose.rotation().x(), o.pose.rotation().y(),
                                            o.pose.rotation().z()})},
                  {"translation", vec_json(o.pose.translation())}};
    jo["score"] = o.score ? json(*o.score) : json(nullptr);
    jo["box2d"] = o.box2d ? json::array({o.box2d->xmin, o.box2d->ymin, o.box2d->xmax, o.box2d->ymax}) : json(nullptr);
    if (options.asset_dir) {
      const std::string name = file_name(options.asset_prefix, "_object" + std::to_string(i) + ".fvox");
      write_fvox(*options.asset_dir / name, o.shape);
      jo["voxels"] = {
          {"fvox", fs::relative(*options.asset_dir / name, document_dir.empty() ? fs::path(".") : document_dir)
                       .generic_string()}};
    } else {
      jo["voxels"] = {{"fvox_base64", base64_encode(encode_fvox(o.shape))}};
    }
    json parts = json::array();
    for (const Cuboid& c : o.parts) parts.push_back(cuboid_json(c));
    jo["parts"] = parts;
    objects.push_back(jo);
  }
  doc["objects"] = objects;
  return doc;
}

namespace {

fs::path resolve(const fs::path& document_dir, const std::string& ref) {
  const fs::path p(ref);
  return p.is_absolute() || document_dir.empty() ? p : document_dir / p;
}

template <typename F>
auto load_reference(const fs::path& path, const std::string& where, F&& load) {
  if (!fs::exists(path)) throw ParseError("unresolvable reference '" + path.string() + "'", where);
  try {
    return load(path);
  } catch (const ParseError& e) {
    throw ParseError(std::string("in '") + path.string() + "': " + e.what(), where);
  }
}

SceneObject object_from(const json& jo, const std::string& where, const fs::path& dir) {
  SceneObject o;
  const json& cls = field(jo, "class", where);
  if (!cls.is_null()) {
    if (!cls.is_string()) throw ParseError("expected a class name or null", where + "/class");
    o.label = at(where + "/class", [&] { return object_class_from_string(cls.get<std::string>()); });
  }
  const std::string pw = where + "/pose";
  const json& pose = field(jo, "pose", where);
  const auto q = numbers(field(pose, "rotation", pw), 4, pw + "/rotation");
  const auto rotation = at(pw + "/rotation", [&] { return UnitQuaternion(q[0], q[1], q[2], q[3]); });
  o.pose = at(pw, [&] { return Pose(vec3(pose, "scale", pw), rotation, vec3(pose, "translation", pw)); });

  const json& score = field(jo, "score", where);
  if (score.is_null()) {
    o.score = std::nullopt;
  } else {
    o.score = number(score, where + "/score");
  }
  const json& box = field(jo, "box2d", where);
  if (!box.is_null()) {
    const auto b = numbers(box, 4, where + "/box2d");
    o.box2d = Box2D{b[0], b[1], b[2], b[3]};
  }
  const std::string vw = where + "/voxels";
  const json& vox = field(jo, "voxels", where);
  if (vox.is_object() && vox.contains("fvox")) {
    const json& ref = vox["fvox"];
    if (!ref.is_string()) throw ParseError("expected a path", vw + "/fvox");
    o.shape = load_reference(resolve(dir, ref.get<std::string>()), vw + "/fvox",
                             [](const fs::path& p) { return read_fvox(p); });
  } else {
    const json& payload = field(vox, "fvox_base64", vw);
    if (!payload.is_string()) throw ParseError("expected a base64 string", vw + "/fvox_base64");
    try {
      o.shape = decode_fvox(base64_decode(payload.get<std::string>()));
    } catch (const ParseError& e) {
      throw ParseError(e.what(), vw + "/fvox_base64");
    }
  }
  if (o.shape.frame() != Frame::canonical) throw ParseError("object voxels must be canonical", vw);
  if (jo.contains("parts")) {
    const json& parts = jo["parts"];
    if (!parts.is_array()) throw ParseError("expected an array", where + "/parts");
    for (std::size_t i = 0; i < parts.size(); ++i) o.parts.push_back(cuboid_from(parts[i], where + "/parts/" + std::to_string(i)));
  }
  return o;
}

}  // namespace

FactoredScene scene_from_json(const json& doc, const fs::path& dir) {
  const json& format = field(doc, "format", "");
  if (format != "f3d-scene") throw ParseError("not a scene document", "/format");
  const json& version = field(doc, "version", "");
  if (!version.is_number_integer() || version.get<int>() != kSceneFormatVersion) {
    throw ParseError("unsupported scene version " + version.dump(), "/version");
  }
  FactoredScene scene;
  scene.camera = camera_from_json(field(doc, "camera", ""), "/camera");
  if (doc.contains("room")) scene.room = cuboid_from(doc["room"], "/room");
  if (doc.contains("layout")) {
    const json& l = doc["layout"];
    if (l.is_object() && l.contains("pfm")) {
      if (!l["pfm"].is_string()) throw ParseError("expected a path", "/layout/pfm");
      scene.layout = load_reference(resolve(dir, l["pfm"].get<std::string>()), "/layout/pfm",
                                    [](const fs::path& p) { return read_layout_pfm(p); });
    } else {
      Layout layout;
      layout.width = integer(l, "width", "/layout");
      layout.height = integer(l, "height", "/layout");
      const json& enc = field(l, "encoding", "/layout");
      if (enc != "f64le-base64") throw ParseError("unknown layout encoding", "/layout/encoding");
      const json& data = field(l, "data", "/layout");
      if (!data.is_string()) throw ParseError("expected a base64 string", "/layout/data");
      Bytes raw;
      try {
        raw = base64_decode(data.get<std::string>());
      } catch (const ParseError& e) {
        throw ParseError(e.what(), "/layout/data");
      }
      if (layout.width <= 0 || layout.height <= 0 ||
          raw.size() != 8 * static_cast<std::size_t>(layout.width) * layout.height) {
        throw ParseError("layout payload size does not match its dimensions", "/layout/data");
      }
      std::size_t off = 0;
      layout.disparity.resize(raw.size() / 8);
      for (double& d : layout.disparity) d = get<double>(raw, off, "layout");
      scene.layout = std::move(layout);
    }
  }
  const json& objects = field(doc, "objects", "");
  if (!objects.is_array()) throw ParseError("expected an array", "/objects");
  for (std::size_t i = 0; i < objects.size(); ++i) {
    scene.objects.push_back(object_from(objects[i], "/objects/" + std::to_string(i), dir));
  }
  at("/", [&] {
    validate(scene);
    return 0;
  });
  return scene;
}

std::string serialize_scene(const FactoredScene& scene) { return scene_to_json(scene).dump(1) + "\n"; }

FactoredScene parse_scene(std::string_view text, const fs::path& dir) { return scene_from_json(parse_json(text), dir); }

void write_scene(const fs::path& path, const FactoredScene& scene, bool external_assets) {
  SceneWriteOptions options;
  const fs::path dir = path.parent_path().empty() ? fs::path(".") : path.parent_path();
  if (external_assets) {
    options.asset_dir = dir;
    options.asset_prefix = path.stem().string();
  }
  write_file_atomic(path, scene_to_json(scene, options, dir).dump(1) + "\n");
}

FactoredScene read_scene(const fs::path& path) {
  const Bytes raw = read_file(path);
  const fs::path dir = path.parent_path().empty() ? fs::path(".") : path.parent_path();
  return parse_scene(std::string_view(reinterpret_cast<const char*>(raw.data()), raw.size()), dir);
}

// ---------------------------------------------------------------------------
// bin sets and generator configs

json binset_to_json(const BinSet& bins) {
  json reps = json::array();
  for (const auto& q : bins.representatives) reps.push_back(json::array({q.w(), q.x(), q.y(), q.z()}));
  return {{"format", "f3d-binset"},
          {"version", 1},
          {"seed", bins.seed},
          {"distance", "antipodal-chordal"},
          {"seeding", "kmeans++"},
          {"inertia", bins.inertia},
          {"iterations", bins.iterations},
          {"representatives", reps}};
}

BinSet binset_from_json(const json& doc) {
  if (field(doc, "format", "") != "f3d-binset") throw ParseError("not a bin set document", "/format");
  BinSet bins;
  const json& seed = field(doc, "seed", "");
  if (!seed.is_number_unsigned() && !seed.is_number_integer()) throw ParseError("expected an integer", "/seed");
  bins.seed = seed.get<std::uint64_t>();
  if (doc.contains("inertia")) bins.inertia = number(doc, "inertia", "");
  if (doc.contains("iterations")) bins.iterations = integer(doc, "iterations", "");
  const json& reps = field(doc, "representatives", "");
  if (!reps.is_array() || reps.empty()) throw ParseError("expected a non-empty array", "/representatives");
  for (std::size_t i = 0; i < reps.size(); ++i) {
    const std::string where = "/representatives/" + std::to_string(i);
    const auto q = numbers(reps[i], 4, where);
    bins.representatives.push_back(at(where, [&] { return UnitQuaternion(q[0], q[1], q[2], q[3]); }));
  }
  return bins;
}

namespace {

void read_range(const json& doc, const char* key, Range& r) {
  if (!doc.contains(key)) return;
  const auto v = numbers(doc[key], 2, std::string("/") + key);
  r = {v[0], v[1]};
}

}  // namespace

GeneratorConfig generator_config_from_json(const json& doc) {
  if (!doc.is_object()) throw ParseError("expected an object", "/");
  GeneratorConfig cfg;
  if (doc.contains("seed")) {
    if (!doc["seed"].is_number_integer()) throw ParseError("expected an integer", "/seed");
    cfg.seed = doc["seed"].get<std::uint64_t>();
  }
  if (doc.contains("object_count")) {
    const auto v = numbers(doc["object_count"], 2, "/object_count");
    cfg.min_objects = static_cast<int>(v[0]);
    cfg.max_objects = static_cast<int>(v[1]);
  }
  read_range(doc, "side_wall", cfg.side_wall);
  read_range(doc, "back_wall", cfg.back_wall);
  read_range(doc, "front_wall", cfg.front_wall);
  read_range(doc, "camera_height", cfg.camera_height);
  read_range(doc, "room_height", cfg.room_height);
  if (doc.contains("class_weights")) {
    const json& w = doc["class_weights"];
    if (!w.is_object()) throw ParseError("expected an object keyed by class", "/class_weights");
    for (auto it = w.begin(); it != w.end(); ++it) {
      const auto c = at("/class_weights/" + it.key(), [&] { return object_class_from_string(it.key()); });
      cfg.class_weights[static_cast<std::size_t>(c)] = number(it.value(), "/class_weights/" + it.key());
    }
  }
  if (doc.contains("max_placement_attempts")) {
    cfg.max_placement_attempts = integer(doc, "max_placement_attempts", "");
  }
  if (doc.contains("camera")) cfg.camera = camera_from_json(doc["camera"], "/camera");
  at("/", [&] {
    cfg.validate();
    return 0;
  });
  return cfg;
}

json generator_config_to_json(const GeneratorConfig& cfg) {
  json weights;
  for (ObjectClass c : kObjectClasses) weights[std::string(to_string(c))] = cfg.class_weights[static_cast<std::size_t>(c)];
  auto range = [](const Range& r) { return json::array({r.lo, r.hi}); };
  return {{"seed", cfg.seed},
          {"object_count", json::array({cfg.min_objects, cfg.max_objects})},
          {"side_wall", range(cfg.side_wall)},
          {"back_wall", range(cfg.back_wall)},
          {"front_wall", range(cfg.front_wall)},
          {"camera_height", range(cfg.camera_height)},
          {"room_height", range(cfg.room_height)},
          {"class_weights", weights},
          {"max_placement_attempts", cfg.max_placement_attempts},
          {"camera", camera_to_json(cfg.camera)}};
}

}  // namespace f3d
