#include "graspkit/grid_io.hpp"

#include <fstream>

#include <nlohmann/json.hpp>

#include "graspkit/mesh_io.hpp"

namespace graspkit {

using json = nlohmann::ordered_json;

namespace {

json vec3_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

Vec3 vec3_from(const json& j) {
  if (!j.is_array() || j.size() != 3) throw ParseError("expected 3-array");
  return Vec3(j[0].get<double>(), j[1].get<double>(), j[2].get<double>());
}

void write_payload(std::ostream& os, const std::vector<float>& v) {
  os.write(reinterpret_cast<const char*>(v.data()),
           static_cast<std::streamsize>(v.size() * sizeof(float)));
}

void read_payload(std::istream& is, std::vector<float>& v) {
  is.read(reinterpret_cast<char*>(v.data()),
          static_cast<std::streamsize>(v.size() * sizeof(float)));
  if (!is) throw ParseError("grid payload truncated");
}

json read_header_line(std::istream& is, const std::filesystem::path& path) {
  std::string line;
  if (!std::getline(is, line)) throw ParseError("missing header: " + path.string());
  try {
    return json::parse(line);
  } catch (const std::exception& e) {
    throw ParseError("bad grid header in " + path.string() + ": " + e.what());
  }
}

}  // namespace

void save_occupancy(const OccupancyGrid& grid, const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open for writing: " + path.string());
  json h;
  h["type"] = "occupancy";
  h["resolution"] = grid.resolution;
  h["origin"] = vec3_json(grid.origin);
  h["voxel_size"] = grid.voxel_size;
  os << h.dump() << "\n";
  write_payload(os, grid.values);
  if (!os) throw IoError("write failed: " + path.string());
}

OccupancyGrid load_occupancy(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open: " + path.string());
  const json h = read_header_line(is, path);
  if (h.value("type", "") != "occupancy") throw ParseError("not an occupancy dump");
  OccupancyGrid g;
  g.resolution = h.at("resolution").get<int>();
  g.origin = vec3_from(h.at("origin"));
  g.voxel_size = h.at("voxel_size").get<double>();
  g.values.resize(static_cast<std::size_t>(g.resolution) * g.resolution * g.resolution);
  read_payload(is, g.values);
  return g;
}

void save_tsdf(const TsdfVolume& vol, const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open for writing: " + path.string());
  json h;
  h["type"] = "tsdf";
  h["resolution"] = vol.spec.resolution;
  h["origin"] = vec3_json(vol.spec.origin);
  h["voxel_size"] = vol.spec.voxel_size;
  h["truncation"] = vol.spec.truncation;
  os << h.dump() << "\n";
  write_payload(os, vol.values);
  os.write(reinterpret_cast<const char*>(vol.observed.data()),
           static_cast<std::streamsize>(vol.observed.size()));
  if (!os) throw IoError("write failed: " + path.string());
}

TsdfVolume load_tsdf(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open: " + path.string());
  const json h = read_header_line(is, path);
  if (h.value("type", "") != "tsdf") throw ParseError("not a tsdf dump");
  TsdfVolume v;
  v.spec.resolution = h.at("resolution").get<int>();
  v.spec.origin = vec3_from(h.at("origin"));
  v.spec.voxel_size = h.at("voxel_size").get<double>();
  v.spec.truncation = h.at("truncation").get<double>();
  const std::size_t n = v.spec.cell_count();
  v.values.resize(n);
  read_payload(is, v.values);
  v.observed.resize(n);
  is.read(reinterpret_cast<char*>(v.observed.data()), static_cast<std::streamsize>(n));
  if (!is) throw ParseError("tsdf observed payload truncated");
  return v;
}

void save_depth(const DepthImage& depth, const CameraIntrinsics& intr,
                const std::filesystem::path& f32_path) {
  {
    std::ofstream os(f32_path, std::ios::binary);
    if (!os) throw IoError("cannot open for writing: " + f32_path.string());
    write_payload(os, depth.depth);
    if (!os) throw IoError("write failed: " + f32_path.string());
  }
  json h;
  h["width"] = depth.width;
  h["height"] = depth.height;
  h["intrinsics"] = {{"fx", intr.fx}, {"fy", intr.fy}, {"cx", intr.cx},
                     {"cy", intr.cy}, {"width", intr.width}, {"height", intr.height}};
  const Mat3& ax = depth.sensor_pose.axes.matrix();
  json rows = json::array();
  for (int r = 0; r < 3; ++r) rows.push_back(json::array({ax(r, 0), ax(r, 1), ax(r, 2)}));
  h["camera_pose"] = {{"origin", vec3_json(depth.sensor_pose.origin)},
                      {"axes_row_major", rows}};
  std::filesystem::path sidecar = f32_path;
  sidecar.replace_extension(".json");
  std::ofstream os(sidecar);
  if (!os) throw IoError("cannot open for writing: " + sidecar.string());
  os << h.dump(2) << "\n";
}

std::pair<DepthImage, CameraIntrinsics> load_depth(const std::filesystem::path& f32_path) {
  std::filesystem::path sidecar = f32_path;
  sidecar.replace_extension(".json");
  std::ifstream hs(sidecar);
  if (!hs) throw IoError("cannot open: " + sidecar.string());
  json h;
  try {
    hs >> h;
  } catch (const std::exception& e) {
    throw ParseError("bad depth sidecar: " + std::string(e.what()));
  }

  DepthImage depth;
  depth.width = h.at("width").get<int>();
  depth.height = h.at("height").get<int>();
  CameraIntrinsics intr;
  const json& ji = h.at("intrinsics");
  intr.fx = ji.at("fx").get<double>();
  intr.fy = ji.at("fy").get<double>();
  intr.cx = ji.at("cx").get<double>();
  intr.cy = ji.at("cy").get<double>();
  intr.width = ji.at("width").get<int>();
  intr.height = ji.at("height").get<int>();

  const json& jp = h.at("camera_pose");
  Mat3 ax;
  const json& rows = jp.at("axes_row_major");
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) ax(r, c) = rows[r][c].get<double>();
  }
  depth.sensor_pose = Frame{vec3_from(jp.at("origin")), Rotation3(ax)};

  depth.depth.resize(static_cast<std::size_t>(depth.width) * depth.height);
  std::ifstream is(f32_path, std::ios::binary);
  if (!is) throw IoError("cannot open: " + f32_path.string());
  read_payload(is, depth.depth);
  return {std::move(depth), intr};
}

void save_mask(const SegmentationMask& mask, const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open for writing: " + path.string());
  os.write(reinterpret_cast<const char*>(mask.values.data()),
           static_cast<std::streamsize>(mask.values.size()));
  if (!os) throw IoError("write failed: " + path.string());
}

SegmentationMask load_mask(const std::filesystem::path& path, int width, int height) {
  SegmentationMask mask;
  mask.width = width;
  mask.height = height;
  mask.values.resize(static_cast<std::size_t>(width) * height);
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open: " + path.string());
  is.read(reinterpret_cast<char*>(mask.values.data()),
          static_cast<std::streamsize>(mask.values.size()));
  if (!is) throw ParseError("mask payload truncated");
  return mask;
}

void save_cloud_ply(const PointCloud& cloud, const std::filesystem::path& path) {
  TriMesh as_mesh;
  as_mesh.vertices = cloud.points;
  if (cloud.normals.size() == cloud.points.size()) as_mesh.normals = cloud.normals;
  save_ply(as_mesh, path);
}

PointCloud load_cloud_ply(const std::filesystem::path& path) {
  const TriMesh mesh = load_ply(path);
  PointCloud cloud;
  cloud.points = mesh.vertices;
  cloud.normals = mesh.normals;
  return cloud;
}

}  // namespace graspkit
