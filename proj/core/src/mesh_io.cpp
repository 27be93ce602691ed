#include "graspkit/mesh_io.hpp"

#include <cstring>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace graspkit {

namespace {

void write_f32(std::ostream& os, float v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

struct PlyProperty {
  std::string type;
  std::string name;
};

std::size_t scalar_size(const std::string& type) {
  if (type == "char" || type == "uchar" || type == "int8" || type == "uint8") return 1;
  if (type == "short" || type == "ushort" || type == "int16" || type == "uint16") return 2;
  if (type == "int" || type == "uint" || type == "int32" || type == "uint32" ||
      type == "float" || type == "float32") return 4;
  if (type == "double" || type == "float64") return 8;
  throw ParseError("ply: unknown scalar type " + type);
}

double read_scalar_binary(std::istream& is, const std::string& type) {
  char buf[8];
  const std::size_t n = scalar_size(type);
  is.read(buf, static_cast<std::streamsize>(n));
  if (type == "char" || type == "int8") { std::int8_t v; std::memcpy(&v, buf, 1); return v; }
  if (type == "uchar" || type == "uint8") { std::uint8_t v; std::memcpy(&v, buf, 1); return v; }
  if (type == "short" || type == "int16") { std::int16_t v; std::memcpy(&v, buf, 2); return v; }
  if (type == "ushort" || type == "uint16") { std::uint16_t v; std::memcpy(&v, buf, 2); return v; }
  if (type == "int" || type == "int32") { std::int32_t v; std::memcpy(&v, buf, 4); return v; }
  if (type == "uint" || type == "uint32") { std::uint32_t v; std::memcpy(&v, buf, 4); return v; }
  if (type == "float" || type == "float32") { float v; std::memcpy(&v, buf, 4); return v; }
  double v; std::memcpy(&v, buf, 8); return v;
}

}  // namespace

void save_ply(const TriMesh& mesh, const std::filesystem::path& path,
              PlyEncoding encoding) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open for writing: " + path.string());

  const bool ascii = encoding == PlyEncoding::Ascii;
  os << "ply\n"
     << (ascii ? "format ascii 1.0\n" : "format binary_little_endian 1.0\n")
     << "element vertex " << mesh.vertices.size() << "\n"
     << "property float x\nproperty float y\nproperty float z\n";
  if (mesh.has_normals()) os << "property float nx\nproperty float ny\nproperty float nz\n";
  if (mesh.has_confidence()) os << "property float confidence\n";
  if (mesh.has_postures()) os << "property uchar posture\n";
  os << "element face " << mesh.triangles.size() << "\n"
     << "property list uchar int vertex_indices\n"
     << "end_header\n";

  for (std::size_t i = 0; i < mesh.vertices.size(); ++i) {
    const Vec3& v = mesh.vertices[i];
    if (ascii) {
      os << static_cast<float>(v.x()) << " " << static_cast<float>(v.y()) << " "
         << static_cast<float>(v.z());
      if (mesh.has_normals()) {
        const Vec3& n = mesh.normals[i];
        os << " " << static_cast<float>(n.x()) << " " << static_cast<float>(n.y())
           << " " << static_cast<float>(n.z());
      }
      if (mesh.has_confidence()) os << " " << mesh.confidence[i];
      if (mesh.has_postures()) os << " " << static_cast<int>(mesh.postures[i]);
      os << "\n";
    } else {
      write_f32(os, static_cast<float>(v.x()));
      write_f32(os, static_cast<float>(v.y()));
      write_f32(os, static_cast<float>(v.z()));
      if (mesh.has_normals()) {
        const Vec3& n = mesh.normals[i];
        write_f32(os, static_cast<float>(n.x()));
        write_f32(os, static_cast<float>(n.y()));
        write_f32(os, static_cast<float>(n.z()));
      }
      if (mesh.has_confidence()) write_f32(os, mesh.confidence[i]);
      if (mesh.has_postures()) {
        const auto p = static_cast<std::uint8_t>(mesh.postures[i]);
        os.write(reinterpret_cast<const char*>(&p), 1);
      }
    }
  }
  for (const auto& t : mesh.triangles) {
    if (ascii) {
      os << "3 " << t[0] << " " << t[1] << " " << t[2] << "\n";
    } else {
      const std::uint8_t n = 3;
      os.write(reinterpret_cast<const char*>(&n), 1);
      for (int k = 0; k < 3; ++k) {
        const std::int32_t idx = static_cast<std::int32_t>(t[k]);
        os.write(reinterpret_cast<const char*>(&idx), 4);
      }
    }
  }
  if (!os) throw IoError("write failed: " + path.string());
}

TriMesh load_ply(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open: " + path.string());

  std::string line;
  if (!std::getline(is, line) || line.rfind("ply", 0) != 0) {
    throw ParseError("not a ply file: " + path.string());
  }

  bool ascii = false;
  std::size_t n_vertices = 0, n_faces = 0;
  std::vector<PlyProperty> vertex_props;
  std::string list_count_type = "uchar", list_index_type = "int";
  std::string current_element;

  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::istringstream ls(line);
    std::string tok;
    ls >> tok;
    if (tok == "comment" || tok.empty()) continue;
    if (tok == "format") {
      std::string fmt;
      ls >> fmt;
      if (fmt == "ascii") ascii = true;
      else if (fmt == "binary_little_endian") ascii = false;
      else throw ParseError("ply: unsupported format " + fmt);
    } else if (tok == "element") {
      std::string name;
      std::size_t count;
      ls >> name >> count;
      current_element = name;
      if (name == "vertex") n_vertices = count;
      else if (name == "face") n_faces = count;
    } else if (tok == "property") {
      std::string type;
      ls >> type;
      if (type == "list") {
        std::string name;
        ls >> list_count_type >> list_index_type >> name;
      } else if (current_element == "vertex") {
        PlyProperty p;
        p.type = type;
        ls >> p.name;
        vertex_props.push_back(p);
      }
    } else if (tok == "end_header") {
      break;
    }
  }

  int ix = -1, iy = -1, iz = -1, inx = -1, iny = -1, inz = -1, iconf = -1, ipost = -1;
  for (std::size_t i = 0; i < vertex_props.size(); ++i) {
    const std::string& n = vertex_props[i].name;
    const int idx = static_cast<int>(i);
    if (n == "x") ix = idx;
    else if (n == "y") iy = idx;
    else if (n == "z") iz = idx;
    else if (n == "nx") inx = idx;
    else if (n == "ny") iny = idx;
    else if (n == "nz") inz = idx;
    else if (n == "confidence") iconf = idx;
    else if (n == "posture") ipost = idx;
  }
  if (ix < 0 || iy < 0 || iz < 0) throw ParseError("ply: missing x/y/z properties");

  TriMesh mesh;
  mesh.vertices.resize(n_vertices);
  const bool has_n = inx >= 0 && iny >= 0 && inz >= 0;
  if (has_n) mesh.normals.resize(n_vertices);
  if (iconf >= 0) mesh.confidence.resize(n_vertices);
  if (ipost >= 0) mesh.postures.resize(n_vertices);

  std::vector<double> row(vertex_props.size());
  for (std::size_t v = 0; v < n_vertices; ++v) {
    for (std::size_t p = 0; p < vertex_props.size(); ++p) {
      row[p] = ascii ? [&] { double d; is >> d; return d; }()
                     : read_scalar_binary(is, vertex_props[p].type);
    }
    if (!is) throw ParseError("ply: truncated vertex data");
    mesh.vertices[v] = Vec3(row[ix], row[iy], row[iz]);
    if (has_n) mesh.normals[v] = Vec3(row[inx], row[iny], row[inz]);
    if (iconf >= 0) mesh.confidence[v] = static_cast<float>(row[iconf]);
    if (ipost >= 0) {
      const int label = static_cast<int>(row[ipost]);
      if (label < 0 || label > 2) {
        throw MissingLabels("ply: vertex " + std::to_string(v) +
                            " has posture value outside {0,1,2}");
      }
      mesh.postures[v] = static_cast<PostureLabel>(label);
    }
  }

  mesh.triangles.reserve(n_faces);
  for (std::size_t f = 0; f < n_faces; ++f) {
    std::size_t count;
    if (ascii) { is >> count; }
    else { count = static_cast<std::size_t>(read_scalar_binary(is, list_count_type)); }
    if (!is) throw ParseError("ply: truncated face data");
    std::vector<std::uint32_t> idx(count);
    for (std::size_t k = 0; k < count; ++k) {
      idx[k] = ascii ? [&] { std::uint32_t i; is >> i; return i; }()
                     : static_cast<std::uint32_t>(read_scalar_binary(is, list_index_type));
    }
    // Fan-triangulate polygons.
    for (std::size_t k = 2; k < count; ++k) {
      mesh.triangles.push_back({idx[0], idx[k - 1], idx[k]});
    }
  }

  for (const auto& t : mesh.triangles) {
    for (auto i : t) {
      if (i >= mesh.vertices.size()) throw ParseError("ply: face index out of range");
    }
  }
  return mesh;
}

void save_obj(const TriMesh& mesh, const std::filesystem::path& path) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot open for writing: " + path.string());
  os.precision(9);
  for (const Vec3& v : mesh.vertices) {
    os << "v " << v.x() << " " << v.y() << " " << v.z() << "\n";
  }
  for (const auto& t : mesh.triangles) {
    os << "f " << t[0] + 1 << " " << t[1] + 1 << " " << t[2] + 1 << "\n";
  }
  if (!os) throw IoError("write failed: " + path.string());
}

TriMesh load_obj(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open: " + path.string());
  TriMesh mesh;
  std::string line;
  while (std::getline(is, line)) {
    std::istringstream ls(line);
    std::string tok;
    ls >> tok;
    if (tok == "v") {
      double x, y, z;
      ls >> x >> y >> z;
      if (!ls) throw ParseError("obj: bad vertex line");
      mesh.vertices.emplace_back(x, y, z);
    } else if (tok == "f") {
      std::vector<std::uint32_t> idx;
      std::string item;
      while (ls >> item) {
        // Face entries may carry /vt/vn suffixes.
        const std::size_t slash = item.find('/');
        const long v = std::stol(item.substr(0, slash));
        if (v == 0) throw ParseError("obj: zero face index");
        idx.push_back(v > 0 ? static_cast<std::uint32_t>(v - 1)
                            : static_cast<std::uint32_t>(mesh.vertices.size() + v));
      }
      if (idx.size() < 3) throw ParseError("obj: face with fewer than 3 vertices");
      for (std::size_t k = 2; k < idx.size(); ++k) {
        mesh.triangles.push_back({idx[0], idx[k - 1], idx[k]});
      }
    }
  }
  for (const auto& t : mesh.triangles) {
    for (auto i : t) {
      if (i >= mesh.vertices.size()) throw ParseError("obj: face index out of range");
    }
  }
  return mesh;
}

void save_mesh(const TriMesh& mesh, const std::filesystem::path& path) {
  const auto ext = path.extension().string();
  if (ext == ".ply") save_ply(mesh, path);
  else if (ext == ".obj") save_obj(mesh, path);
  else throw IoError("unsupported mesh extension: " + ext);
}

TriMesh load_mesh(const std::filesystem::path& path) {
  const auto ext = path.extension().string();
  if (ext == ".ply") return load_ply(path);
  if (ext == ".obj") return load_obj(path);
  throw IoError("unsupported mesh extension: " + ext);
}

}  // namespace graspkit
