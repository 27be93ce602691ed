#pragma once

#include <filesystem>

#include "graspkit/mesh.hpp"

namespace graspkit {

enum class PlyEncoding { BinaryLittleEndian, Ascii };

// PLY with optional per-vertex `nx ny nz`, float `confidence`, and uchar
// `posture` (0=NG, 1=MW, 2=T) properties. Positions are stored as float32.
void save_ply(const TriMesh& mesh, const std::filesystem::path& path,
              PlyEncoding encoding = PlyEncoding::BinaryLittleEndian);
TriMesh load_ply(const std::filesystem::path& path);

// ASCII OBJ, positions and faces only.
void save_obj(const TriMesh& mesh, const std::filesystem::path& path);
TriMesh load_obj(const std::filesystem::path& path);

// Dispatches on extension (.ply / .obj).
void save_mesh(const TriMesh& mesh, const std::filesystem::path& path);
TriMesh load_mesh(const std::filesystem::path& path);

}  // namespace graspkit
