#include <fstream>
#include <sstream>

#include "rope/geometry.hpp"

namespace rope {

namespace {

struct PropertyLayout {
  int x = -1, y = -1, z = -1;
  int count = 0;
};

}  // namespace

PointCloud LoadPly(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open PLY file: " + path);

  std::string line;
  if (!std::getline(in, line) || line.rfind("ply", 0) != 0)
    throw std::runtime_error("not a PLY file: " + path);

  long vertex_count = -1;
  PropertyLayout layout;
  bool in_vertex_element = false;
  bool ascii = false;

  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string tok;
    ls >> tok;
    if (tok == "format") {
      std::string fmt;
      ls >> fmt;
      ascii = (fmt == "ascii");
    } else if (tok == "element") {
      std::string name;
      long count = 0;
      ls >> name >> count;
      in_vertex_element = (name == "vertex");
      if (in_vertex_element) vertex_count = count;
    } else if (tok == "property" && in_vertex_element) {
      std::string type, name;
      ls >> type >> name;
      if (type == "list") throw std::runtime_error("list property in vertex element unsupported");
      if (name == "x") layout.x = layout.count;
      if (name == "y") layout.y = layout.count;
      if (name == "z") layout.z = layout.count;
      ++layout.count;
    } else if (tok == "end_header") {
      break;
    }
  }
  if (!ascii) throw std::runtime_error("only ASCII PLY is supported: " + path);
  if (vertex_count < 0) throw std::runtime_error("PLY has no vertex element: " + path);
  if (layout.x < 0 || layout.y < 0 || layout.z < 0)
    throw std::runtime_error("PLY vertex element lacks x/y/z: " + path);

  PointCloud cloud;
  cloud.points.reserve(static_cast<size_t>(vertex_count));
  std::vector<double> row(layout.count);
  for (long i = 0; i < vertex_count; ++i) {
    if (!std::getline(in, line)) throw std::runtime_error("truncated PLY: " + path);
    std::istringstream ls(line);
    for (int c = 0; c < layout.count; ++c)
      if (!(ls >> row[c])) throw std::runtime_error("malformed PLY vertex row: " + path);
    cloud.points.emplace_back(row[layout.x], row[layout.y], row[layout.z]);
  }
  return cloud;
}

void SavePly(const PointCloud& cloud, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write PLY file: " + path);
  out << "ply\nformat ascii 1.0\n";
  out << "comment units millimetres\n";
  out << "element vertex " << cloud.points.size() << "\n";
  out << "property float x\nproperty float y\nproperty float z\n";
  out << "end_header\n";
  out.precision(9);
  for (const auto& p : cloud.points) out << p.x() << " " << p.y() << " " << p.z() << "\n";
}

}  // namespace rope
