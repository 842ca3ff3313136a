#include "blursplat/scene/scene_io.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>

#include "blursplat/error.hpp"

namespace blursplat::scene {

void write_scene(std::ostream& os, const Scene& scene) {
  os << "# mu_x mu_y mu_z qw qx qy qz sx sy sz opacity r g b\n";
  os << std::setprecision(17);
  for (const Gaussian3D& g : scene) {
    os << g.mean.x() << ' ' << g.mean.y() << ' ' << g.mean.z() << ' ' << g.rotation(0) << ' '
       << g.rotation(1) << ' ' << g.rotation(2) << ' ' << g.rotation(3) << ' ' << g.scale.x()
       << ' ' << g.scale.y() << ' ' << g.scale.z() << ' ' << g.opacity << ' ' << g.color.x()
       << ' ' << g.color.y() << ' ' << g.color.z() << '\n';
  }
}

Scene read_scene(std::istream& is) {
  Scene scene;
  std::string line;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream ls(line);
    Gaussian3D g;
    ls >> g.mean.x() >> g.mean.y() >> g.mean.z() >> g.rotation(0) >> g.rotation(1) >>
        g.rotation(2) >> g.rotation(3) >> g.scale.x() >> g.scale.y() >> g.scale.z() >>
        g.opacity >> g.color.x() >> g.color.y() >> g.color.z();
    std::string extra;
    if (ls.fail() || (ls >> extra))
      throw IoError("scene line " + std::to_string(line_no) + ": expected 14 numbers");
    try {
      g.validate();
    } catch (const ContractError& e) {
      throw IoError("scene line " + std::to_string(line_no) + ": " + e.what());
    }
    scene.push_back(g);
  }
  return scene;
}

void save_scene(const std::filesystem::path& path, const Scene& scene) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot open " + path.string() + " for writing");
  write_scene(os, scene);
  if (!os) throw IoError("failed writing " + path.string());
}

Scene load_scene(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open " + path.string());
  return read_scene(is);
}

}  // namespace blursplat::scene
