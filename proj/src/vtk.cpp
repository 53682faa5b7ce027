#include "dbfft/vtk.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "dbfft/errors.hpp"

namespace dbfft {

RealField total_displacement(const RealField& fluctuation, const Mat3& macro_gradient, double magnification) {
  if (fluctuation.layout() != Layout::Vector) throw ContractError("total_displacement expects a vector field");
  const Grid& g = fluctuation.grid();
  RealField u(fluctuation.grid_ptr(), Layout::Vector);
  for (std::size_t v = 0; v < g.voxel_count(); ++v) {
    const auto x = g.voxel_center(v);
    const Vec3 d = macro_gradient * Vec3(x[0], x[1], x[2]) + fluctuation.vector_at(v);
    u.set_vector(v, magnification * d);
  }
  return u;
}

namespace {

void write_number(std::ostream& os, double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v == 0.0 ? 0.0 : v);
  os << buf;
}

}  // namespace

void export_vtk(const std::filesystem::path& path, const std::string& title, const RealField& displacement,
                const std::map<std::string, const RealField*>& tensors) {
  if (displacement.layout() != Layout::Vector) throw ContractError("export_vtk: displacement must be a vector field");
  if (title.find('\n') != std::string::npos || title.size() > 255)
    throw ContractError("export_vtk: title must be a single line of at most 255 characters");
  const Grid& g = displacement.grid();
  for (const auto& [name, f] : tensors) {
    if (f->layout() == Layout::Vector) throw ContractError("export_vtk: " + name + " is not a tensor field");
    if (!(f->grid() == g)) throw ContractError("export_vtk: " + name + " lives on another grid");
  }

  std::ofstream os(path);
  if (!os) throw FormatError("cannot open " + path.string() + " for writing");
  os << "# vtk DataFile Version 3.0\n" << title << "\nASCII\nDATASET STRUCTURED_POINTS\n";
  os << "DIMENSIONS " << g.n(0) << ' ' << g.n(1) << ' ' << g.n(2) << '\n';
  os << "ORIGIN ";
  write_number(os, 0.5 * g.spacing(0));
  os << ' ';
  write_number(os, 0.5 * g.spacing(1));
  os << ' ';
  write_number(os, 0.5 * g.spacing(2));
  os << "\nSPACING ";
  write_number(os, g.spacing(0));
  os << ' ';
  write_number(os, g.spacing(1));
  os << ' ';
  write_number(os, g.spacing(2));
  os << "\nPOINT_DATA " << g.voxel_count() << '\n';

  os << "VECTORS displacement double\n";
  for (std::size_t v = 0; v < g.voxel_count(); ++v) {
    for (int c = 0; c < 3; ++c) {
      if (c) os << ' ';
      write_number(os, displacement(c, v));
    }
    os << '\n';
  }
  for (const auto& [name, f] : tensors) {
    os << "TENSORS " << name << " double\n";
    for (std::size_t v = 0; v < g.voxel_count(); ++v) {
      const Mat3 t = f->tensor_at(v);
      for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
          if (j) os << ' ';
          write_number(os, t(i, j));
        }
        os << '\n';
      }
    }
  }
  if (!os) throw FormatError("write failed: " + path.string());
}

VtkSnapshot read_vtk(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw FormatError("cannot open " + path.string());
  std::string line;
  const auto fail = [&](const std::string& why) { throw FormatError(path.string() + ": " + why); };
  if (!std::getline(is, line) || line.rfind("# vtk DataFile", 0) != 0) fail("not a legacy VTK file");
  VtkSnapshot snap;
  std::getline(is, snap.title);
  std::string word;
  if (!(is >> word) || word != "ASCII") fail("only ASCII files are supported");
  if (!(is >> word >> line) || word != "DATASET" || line != "STRUCTURED_POINTS") fail("expected STRUCTURED_POINTS");

  std::array<std::size_t, 3> n{};
  std::array<double, 3> spacing{1.0, 1.0, 1.0};
  std::size_t points = 0;
  while (is >> word) {
    if (word == "DIMENSIONS") {
      is >> n[0] >> n[1] >> n[2];
    } else if (word == "ORIGIN") {
      double o;
      is >> o >> o >> o;
    } else if (word == "SPACING") {
      is >> spacing[0] >> spacing[1] >> spacing[2];
    } else if (word == "POINT_DATA") {
      is >> points;
      break;
    } else {
      fail("unexpected keyword " + word);
    }
  }
  if (!is) fail("truncated header");
  try {
    snap.grid = make_grid(n, {spacing[0] * n[0], spacing[1] * n[1], spacing[2] * n[2]});
  } catch (const InvalidGrid& e) {
    fail(std::string("invalid dimensions: ") + e.what());
  }
  if (points != snap.grid->voxel_count()) fail("POINT_DATA does not match DIMENSIONS");

  while (is >> word) {
    std::string name, type;
    if (!(is >> name >> type)) fail("truncated field header");
    Layout layout = Layout::Vector;
    int width = 0;
    if (word == "VECTORS") {
      layout = Layout::Vector;
      width = 3;
    } else if (word == "TENSORS") {
      layout = Layout::Tensor;
      width = 9;
    } else if (word == "SCALARS") {
      std::string next;
      is >> next;
      if (next != "LOOKUP_TABLE") {
        if (!(is >> next) || next != "LOOKUP_TABLE") fail("SCALARS without LOOKUP_TABLE");
      }
      is >> next;
      // Stored as a one-component-per-voxel vector field with zero y, z.
      layout = Layout::Vector;
      width = 1;
    } else {
      fail("unsupported block " + word);
    }
    RealField f(snap.grid, layout);
    for (std::size_t v = 0; v < points; ++v)
      for (int c = 0; c < width; ++c)
        if (!(is >> f(c, v))) fail("truncated data in " + name);
    snap.fields.emplace(name, std::move(f));
  }
  return snap;
}

}  // namespace dbfft
