#pragma once

#include <filesystem>
#include <map>
#include <string>

#include "dbfft/field.hpp"

namespace dbfft {

/// Point fields of one legacy VTK snapshot.
struct VtkSnapshot {
  GridPtr grid;
  std::string title;
  /// Vector fields (Layout::Vector) and tensor fields (Layout::Tensor).
  std::map<std::string, RealField> fields;
};

/// Total displacement G x + u~ at voxel centers, scaled by `magnification`.
RealField total_displacement(const RealField& fluctuation, const Mat3& macro_gradient, double magnification = 1.0);

/// Writes a legacy ASCII STRUCTURED_POINTS file with point data: the
/// displacement as VECTORS and every tensor field (symmetric or full) as a
/// 3x3 TENSORS block. `title` goes on the header line.
void export_vtk(const std::filesystem::path& path, const std::string& title, const RealField& displacement,
                const std::map<std::string, const RealField*>& tensors);

/// Reads files written by export_vtk (VECTORS, TENSORS and SCALARS blocks).
VtkSnapshot read_vtk(const std::filesystem::path& path);

}  // namespace dbfft
