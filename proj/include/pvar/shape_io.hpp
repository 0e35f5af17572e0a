#pragma once

#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>

#include "pvar/geometry.hpp"

namespace pvar {

/// Missing or unwritable files, unsupported extensions.
class IoError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Malformed shape file. `line()` is 1-based, 0 when the problem is not tied
/// to a line (e.g. a missing section).
class ParseError : public std::runtime_error {
public:
  ParseError(const std::string& what, int line)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}
  int line() const noexcept { return line_; }

private:
  int line_;
};

// Legacy ASCII VTK polydata:
//
//   # vtk DataFile Version 3.0
//   <title line>
//   ASCII
//   DATASET POLYDATA
//   POINTS <n> double
//   <x y z> x n
//   LINES <cells> <cells + total cell points>
//   <k i_0 ... i_{k-1}> x cells          (k-1 edges per cell)
//   [CELL_DATA <cells>
//    SCALARS label int 1
//    LOOKUP_TABLE default
//    <label> x cells]
//
// The writer emits one 2-point cell per edge and the shortest decimal form
// that round-trips each double exactly.
Polylines read_vtk_polylines(std::istream& in);
void write_vtk_polylines(const Polylines& shape, std::ostream& out);

// Wavefront OBJ subset: `v x y z` and `f a b c ...` records (1-based or
// negative indices, `a/t/n` forms accepted, polygons fan-triangulated).
// Other records are ignored.
TriMesh read_obj(std::istream& in);
void write_obj(const TriMesh& shape, std::ostream& out);

/// Dispatches on extension: .vtk -> curves, .obj -> mesh.
DiscreteShape read_shape(const std::filesystem::path& path);
void write_shape(const DiscreteShape& shape, const std::filesystem::path& path);

/// Writes to a sibling temporary file, then renames over `path`.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);

/// Shortest round-trip decimal representation.
std::string format_double(double value);

}  // namespace pvar
