#include "pvar/shape_io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>
#include <string_view>
#include <vector>

namespace pvar {

namespace {

struct Token {
  std::string text;
  int line;
};

class TokenStream {
public:
  explicit TokenStream(std::istream& in) {
    std::string line;
    int number = 0;
    while (std::getline(in, line)) {
      ++number;
      if (number <= 2) {
        // header and free-form title
        header_.push_back(line);
        continue;
      }
      std::istringstream ls(line);
      std::string word;
      while (ls >> word) tokens_.push_back({word, number});
    }
  }

  const std::vector<std::string>& header() const { return header_; }
  bool done() const { return pos_ >= tokens_.size(); }
  int line() const {
    if (tokens_.empty()) return 0;
    return done() ? tokens_.back().line : tokens_[pos_].line;
  }
  const Token& next(const char* expecting) {
    if (done()) throw ParseError(std::string("unexpected end of file, expected ") + expecting, line());
    return tokens_[pos_++];
  }
  const Token& peek() const { return tokens_[pos_]; }

private:
  std::vector<std::string> header_;
  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
};

template <typename T>
T parse_number(const Token& tok, const char* what) {
  T value{};
  const char* first = tok.text.data();
  const char* last = first + tok.text.size();
  if (*first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last)
    throw ParseError(std::string("invalid ") + what + " '" + tok.text + "'", tok.line);
  return value;
}

std::string upper(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  return s;
}

std::string extension_of(const std::filesystem::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return ext;
}

}  // namespace

std::string format_double(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ptr);
}

Polylines read_vtk_polylines(std::istream& in) {
  TokenStream ts(in);
  if (ts.header().empty() || ts.header()[0].rfind("# vtk DataFile", 0) != 0)
    throw ParseError("missing '# vtk DataFile' header", 1);

  Polylines out;
  bool have_points = false;
  bool have_lines = false;
  bool ascii = false;
  std::vector<int> cell_of_edge;
  std::size_t cell_count = 0;

  while (!ts.done()) {
    const Token& kw = ts.next("keyword");
    const std::string key = upper(kw.text);
    if (key == "ASCII") {
      ascii = true;
    } else if (key == "BINARY") {
      throw ParseError("binary VTK files are not supported", kw.line);
    } else if (key == "DATASET") {
      const Token& type = ts.next("dataset type");
      if (upper(type.text) != "POLYDATA")
        throw ParseError("unsupported dataset '" + type.text + "'", type.line);
    } else if (key == "POINTS") {
      if (!ascii) throw ParseError("POINTS before ASCII declaration", kw.line);
      const long n = parse_number<long>(ts.next("point count"), "point count");
      if (n < 0) throw ParseError("negative point count", kw.line);
      ts.next("point type");
      out.vertices.resize(n);
      for (long i = 0; i < n; ++i)
        for (int c = 0; c < 3; ++c)
          out.vertices[i][c] = parse_number<double>(ts.next("coordinate"), "coordinate");
      have_points = true;
    } else if (key == "LINES") {
      if (!have_points) throw ParseError("LINES section without POINTS", kw.line);
      const long cells = parse_number<long>(ts.next("cell count"), "cell count");
      const long size = parse_number<long>(ts.next("cell list size"), "cell list size");
      long consumed = 0;
      for (long c = 0; c < cells; ++c) {
        const Token& kt = ts.next("cell size");
        const long k = parse_number<long>(kt, "cell size");
        if (k < 2) throw ParseError("line cell with fewer than 2 points", kt.line);
        int prev = -1;
        for (long j = 0; j < k; ++j) {
          const Token& it = ts.next("point index");
          const long idx = parse_number<long>(it, "point index");
          if (idx < 0 || idx >= static_cast<long>(out.vertices.size()))
            throw ParseError("point index " + it.text + " out of range", it.line);
          if (j > 0) {
            out.edges.push_back({prev, static_cast<int>(idx)});
            cell_of_edge.push_back(static_cast<int>(c));
          }
          prev = static_cast<int>(idx);
        }
        consumed += k + 1;
      }
      if (consumed != size)
        throw ParseError("LINES size " + std::to_string(size) + " does not match contents (" +
                             std::to_string(consumed) + ")",
                         kw.line);
      cell_count = static_cast<std::size_t>(cells);
      have_lines = true;
    } else if (key == "CELL_DATA") {
      const Token& nt = ts.next("cell data count");
      const long n = parse_number<long>(nt, "cell data count");
      if (!have_lines || n != static_cast<long>(cell_count))
        throw ParseError("CELL_DATA count does not match LINES", nt.line);
      const Token& sc = ts.next("SCALARS");
      if (upper(sc.text) != "SCALARS")
        throw ParseError("expected SCALARS after CELL_DATA", sc.line);
      ts.next("scalar name");
      ts.next("scalar type");
      if (!ts.done() && upper(ts.peek().text) != "LOOKUP_TABLE") ts.next("component count");
      const Token& lt = ts.next("LOOKUP_TABLE");
      if (upper(lt.text) != "LOOKUP_TABLE") throw ParseError("expected LOOKUP_TABLE", lt.line);
      ts.next("lookup table name");
      std::vector<int> cell_labels(n);
      for (long c = 0; c < n; ++c) cell_labels[c] = parse_number<int>(ts.next("label"), "label");
      out.labels.resize(out.edges.size());
      for (std::size_t e = 0; e < out.edges.size(); ++e)
        out.labels[e] = cell_labels[cell_of_edge[e]];
    } else {
      throw ParseError("unsupported keyword '" + kw.text + "'", kw.line);
    }
  }
  if (!have_points) throw ParseError("missing POINTS section", 0);
  if (!have_lines) throw ParseError("missing LINES section", 0);
  return out;
}

void write_vtk_polylines(const Polylines& shape, std::ostream& out) {
  out << "# vtk DataFile Version 3.0\n"
      << "pvar polylines\n"
      << "ASCII\n"
      << "DATASET POLYDATA\n"
      << "POINTS " << shape.vertices.size() << " double\n";
  for (const auto& v : shape.vertices)
    out << format_double(v.x()) << ' ' << format_double(v.y()) << ' ' << format_double(v.z())
        << '\n';
  out << "LINES " << shape.edges.size() << ' ' << 3 * shape.edges.size() << '\n';
  for (const auto& e : shape.edges) out << "2 " << e[0] << ' ' << e[1] << '\n';
  if (!shape.labels.empty()) {
    out << "CELL_DATA " << shape.labels.size() << '\n'
        << "SCALARS label int 1\n"
        << "LOOKUP_TABLE default\n";
    for (int l : shape.labels) out << l << '\n';
  }
}

TriMesh read_obj(std::istream& in) {
  TriMesh out;
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    std::istringstream ls(line);
    std::string tag;
    if (!(ls >> tag) || tag[0] == '#') continue;
    if (tag == "v") {
      Vec3 p;
      for (int c = 0; c < 3; ++c) {
        std::string word;
        if (!(ls >> word)) throw ParseError("vertex record needs 3 coordinates", number);
        p[c] = parse_number<double>({word, number}, "coordinate");
      }
      out.vertices.push_back(p);
    } else if (tag == "f") {
      std::vector<int> poly;
      std::string word;
      while (ls >> word) {
        const std::string head = word.substr(0, word.find('/'));
        long idx = parse_number<long>({head, number}, "face index");
        const long n = static_cast<long>(out.vertices.size());
        if (idx < 0) idx = n + idx + 1;
        if (idx < 1 || idx > n)
          throw ParseError("face index " + head + " out of range", number);
        poly.push_back(static_cast<int>(idx - 1));
      }
      if (poly.size() < 3) throw ParseError("face with fewer than 3 vertices", number);
      for (std::size_t k = 1; k + 1 < poly.size(); ++k)
        out.faces.push_back({poly[0], poly[k], poly[k + 1]});
    }
  }
  if (out.faces.empty()) throw ParseError("OBJ file has no faces", 0);
  return out;
}

void write_obj(const TriMesh& shape, std::ostream& out) {
  for (const auto& v : shape.vertices)
    out << "v " << format_double(v.x()) << ' ' << format_double(v.y()) << ' '
        << format_double(v.z()) << '\n';
  for (const auto& f : shape.faces)
    out << "f " << f[0] + 1 << ' ' << f[1] + 1 << ' ' << f[2] + 1 << '\n';
}

DiscreteShape read_shape(const std::filesystem::path& path) {
  const std::string ext = extension_of(path);
  if (ext != ".vtk" && ext != ".obj")
    throw IoError("unsupported shape extension '" + ext + "' (expected .vtk or .obj)");
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  if (ext == ".vtk") return DiscreteShape(read_vtk_polylines(in));
  return DiscreteShape(read_obj(in));
}

void write_shape(const DiscreteShape& shape, const std::filesystem::path& path) {
  const std::string ext = extension_of(path);
  std::ostringstream out;
  if (ext == ".vtk" && !shape.is_mesh())
    write_vtk_polylines(shape.curves(), out);
  else if (ext == ".obj" && shape.is_mesh())
    write_obj(shape.mesh(), out);
  else
    throw IoError("extension '" + ext + "' does not match the shape kind");
  write_file_atomic(path, out.str());
}

void write_file_atomic(const std::filesystem::path& path, const std::string& contents) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write '" + tmp.string() + "'");
    out << contents;
    out.flush();
    if (!out) throw IoError("write failed for '" + tmp.string() + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("cannot rename onto '" + path.string() + "': " + ec.message());
}

}  // namespace pvar
