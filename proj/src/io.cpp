#include "s2hess/io.hpp"

#include <bit>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace s2hess {
namespace fs = std::filesystem;
using nlohmann::json;

static_assert(std::endian::native == std::endian::little, "dump format assumes a little-endian host");

namespace {

std::vector<std::string> axis_names(const Grid& g) {
  std::vector<std::string> axes;
  for (int j = 0; j < g.n(); ++j) {
    if (g.kind() == Ambient::complex) {
      axes.push_back("x" + std::to_string(j + 1));
      axes.push_back("y" + std::to_string(j + 1));
    } else {
      axes.push_back("x" + std::to_string(j + 1));
    }
  }
  return axes;
}

void write_block(const fs::path& dir, const std::string& name, const std::vector<const ScalarField*>& parts,
                 std::vector<int> lead_shape, std::vector<std::string> lead_axes, const char* symmetry) {
  require(!parts.empty(), ErrorCode::invalid_argument, "write: nothing to dump");
  std::error_code ec;
  fs::create_directories(dir, ec);
  const Grid& g = parts.front()->grid();
  bool real = true;
  for (const auto* p : parts) real = real && p->real_flag();

  std::ofstream bin(dir / (name + ".bin"), std::ios::binary);
  require(bin.good(), ErrorCode::io, "cannot open " + (dir / (name + ".bin")).string());
  for (const auto* p : parts) {
    if (real) {
      std::vector<double> buf(p->size());
      for (std::size_t i = 0; i < buf.size(); ++i) buf[i] = (*p)[i].real();
      bin.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size() * sizeof(double)));
    } else {
      bin.write(reinterpret_cast<const char*>(p->values().data()),
                static_cast<std::streamsize>(p->size() * sizeof(cplx)));
    }
  }
  require(bin.good(), ErrorCode::io, "write failed for " + name);

  json head;
  head["name"] = name;
  std::vector<int> shape = lead_shape;
  for (int a = 0; a < g.dims(); ++a) shape.push_back(g.points());
  head["shape"] = shape;
  std::vector<std::string> axes = lead_axes;
  for (auto& a : axis_names(g)) axes.push_back(a);
  head["axes"] = axes;
  head["dtype"] = real ? "f64" : "c128";
  head["ambient"] = to_string(g.kind());
  head["n"] = g.n();
  head["points"] = g.points();
  head["margin"] = g.margin();
  if (symmetry) head["symmetry"] = symmetry;
  write_text(dir / (name + ".json"), head.dump(2) + "\n");
}

struct Loaded {
  json head;
  Grid grid;
  std::vector<ScalarField> parts;
};

Loaded read_block(const fs::path& dir, const std::string& name) {
  json head;
  try {
    head = json::parse(read_text(dir / (name + ".json")));
  } catch (const json::exception& e) {
    fail(ErrorCode::parse, "bad sidecar for " + name + ": " + e.what());
  }
  Ambient kind = Ambient::real;
  int n = 0, points = 0, margin = 0;
  std::string dtype;
  std::vector<int> shape;
  try {
    kind = head.at("ambient").get<std::string>() == "complex" ? Ambient::complex : Ambient::real;
    n = head.at("n").get<int>();
    points = head.at("points").get<int>();
    margin = head.value("margin", 0);
    dtype = head.at("dtype").get<std::string>();
    shape = head.at("shape").get<std::vector<int>>();
  } catch (const json::exception& e) {
    fail(ErrorCode::parse, "incomplete sidecar for " + name + ": " + e.what());
  }
  require(dtype == "f64" || dtype == "c128", ErrorCode::parse, "unknown dtype " + dtype);
  Grid grid(kind, n, points, margin);
  const int lead = static_cast<int>(shape.size()) - grid.dims();
  require(lead >= 0, ErrorCode::parse, "shape shorter than the grid rank in " + name);
  std::size_t count = 1;
  for (int a = 0; a < lead; ++a) count *= static_cast<std::size_t>(shape[a]);

  std::ifstream bin(dir / (name + ".bin"), std::ios::binary);
  require(bin.good(), ErrorCode::io, "cannot open " + (dir / (name + ".bin")).string());
  std::vector<ScalarField> parts;
  for (std::size_t c = 0; c < count; ++c) {
    std::vector<cplx> vals(grid.size());
    if (dtype == "f64") {
      std::vector<double> buf(grid.size());
      bin.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size() * sizeof(double)));
      for (std::size_t i = 0; i < buf.size(); ++i) vals[i] = buf[i];
    } else {
      bin.read(reinterpret_cast<char*>(vals.data()), static_cast<std::streamsize>(vals.size() * sizeof(cplx)));
    }
    require(bin.good(), ErrorCode::io, "truncated dump " + name);
    parts.emplace_back(grid, std::move(vals));
  }
  return {std::move(head), grid, std::move(parts)};
}

}  // namespace

std::string read_text(const fs::path& path) {
  std::ifstream in(path);
  require(in.good(), ErrorCode::io, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path);
  require(out.good(), ErrorCode::io, "cannot write " + path.string());
  out << text;
  require(out.good(), ErrorCode::io, "write failed for " + path.string());
}

void write_field(const fs::path& dir, const std::string& name, const ScalarField& f) {
  write_block(dir, name, {&f}, {}, {}, nullptr);
}

void write_vector(const fs::path& dir, const std::string& name, const std::vector<ScalarField>& components) {
  std::vector<const ScalarField*> parts;
  for (const auto& c : components) parts.push_back(&c);
  write_block(dir, name, parts, {static_cast<int>(components.size())}, {"component"}, nullptr);
}

void write_matrix(const fs::path& dir, const std::string& name, const MatrixField& m) {
  std::vector<const ScalarField*> parts;
  for (int i = 0; i < m.order(); ++i)
    for (int j = 0; j < m.order(); ++j) parts.push_back(&m(i, j));
  write_block(dir, name, parts, {m.order(), m.order()}, {"row", "col"}, to_string(m.symmetry()));
}

ScalarField read_field(const fs::path& dir, const std::string& name) {
  auto l = read_block(dir, name);
  require(l.parts.size() == 1, ErrorCode::parse, name + " is not a scalar field dump");
  return std::move(l.parts.front());
}

std::vector<ScalarField> read_vector(const fs::path& dir, const std::string& name) {
  return read_block(dir, name).parts;
}

MatrixField read_matrix(const fs::path& dir, const std::string& name) {
  auto l = read_block(dir, name);
  const std::string sym = l.head.value("symmetry", std::string("none"));
  Symmetry s = Symmetry::none;
  if (sym == "hermitian") s = Symmetry::hermitian;
  else if (sym == "real-symmetric") s = Symmetry::real_symmetric;
  int order = 0;
  while (static_cast<std::size_t>(order * order) < l.parts.size()) ++order;
  require(static_cast<std::size_t>(order * order) == l.parts.size(), ErrorCode::parse,
          name + " does not hold a square matrix field");
  MatrixField m(l.grid, order, s);
  for (int i = 0; i < order; ++i)
    for (int j = 0; j < order; ++j) m(i, j) = std::move(l.parts[i * order + j]);
  return m;
}

void write_slice_csv(const fs::path& path, const ScalarField& f, int axis) {
  const Grid& g = f.grid();
  require(axis >= 0 && axis < g.dims(), ErrorCode::invalid_argument, "slice axis out of range");
  std::vector<int> idx(g.dims(), (g.points() - 1) / 2);
  const bool real = f.real_flag();
  std::ostringstream out;
  out.precision(17);
  out << (real ? "x,value\n" : "x,real,imag\n");
  for (int c = 0; c < g.points(); ++c) {
    idx[axis] = c;
    const cplx v = f[g.flatten(idx)];
    out << c * g.spacing() << ',' << v.real();
    if (!real) out << ',' << v.imag();
    out << '\n';
  }
  write_text(path, out.str());
}

}  // namespace s2hess
