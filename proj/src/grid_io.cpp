#include "spudd/errors.hpp"
#include "spudd/grid.hpp"

#include <bit>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string_view>

namespace spudd {

static_assert(std::endian::native == std::endian::little, "binary grid I/O assumes little-endian");

void save_grid(std::ostream& out, const GridSpec& spec, const std::vector<double>& values,
               GridEncoding encoding) {
  if (values.size() != spec.node_count()) throw Error("grid value count does not match dims");
  std::string buf = "spudd-grid 1\n";
  buf += "dims " + std::to_string(spec.dims[0]) + " " + std::to_string(spec.dims[1]) + " " +
         std::to_string(spec.dims[2]) + "\n";
  buf += "origin " + format_double(spec.origin.x()) + " " + format_double(spec.origin.y()) + " " +
         format_double(spec.origin.z()) + "\n";
  buf += "spacing " + format_double(spec.spacing) + "\n";
  if (encoding == GridEncoding::Binary) {
    buf += "data binary\n";
    const std::size_t head = buf.size();
    buf.resize(head + values.size() * sizeof(double));
    std::memcpy(buf.data() + head, values.data(), values.size() * sizeof(double));
  } else {
    buf += "data ascii\n";
    const std::size_t nx = static_cast<std::size_t>(spec.dims[0]);
    for (std::size_t n = 0; n < values.size(); ++n) {
      buf += format_double(values[n]);
      buf += (n + 1) % nx == 0 ? '\n' : ' ';
    }
  }
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
}

namespace {

void write_file(const std::string& path, const GridSpec& spec, const std::vector<double>& values,
                GridEncoding encoding) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  save_grid(out, spec, values, encoding);
  if (!out) throw Error("write failed for " + path);
}

class Cursor {
 public:
  explicit Cursor(const std::string& bytes) : s_(bytes) {}

  std::size_t pos() const { return pos_; }
  bool at_end() const { return pos_ >= s_.size(); }

  void expect(std::string_view word) {
    if (s_.compare(pos_, word.size(), word) != 0)
      throw FormatError("expected '" + std::string(word) + "'", pos_);
    pos_ += word.size();
  }
  void space() {
    if (pos_ >= s_.size() || s_[pos_] != ' ') throw FormatError("expected a space", pos_);
    while (pos_ < s_.size() && s_[pos_] == ' ') ++pos_;
  }
  void newline() {
    if (pos_ >= s_.size() || s_[pos_] != '\n') throw FormatError("expected end of line", pos_);
    ++pos_;
  }
  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  template <class T>
  T number() {
    T v{};
    const char* first = s_.data() + pos_;
    const char* last = s_.data() + s_.size();
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr == first) throw FormatError("expected a number", pos_);
    pos_ += static_cast<std::size_t>(ptr - first);
    return v;
  }
  std::string_view rest() const { return std::string_view(s_).substr(pos_); }
  void advance(std::size_t n) { pos_ += n; }

 private:
  const std::string& s_;
  std::size_t pos_ = 0;
};

}  // namespace

void save_grid(const std::string& path, const UdfGrid& grid, GridEncoding encoding) {
  write_file(path, grid.spec, grid.values, encoding);
}

void save_grid(const std::string& path, const SdfGrid& grid, GridEncoding encoding) {
  write_file(path, grid.spec, grid.values, encoding);
}

SdfGrid parse_grid(const std::string& bytes) {
  Cursor c(bytes);
  SdfGrid g;
  c.expect("spudd-grid 1");
  c.newline();

  c.expect("dims");
  for (int a = 0; a < 3; ++a) {
    c.space();
    const std::size_t at = c.pos();
    g.spec.dims[a] = c.number<int>();
    if (g.spec.dims[a] < 2) throw FormatError("dims must be at least 2", at);
  }
  c.newline();

  c.expect("origin");
  for (int a = 0; a < 3; ++a) {
    c.space();
    g.spec.origin[a] = c.number<double>();
  }
  c.newline();

  c.expect("spacing");
  c.space();
  const std::size_t at = c.pos();
  g.spec.spacing = c.number<double>();
  if (!(g.spec.spacing > 0.0) || !std::isfinite(g.spec.spacing))
    throw FormatError("spacing must be positive", at);
  c.newline();

  c.expect("data");
  c.space();
  const std::size_t count = g.spec.node_count();
  g.values.resize(count);
  if (c.rest().starts_with("binary")) {
    c.expect("binary");
    c.newline();
    const std::size_t need = count * sizeof(double);
    if (c.rest().size() < need)
      throw FormatError("binary payload is short by " + std::to_string(need - c.rest().size()) +
                            " bytes",
                        bytes.size());
    std::memcpy(g.values.data(), c.rest().data(), need);
    c.advance(need);
    if (!c.at_end()) throw FormatError("trailing bytes after binary payload", c.pos());
  } else {
    c.expect("ascii");
    c.newline();
    for (std::size_t n = 0; n < count; ++n) {
      c.skip_ws();
      if (c.at_end())
        throw FormatError("ascii payload has " + std::to_string(n) + " of " +
                              std::to_string(count) + " values",
                          c.pos());
      g.values[n] = c.number<double>();
    }
    c.skip_ws();
    if (!c.at_end()) throw FormatError("trailing data after ascii payload", c.pos());
  }
  for (double v : g.values) {
    if (!std::isfinite(v)) throw FormatError("non-finite grid value", c.pos());
  }
  return g;
}

SdfGrid load_signed_grid(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_grid(bytes);
}

UdfGrid load_grid(const std::string& path) {
  SdfGrid g = load_signed_grid(path);
  for (std::size_t n = 0; n < g.values.size(); ++n) {
    if (g.values[n] < 0.0)
      throw Error(path + ": value " + std::to_string(n) + " is negative; expected unsigned distances");
  }
  return UdfGrid{g.spec, std::move(g.values)};
}

}  // namespace spudd
