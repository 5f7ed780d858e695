#include "cpe/io.hpp"

#include <bit>
#include <cerrno>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>

namespace cpe {

namespace {

constexpr char magic[4] = {'C', 'P', 'E', '1'};
constexpr std::size_t name_bytes = 32;

void put_u64(std::vector<unsigned char>& out, std::uint64_t v) {
  for (int b = 0; b < 8; ++b) out.push_back(static_cast<unsigned char>(v >> (8 * b)));
}

std::uint64_t get_u64(const std::vector<unsigned char>& in, std::size_t& pos) {
  if (pos + 8 > in.size()) throw IoError("field dump truncated");
  std::uint64_t v = 0;
  for (int b = 0; b < 8; ++b) v |= static_cast<std::uint64_t>(in[pos + b]) << (8 * b);
  pos += 8;
  return v;
}

}  // namespace

const DumpField* FieldDump::find(const std::string& name) const {
  for (const DumpField& f : fields)
    if (f.name == name) return &f;
  return nullptr;
}

std::vector<unsigned char> encode_dump(const FieldDump& d) {
  const std::size_t n = d.nx1 * d.nx2 * d.nz;
  std::vector<unsigned char> out(magic, magic + 4);
  put_u64(out, d.nx1);
  put_u64(out, d.nx2);
  put_u64(out, d.nz);
  put_u64(out, d.fields.size());
  for (const DumpField& f : d.fields) {
    if (f.name.empty() || f.name.size() > name_bytes)
      throw IoError("field name must have 1..32 characters: '" + f.name + "'");
    if (f.values.size() != n) throw IoError("field '" + f.name + "' has the wrong length");
    for (std::size_t c = 0; c < name_bytes; ++c)
      out.push_back(c < f.name.size() ? static_cast<unsigned char>(f.name[c]) : 0);
    for (double v : f.values) put_u64(out, std::bit_cast<std::uint64_t>(v));
  }
  return out;
}

FieldDump decode_dump(const std::vector<unsigned char>& in) {
  if (in.size() < 4 || std::memcmp(in.data(), magic, 4) != 0)
    throw IoError("not a field dump (bad magic)");
  std::size_t pos = 4;
  FieldDump d;
  d.nx1 = get_u64(in, pos);
  d.nx2 = get_u64(in, pos);
  d.nz = get_u64(in, pos);
  const std::uint64_t count = get_u64(in, pos);
  const std::uint64_t n = d.nx1 * d.nx2 * d.nz;
  if (d.nx1 == 0 || d.nx2 == 0 || d.nz == 0 || n / d.nx1 / d.nx2 != d.nz)
    throw IoError("field dump has an invalid shape");
  for (std::uint64_t f = 0; f < count; ++f) {
    if (pos + name_bytes > in.size()) throw IoError("field dump truncated");
    DumpField field;
    for (std::size_t c = 0; c < name_bytes && in[pos + c] != 0; ++c)
      field.name.push_back(static_cast<char>(in[pos + c]));
    pos += name_bytes;
    if ((in.size() - pos) / 8 < n) throw IoError("field dump truncated");
    field.values.resize(n);
    for (std::uint64_t k = 0; k < n; ++k) field.values[k] = std::bit_cast<double>(get_u64(in, pos));
    d.fields.push_back(std::move(field));
  }
  if (pos != in.size()) throw IoError("field dump has trailing bytes");
  return d;
}

void write_dump(const std::string& path, const FieldDump& d) {
  const std::vector<unsigned char> bytes = encode_dump(d);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed: '" + path + "'");
}

FieldDump read_dump(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
  return decode_dump(bytes);
}

FieldDump state_dump(const ModelState& s) {
  const GridSpec& g = s.grid();
  FieldDump d;
  d.nx1 = g.nx1;
  d.nx2 = g.nx2;
  d.nz = g.nz;
  DumpField xi{"xi", std::vector<double>(g.cells())};
  DumpField w{"w", std::vector<double>(g.cells())};
  for (int i = 0; i < g.nx1; ++i)
    for (int j = 0; j < g.nx2; ++j)
      for (int k = 0; k < g.nz; ++k) {
        const std::size_t n = s.u1.index(i, j, k);
        xi.values[n] = s.xi(i, j);
        w.values[n] = 0.5 * (s.w(i, j, k) + s.w(i, j, k + 1));
      }
  const auto u1 = s.u1.values(), u2 = s.u2.values();
  d.fields.push_back(std::move(xi));
  d.fields.push_back({"u1", {u1.begin(), u1.end()}});
  d.fields.push_back({"u2", {u2.begin(), u2.end()}});
  d.fields.push_back(std::move(w));
  return d;
}

ModelState state_from_dump(const FieldDump& d, const GridSpec& g, double xi_floor) {
  if (d.nx1 != static_cast<std::uint64_t>(g.nx1) || d.nx2 != static_cast<std::uint64_t>(g.nx2) ||
      d.nz != static_cast<std::uint64_t>(g.nz))
    throw IoError("field dump shape does not match the configured grid");
  const DumpField* xi = d.find("xi");
  const DumpField* u1 = d.find("u1");
  const DumpField* u2 = d.find("u2");
  if (!xi || !u1 || !u2) throw IoError("field dump lacks xi, u1 or u2");
  Field2D x(g);
  Field3D a(g), b(g);
  for (int i = 0; i < g.nx1; ++i)
    for (int j = 0; j < g.nx2; ++j) {
      double acc = 0.0;
      for (int k = 0; k < g.nz; ++k) acc += xi->values[a.index(i, j, k)];
      x(i, j) = acc / g.nz;
    }
  std::copy(u1->values.begin(), u1->values.end(), a.values().begin());
  std::copy(u2->values.begin(), u2->values.end(), b.values().begin());
  if (!x.is_finite() || !a.is_finite() || !b.is_finite())
    throw IoError("field dump contains non-finite values");
  return make_state(x, a, b, xi_floor);
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

CsvWriter::CsvWriter(const std::string& path, const std::vector<std::string>& columns)
    : width_(columns.size()), path_(path) {
  f_ = std::fopen(path.c_str(), "wb");
  if (!f_) throw IoError("cannot open '" + path + "' for writing: " + std::strerror(errno));
  std::string line;
  for (std::size_t c = 0; c < columns.size(); ++c) line += (c ? "," : "") + columns[c];
  line += "\n";
  if (std::fputs(line.c_str(), f_) < 0 || std::fflush(f_) != 0)
    throw IoError("write failed: '" + path + "'");
}

CsvWriter::~CsvWriter() {
  if (f_) std::fclose(f_);
}

void CsvWriter::row(const std::vector<double>& values) {
  if (values.size() != width_) throw IoError("CSV row width mismatch for '" + path_ + "'");
  std::string line;
  for (std::size_t c = 0; c < values.size(); ++c) line += (c ? "," : "") + format_number(values[c]);
  line += "\n";
  if (std::fputs(line.c_str(), f_) < 0 || std::fflush(f_) != 0)
    throw IoError("write failed: '" + path_ + "'");
}

std::vector<double> row_values(const DiagnosticsRow& r) {
  std::vector<double> v = {r.t, r.dt, r.E, r.D_visc, r.D_fric, r.E_residual,
                           r.B, r.B_residual, r.mass};
  v.insert(v.end(), r.norms.begin(), r.norms.end());
  v.push_back(r.xi_min);
  v.push_back(r.max_speed);
  v.push_back(static_cast<double>(r.floor_activations));
  return v;
}

}  // namespace cpe
