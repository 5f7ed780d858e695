#pragma once

#include <cstdio>
#include <stdexcept>
#include <string>
#include <vector>

#include "cpe/diagnostics.hpp"
#include "cpe/transform.hpp"

namespace cpe {

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// One named block of nx1 * nx2 * nz doubles, x1-major then x2 then z.
struct DumpField {
  std::string name;
  std::vector<double> values;
};

struct FieldDump {
  std::uint64_t nx1 = 0, nx2 = 0, nz = 0;
  std::vector<DumpField> fields;

  const DumpField* find(const std::string& name) const;
};

/// "CPE1", then u64 LE [nx1, nx2, nz, count], then per field a 32-byte
/// zero-padded name and f64 LE values.
void write_dump(const std::string& path, const FieldDump& dump);
FieldDump read_dump(const std::string& path);
std::vector<unsigned char> encode_dump(const FieldDump& dump);
FieldDump decode_dump(const std::vector<unsigned char>& bytes);

/// Fields xi (repeated along z), u1, u2 and w (face average at centers).
FieldDump state_dump(const ModelState& s);
/// Rebuilds (xi, u) on `g` (counts must match) and re-diagnoses w.
ModelState state_from_dump(const FieldDump& d, const GridSpec& g, double xi_floor);

/// Diagnostics CSV with a fixed header, %.17g numbers, written row by row
/// and flushed so an aborted run leaves its rows on disk.
class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::vector<std::string>& columns);
  ~CsvWriter();
  CsvWriter(const CsvWriter&) = delete;
  CsvWriter& operator=(const CsvWriter&) = delete;

  void row(const std::vector<double>& values);

 private:
  std::FILE* f_ = nullptr;
  std::size_t width_ = 0;
  std::string path_;
};

std::vector<double> row_values(const DiagnosticsRow& r);
std::string format_number(double v);

}  // namespace cpe
