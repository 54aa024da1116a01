#pragma once

#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace prevsim::csv {

using Row = std::vector<std::string>;

struct Table {
  Row header;
  std::vector<Row> rows;
};

/// RFC 4180 style: comma separated, fields may be double-quoted with "" as an
/// escaped quote, quoted fields may span lines, CRLF accepted. A leading UTF-8
/// BOM is skipped. Every data row must have as many fields as the header.
Table parse(std::string_view text);
Table read_file(const std::filesystem::path& path);

/// Quotes a field only when it contains a comma, quote or line break.
std::string escape(std::string_view field);
std::string join(const Row& fields);

/// Shortest decimal form that parses back to the same double.
std::string format_double(double value);

/// Parses a complete numeric field (surrounding spaces allowed).
std::optional<double> parse_double(std::string_view text);

/// Writes to "<path>.tmp" and renames over path.
void write_atomic(const std::filesystem::path& path, std::string_view contents);

/// Streaming counterpart of write_atomic for outputs too large to buffer.
/// Nothing appears at `path` until commit(); an uncommitted writer removes
/// its temporary file.
class AtomicWriter {
 public:
  explicit AtomicWriter(std::filesystem::path path);
  ~AtomicWriter();
  AtomicWriter(const AtomicWriter&) = delete;
  AtomicWriter& operator=(const AtomicWriter&) = delete;

  std::ostream& stream() { return out_; }
  void commit();

 private:
  std::filesystem::path path_;
  std::filesystem::path tmp_;
  std::ofstream out_;
  bool committed_ = false;
};

}  // namespace prevsim::csv
