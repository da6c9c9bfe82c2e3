#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <variant>
#include <vector>

namespace kerr {

// Minimal CSV emitter: '#'-prefixed metadata comment lines, one header row,
// comma-separated cells.  Doubles are rendered with std::to_chars
// (shortest round-trip form) so output is platform-stable and reparses to
// the identical bit pattern.
class CsvWriter {
 public:
  using Cell = std::variant<double, long, int, std::string>;

  void comment(const std::string& text);
  void header(const std::vector<std::string>& columns);
  void row(const std::vector<Cell>& cells);

  const std::string& content() const { return buffer_; }
  void write(const std::filesystem::path& path) const;

  static std::string format_double(double v);

 private:
  std::string buffer_;
  std::size_t columns_ = 0;
  bool header_written_ = false;
};

}  // namespace kerr
