#include "kerrlearn/csv.hpp"

#include <charconv>
#include <fstream>
#include <stdexcept>

namespace kerr {

std::string CsvWriter::format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc{})
    throw std::runtime_error("CsvWriter: double formatting failed");
  return std::string(buf, ptr);
}

void CsvWriter::comment(const std::string& text) {
  if (header_written_)
    throw std::logic_error("CsvWriter: comments must precede the header");
  buffer_ += "# ";
  buffer_ += text;
  buffer_ += '\n';
}

void CsvWriter::header(const std::vector<std::string>& columns) {
  if (header_written_) throw std::logic_error("CsvWriter: header already set");
  if (columns.empty()) throw std::logic_error("CsvWriter: empty header");
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (i) buffer_ += ',';
    buffer_ += columns[i];
  }
  buffer_ += '\n';
  columns_ = columns.size();
  header_written_ = true;
}

void CsvWriter::row(const std::vector<Cell>& cells) {
  if (!header_written_) throw std::logic_error("CsvWriter: header not set");
  if (cells.size() != columns_)
    throw std::logic_error("CsvWriter: row width does not match header");
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) buffer_ += ',';
    std::visit(
        [this](const auto& v) {
          using T = std::decay_t<decltype(v)>;
          if constexpr (std::is_same_v<T, double>) {
            buffer_ += format_double(v);
          } else if constexpr (std::is_same_v<T, std::string>) {
            buffer_ += v;
          } else {
            buffer_ += std::to_string(v);
          }
        },
        cells[i]);
  }
  buffer_ += '\n';
}

void CsvWriter::write(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out)
    throw std::runtime_error("CsvWriter: cannot open " + path.string());
  out << buffer_;
  if (!out) throw std::runtime_error("CsvWriter: write failed " + path.string());
}

}  // namespace kerr
