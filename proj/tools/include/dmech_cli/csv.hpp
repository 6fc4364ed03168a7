#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace dmech::cli {

/// Shortest decimal string that parses back to exactly the same binary64
/// value. This is what makes reruns byte-identical.
std::string format_double(double v);

/// Line-oriented CSV emitter: UTF-8 content, LF line endings on every
/// platform (the stream is opened in binary mode), header written up front.
class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header);

  void write_row(const std::vector<std::string>& cells);

  /// Data rows written so far (the header is not counted).
  int rows() const { return rows_; }

 private:
  std::ofstream out_;
  std::size_t columns_ = 0;
  int rows_ = 0;
};

}  // namespace dmech::cli
