#include "dmech_cli/csv.hpp"

#include <charconv>
#include <stdexcept>

namespace dmech::cli {

std::string format_double(double v) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc()) throw std::runtime_error("format_double: conversion failed");
  return std::string(buf, end);
}

CsvWriter::CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header)
    : out_(path, std::ios::binary | std::ios::trunc), columns_(header.size()) {
  if (!out_) throw std::runtime_error("cannot open output file: " + path.string());
  write_row(header);
  rows_ = 0;  // the header is not a data row
}

void CsvWriter::write_row(const std::vector<std::string>& cells) {
  if (cells.size() != columns_)
    throw std::runtime_error("csv row has " + std::to_string(cells.size()) + " cells, expected " +
                             std::to_string(columns_));
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out_.put(',');
    out_ << cells[i];
  }
  out_.put('\n');
  ++rows_;
}

}  // namespace dmech::cli
