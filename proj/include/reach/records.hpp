#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace reach::cube {

// Column-major table of raw dimension records. Every row has a non-empty
// PSID; rows with an empty PSID are dropped at load time and counted.
struct RecordBatch {
  std::vector<std::string> column_names;
  std::vector<std::vector<std::string>> columns;
  std::string psid_column;
  std::size_t row_count = 0;
  std::size_t rejected_rows = 0;

  // Throws IngestError when the column does not exist.
  [[nodiscard]] std::size_t column_index(std::string_view name) const;
  [[nodiscard]] bool has_column(std::string_view name) const noexcept;
  [[nodiscard]] const std::vector<std::string>& column(std::string_view name) const {
    return columns[column_index(name)];
  }
  [[nodiscard]] const std::vector<std::string>& psids() const { return column(psid_column); }
};

// Header-bearing delimited text with RFC 4180 double-quote escaping.
// Throws IngestError (with 1-based line number) on a missing header, missing
// PSID column or ragged row.
[[nodiscard]] RecordBatch parse_records(std::string_view text, std::string_view psid_column, char delimiter = ',');
[[nodiscard]] RecordBatch load_records(const std::filesystem::path& path, std::string_view psid_column,
                                       char delimiter = ',');

// Universe files carry PSIDs only. A single-column file is accepted whatever
// its header says; otherwise psid_column must be present.
[[nodiscard]] RecordBatch load_universe(const std::filesystem::path& path, std::string_view psid_column,
                                        char delimiter = ',');

// Builds a batch from in-memory rows (row-major), applying the same checks as
// the text loader.
[[nodiscard]] RecordBatch make_batch(std::vector<std::string> column_names,
                                     const std::vector<std::vector<std::string>>& rows, std::string_view psid_column);

// Serializes a batch back to delimited text (quoting where required).
[[nodiscard]] std::string format_records(const RecordBatch& batch, char delimiter = ',');

}  // namespace reach::cube
