#include "reach/records.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "reach/errors.hpp"

namespace reach::cube {
namespace {

// Splits one logical record starting at `pos`. Quoted fields may span lines.
// Returns false at end of input.
class RecordSplitter {
 public:
  RecordSplitter(std::string_view text, char delimiter) : text_(text), delim_(delimiter) {}

  bool next(std::vector<std::string>& fields) {
    fields.clear();
    if (pos_ >= text_.size()) return false;
    record_line_ = line_;
    std::string field;
    bool quoted = false;
    bool field_was_quoted = false;
    while (pos_ < text_.size()) {
      const char c = text_[pos_];
      if (quoted) {
        if (c == '"') {
          if (pos_ + 1 < text_.size() && text_[pos_ + 1] == '"') {
            field.push_back('"');
            pos_ += 2;
            continue;
          }
          quoted = false;
          ++pos_;
          continue;
        }
        if (c == '\n') ++line_;
        field.push_back(c);
        ++pos_;
        continue;
      }
      if (c == '"' && field.empty() && !field_was_quoted) {
        quoted = true;
        field_was_quoted = true;
        ++pos_;
        continue;
      }
      if (c == delim_) {
        fields.push_back(std::move(field));
        field.clear();
        field_was_quoted = false;
        ++pos_;
        continue;
      }
      if (c == '\r' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '\n') {
        ++pos_;
        continue;
      }
      if (c == '\n') {
        ++pos_;
        ++line_;
        fields.push_back(std::move(field));
        return true;
      }
      field.push_back(c);
      ++pos_;
    }
    if (quoted) throw IngestError(record_line_, "unterminated quoted field");
    fields.push_back(std::move(field));
    return true;
  }

  [[nodiscard]] std::size_t record_line() const noexcept { return record_line_; }

 private:
  std::string_view text_;
  char delim_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t record_line_ = 1;
};

bool blank(const std::vector<std::string>& fields) { return fields.size() == 1 && fields[0].empty(); }

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IngestError(0, "cannot open '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return std::move(buf).str();
}

void check_header(const std::vector<std::string>& names, std::string_view psid_column) {
  for (std::size_t i = 0; i < names.size(); ++i) {
    for (std::size_t j = i + 1; j < names.size(); ++j) {
      if (names[i] == names[j]) throw IngestError(1, "duplicate column '" + names[i] + "'");
    }
  }
  if (std::find(names.begin(), names.end(), psid_column) == names.end()) {
    throw IngestError(1, "PSID column '" + std::string(psid_column) + "' not in header");
  }
}

}  // namespace

std::size_t RecordBatch::column_index(std::string_view name) const {
  const auto it = std::find(column_names.begin(), column_names.end(), name);
  if (it == column_names.end()) throw IngestError(0, "no column '" + std::string(name) + "'");
  return static_cast<std::size_t>(it - column_names.begin());
}

bool RecordBatch::has_column(std::string_view name) const noexcept {
  return std::find(column_names.begin(), column_names.end(), name) != column_names.end();
}

RecordBatch parse_records(std::string_view text, std::string_view psid_column, char delimiter) {
  RecordSplitter split(text, delimiter);
  std::vector<std::string> fields;
  if (!split.next(fields) || blank(fields)) throw IngestError(1, "missing header row");

  RecordBatch batch;
  batch.column_names = fields;
  batch.psid_column = std::string(psid_column);
  check_header(batch.column_names, psid_column);
  batch.columns.resize(batch.column_names.size());
  const std::size_t psid_idx = batch.column_index(psid_column);

  while (split.next(fields)) {
    if (blank(fields)) continue;
    if (fields.size() != batch.column_names.size()) {
      throw IngestError(split.record_line(), "expected " + std::to_string(batch.column_names.size()) +
                                                 " fields, found " + std::to_string(fields.size()));
    }
    if (fields[psid_idx].empty()) {
      ++batch.rejected_rows;
      continue;
    }
    for (std::size_t c = 0; c < fields.size(); ++c) batch.columns[c].push_back(std::move(fields[c]));
    ++batch.row_count;
  }
  return batch;
}

RecordBatch load_records(const std::filesystem::path& path, std::string_view psid_column, char delimiter) {
  return parse_records(read_file(path), psid_column, delimiter);
}

RecordBatch load_universe(const std::filesystem::path& path, std::string_view psid_column, char delimiter) {
  const std::string text = read_file(path);
  RecordSplitter split(text, delimiter);
  std::vector<std::string> header;
  if (!split.next(header) || blank(header)) throw IngestError(1, "missing header row");
  if (header.size() == 1) return parse_records(text, header[0], delimiter);
  return parse_records(text, psid_column, delimiter);
}

RecordBatch make_batch(std::vector<std::string> column_names, const std::vector<std::vector<std::string>>& rows,
                       std::string_view psid_column) {
  RecordBatch batch;
  check_header(column_names, psid_column);
  batch.column_names = std::move(column_names);
  batch.psid_column = std::string(psid_column);
  batch.columns.resize(batch.column_names.size());
  const std::size_t psid_idx = batch.column_index(psid_column);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.size() != batch.column_names.size()) {
      throw IngestError(r + 2, "expected " + std::to_string(batch.column_names.size()) + " fields, found " +
                                   std::to_string(row.size()));
    }
    if (row[psid_idx].empty()) {
      ++batch.rejected_rows;
      continue;
    }
    for (std::size_t c = 0; c < row.size(); ++c) batch.columns[c].push_back(row[c]);
    ++batch.row_count;
  }
  return batch;
}

std::string format_records(const RecordBatch& batch, char delimiter) {
  std::string out;
  auto field = [&](const std::string& v) {
    const bool quote = v.find_first_of(std::string{delimiter, '"', '\n', '\r'}) != std::string::npos;
    if (!quote) {
      out += v;
      return;
    }
    out.push_back('"');
    for (const char c : v) {
      if (c == '"') out.push_back('"');
      out.push_back(c);
    }
    out.push_back('"');
  };
  for (std::size_t c = 0; c < batch.column_names.size(); ++c) {
    if (c != 0) out.push_back(delimiter);
    field(batch.column_names[c]);
  }
  out.push_back('\n');
  for (std::size_t r = 0; r < batch.row_count; ++r) {
    for (std::size_t c = 0; c < batch.columns.size(); ++c) {
      if (c != 0) out.push_back(delimiter);
      field(batch.columns[c][r]);
    }
    out.push_back('\n');
  }
  return out;
}

}  // namespace reach::cube
