// Builds a hypercube file from dimension records and a device universe.
#include <CLI11.hpp>

#include <cstdio>
#include <sstream>

#include "reach/errors.hpp"
#include "reach/hypercube.hpp"
#include "reach/records.hpp"

namespace {

char parse_delimiter(const std::string& s) {
  if (s == "\\t" || s == "tab") return '\t';
  if (s.size() != 1) throw CLI::ValidationError("--delimiter", "expected a single character, 'tab' or '\\t'");
  return s[0];
}

std::vector<std::string> split_columns(const std::string& list) {
  std::vector<std::string> out;
  std::stringstream in(list);
  std::string col;
  while (std::getline(in, col, ',')) {
    if (col.empty()) throw CLI::ValidationError("--group-by", "empty column name in '" + list + "'");
    out.push_back(col);
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Build a hypercube of include and exclude sketches"};
  std::string input;
  std::string psid_col;
  std::string group_by;
  std::string universe;
  std::string out;
  std::string name;
  std::string delimiter = ",";
  reach::HashConfig config;
  bool keep_exact = false;
  app.add_option("--input", input, "Dimension records (delimited text with header)")->required()->check(CLI::ExistingFile);
  app.add_option("--psid-col", psid_col, "Device identifier column")->required();
  app.add_option("--group-by", group_by, "Comma-separated targeting columns")->required();
  app.add_option("--universe", universe, "Device universe file (PSID column)")->required()->check(CLI::ExistingFile);
  app.add_option("--out", out, "Output .hcub file")->required();
  app.add_option("--precision", config.precision, "HLL precision p")->capture_default_str();
  app.add_option("--bins", config.bins, "MinHash bins k")->capture_default_str();
  app.add_option("--seed", config.global_seed, "Global hash seed")->capture_default_str();
  app.add_option("--delimiter", delimiter, "Field delimiter")->capture_default_str();
  app.add_option("--name", name, "Dimension name (default: input file stem)");
  app.add_flag("--keep-exact-counts", keep_exact, "Store exact per-cell device counts");
  CLI11_PARSE(app, argc, argv);

  try {
    config.validate();
    const char delim = parse_delimiter(delimiter);
    const auto columns = split_columns(group_by);
    if (name.empty()) name = std::filesystem::path(input).stem().string();

    const auto batch = reach::cube::load_records(input, psid_col, delim);
    const auto uni = reach::cube::load_universe(universe, psid_col, delim);
    auto partial = reach::cube::build_cells(batch, columns, config, name);
    const std::size_t cells = partial.cells.size();
    reach::cube::BuildStats stats;
    const auto cube = reach::cube::build_exclude(std::move(partial), uni, {keep_exact}, &stats);
    reach::cube::write_hypercube(cube, out);

    std::fprintf(stderr, "%s: %zu rows (%zu rejected), %zu cells, universe %zu devices, %s\n", name.c_str(),
                 batch.row_count, batch.rejected_rows + uni.rejected_rows, cells, stats.universe_size,
                 config.describe().c_str());
    if (stats.universe_violations > 0) {
      std::fprintf(stderr, "warning: %zu cell memberships name devices outside the universe\n",
                   stats.universe_violations);
    }
    return 0;
  } catch (const CLI::Error& e) {
    return app.exit(e);
  } catch (const reach::Error& e) {
    std::fprintf(stderr, "cubebuild: %s\n", e.what());
    return 1;
  }
}
