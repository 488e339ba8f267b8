#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "dmkp/init.hpp"
#include "dmkp/spectral.hpp"
#include "dmkp/symbols.hpp"

namespace dmkp {

/// Writes content to path.tmp and renames it over path.
void atomic_write(const std::filesystem::path& path, std::string_view content);

struct Snapshot {
  RealField field;
  double time = 0.0;
};

/// FLD1 layout: "FLD1", u32 version = 1, u64 nx, u64 ny, f64 lx, f64 ly,
/// f64 time, then nx * ny f64 samples, row-major (y outer). All little-endian.
std::string encode_fld1(const RealField& field, double time);
Snapshot decode_fld1(std::string_view bytes);
void write_fld1(const std::filesystem::path& path, const RealField& field, double time);
/// Throws ConfigError on a missing or malformed file.
Snapshot read_fld1(const std::filesystem::path& path);

/// Sidecar manifest next to a snapshot: model parameters plus free-form
/// provenance strings. Written atomically as path with ".json" appended.
void write_manifest(const std::filesystem::path& snapshot_path, double time, const ModelParams& params,
                    const std::map<std::string, std::string>& provenance);

/// Shortest round-trip decimal form of a double; the CSV number format.
std::string format_number(double v);

/// CSV with a versioned schema line "# dmkp-lab v1 <schema>" and a header row.
class CsvTable {
 public:
  CsvTable(std::string schema, std::vector<std::string> columns);

  void add_row(const std::vector<double>& values);
  void add_row(std::vector<std::string> cells);

  std::size_t rows() const noexcept { return rows_.size(); }
  std::string str() const;
  void write(const std::filesystem::path& path) const { atomic_write(path, str()); }

 private:
  std::string schema_;
  std::vector<std::string> columns_;
  std::vector<std::vector<std::string>> rows_;
};

struct GridSpec {
  int nx = 64;
  int ny = 64;
  double lx = 0.0;  // 0 means 2 pi
  double ly = 0.0;
};

struct TimeSpec {
  double t_final = 1.0;
  double dt = 1e-3;
  int output_every = 100;
};

struct OutputSpec {
  std::string dir = "dmkp_out";
  double s1 = 0.0;  // exponents of the h_s1_s2 column
  double s2 = 0.0;
};

struct RunConfig {
  std::string preset;
  ModelParams model;
  GridSpec grid;
  TimeSpec time;
  InitSpec init;
  OutputSpec output;

  /// Throws ConfigError on anything a module would reject later.
  void validate() const;
  GridPtr make_grid() const;
};

/// Name of the environment variable that overrides output.dir.
inline constexpr const char* kOutputDirEnv = "DMKP_LAB_OUTPUT_DIR";

/// Parses JSON text. Unknown keys and wrong types are ConfigErrors.
RunConfig parse_run_config(std::string_view json_text);
RunConfig load_run_config(const std::filesystem::path& path);

/// output.dir, or the environment override when set and non-empty.
std::filesystem::path resolve_output_dir(const RunConfig& config);

}  // namespace dmkp
