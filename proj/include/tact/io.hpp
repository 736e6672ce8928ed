#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

#include "tact/phasespace.hpp"

namespace tact::io {

using nlohmann::json;

enum class Format { csv, json };
Format parse_format(const std::string& name);
const char* format_extension(Format f);

/// SHA-256 of a file's bytes, lowercase hex.
std::string sha256_file(const std::filesystem::path& path);

struct FileDigest {
  std::string name;
  std::string sha256;
  std::uintmax_t bytes = 0;
};

/// Collects a run's output files in a private staging directory and moves
/// them into place only on commit(). A set destroyed without commit removes
/// everything it wrote, so a failed run leaves no partial files behind.
class OutputSet {
 public:
  explicit OutputSet(std::filesystem::path dir);
  ~OutputSet();
  OutputSet(const OutputSet&) = delete;
  OutputSet& operator=(const OutputSet&) = delete;

  void write(const std::string& name, const std::string& content);
  bool contains(const std::string& name) const;
  const std::filesystem::path& directory() const { return dir_; }

  /// Renames every staged file into the output directory, then writes
  /// `manifest` (with the digests filled in) as manifest.json.
  std::vector<FileDigest> commit(json manifest);

 private:
  std::filesystem::path dir_;
  std::filesystem::path staging_;
  std::vector<std::string> names_;
  bool committed_ = false;
};

/// Shortest round-trip decimal representation.
std::string number(double v);

/// Per-time diagnostics of a run; times in units of 1/chi (chi t on export).
struct SeriesRow {
  double t = 0.0;
  double f_q = 0.0;
  Eigen::Vector3d n_opt = Eigen::Vector3d::Zero();
  double fidelity = 1.0;
  double entropy = 0.0;
  double energy = 0.0;  // <H_TACT>
};

std::string series_text(const std::vector<SeriesRow>& rows, double chi, Format format);

/// Grid dump: header with N and the grid shape, then row-major values
/// (one theta row per line in CSV).
std::string grid_text(const SphereGrid& grid, int n, const std::string& quantity, double chi_t, Format format);

/// Plain table with a header row; JSON renders it as an array of objects.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
  std::string text(Format format) const;
};

}  // namespace tact::io
