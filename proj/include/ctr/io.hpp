#pragma once

#include <string>
#include <vector>

#include "ctr/types.hpp"

namespace ctr {

// CSV with a "# schema=v1" header line; doubles printed with %.17g so
// repeated runs are byte-identical.
class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> columns);
  void add_row(const std::vector<double>& values);
  void add_row_mixed(const std::vector<std::string>& values);
  std::string str() const;
  void write(const std::string& path) const;

  static std::string format_double(double v);

 private:
  std::vector<std::string> columns_;
  std::vector<std::string> rows_;
};

struct SvgSeries {
  std::string color = "#1f77b4";
  double marker_radius = 1.5;
  std::vector<Vector2d> points;
};

// Self-contained scatter plot (fixed viewport, no external assets, no
// timestamps).
std::string svg_scatter(const std::vector<SvgSeries>& series, const std::string& title,
                        int size_px = 640);

// One manifest per artifact directory: command, seed, scenario hash, tool
// version and every file the run produced.
void write_manifest(const std::string& dir, const std::string& command, uint64_t seed,
                    const std::string& scenario_name, uint64_t scenario_digest,
                    const std::vector<std::string>& artifacts);

void write_text_file(const std::string& path, const std::string& content);

extern const char* kToolVersion;

}  // namespace ctr
