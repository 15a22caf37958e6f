#include "ctr/io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>

#include <nlohmann/json.hpp>

namespace ctr {

const char* kToolVersion = "0.1.0";

CsvWriter::CsvWriter(std::vector<std::string> columns) : columns_(std::move(columns)) {}

std::string CsvWriter::format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void CsvWriter::add_row(const std::vector<double>& values) {
  std::string row;
  for (size_t i = 0; i < values.size(); ++i) {
    if (i) row += ",";
    row += format_double(values[i]);
  }
  rows_.push_back(std::move(row));
}

void CsvWriter::add_row_mixed(const std::vector<std::string>& values) {
  std::string row;
  for (size_t i = 0; i < values.size(); ++i) {
    if (i) row += ",";
    row += values[i];
  }
  rows_.push_back(std::move(row));
}

std::string CsvWriter::str() const {
  std::string out = "# schema=v1\n";
  for (size_t i = 0; i < columns_.size(); ++i) {
    if (i) out += ",";
    out += columns_[i];
  }
  out += "\n";
  for (const std::string& row : rows_) {
    out += row;
    out += "\n";
  }
  return out;
}

void CsvWriter::write(const std::string& path) const { write_text_file(path, str()); }

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("io-error", "cannot open for writing: " + path);
  out << content;
}

std::string svg_scatter(const std::vector<SvgSeries>& series, const std::string& title,
                        int size_px) {
  double lo_x = -1, hi_x = 1, lo_y = -1, hi_y = 1;
  bool first = true;
  for (const SvgSeries& s : series) {
    for (const Vector2d& p : s.points) {
      if (first) {
        lo_x = hi_x = p.x();
        lo_y = hi_y = p.y();
        first = false;
      }
      lo_x = std::min(lo_x, p.x());
      hi_x = std::max(hi_x, p.x());
      lo_y = std::min(lo_y, p.y());
      hi_y = std::max(hi_y, p.y());
    }
  }
  const double pad_x = std::max(1e-9, 0.08 * (hi_x - lo_x + 1e-9));
  const double pad_y = std::max(1e-9, 0.08 * (hi_y - lo_y + 1e-9));
  lo_x -= pad_x;
  hi_x += pad_x;
  lo_y -= pad_y;
  hi_y += pad_y;

  auto sx = [&](double x) { return (x - lo_x) / (hi_x - lo_x) * size_px; };
  auto sy = [&](double y) { return size_px - (y - lo_y) / (hi_y - lo_y) * size_px; };

  std::string out;
  char buf[256];
  std::snprintf(buf, sizeof(buf),
                "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%d\" height=\"%d\" "
                "viewBox=\"0 0 %d %d\">\n",
                size_px, size_px, size_px, size_px);
  out += buf;
  out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  std::snprintf(buf, sizeof(buf),
                "<text x=\"10\" y=\"20\" font-family=\"monospace\" font-size=\"14\">%s</text>\n",
                title.c_str());
  out += buf;
  for (const SvgSeries& s : series) {
    for (const Vector2d& p : s.points) {
      std::snprintf(buf, sizeof(buf),
                    "<circle cx=\"%.2f\" cy=\"%.2f\" r=\"%.2f\" fill=\"%s\" fill-opacity=\"0.6\"/>\n",
                    sx(p.x()), sy(p.y()), s.marker_radius, s.color.c_str());
      out += buf;
    }
  }
  out += "</svg>\n";
  return out;
}

void write_manifest(const std::string& dir, const std::string& command, uint64_t seed,
                    const std::string& scenario_name, uint64_t scenario_digest,
                    const std::vector<std::string>& artifacts) {
  nlohmann::ordered_json j;
  j["command"] = command;
  j["seed"] = seed;
  j["scenario"] = scenario_name;
  j["scenario_hash"] = scenario_digest;
  j["version"] = kToolVersion;
  j["artifacts"] = artifacts;
  write_text_file((std::filesystem::path(dir) / "manifest.json").string(), j.dump(2) + "\n");
}

}  // namespace ctr
