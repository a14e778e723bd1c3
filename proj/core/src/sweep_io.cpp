#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "carleman/bench.hpp"

namespace carleman {

namespace {

std::string fmt17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Write through a temp file in the same directory, then rename into place.
void atomic_write(const std::string& path, const std::string& payload) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open for writing: " + tmp);
    out << payload;
    if (!out.flush()) throw std::runtime_error("write failed: " + tmp);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    std::remove(tmp.c_str());
    throw std::runtime_error("cannot rename into place: " + path);
  }
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string tok;
  while (std::getline(ss, tok, ',')) out.push_back(tok);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace

void emit_csv(const SweepGrid& grid, std::ostream& out) {
  for (const auto& [k, v] : grid.metadata) out << "# " << k << '=' << v << '\n';
  out << grid.corner;
  for (double x : grid.xs) out << ',' << fmt17(x);
  out << '\n';
  for (std::size_t i = 0; i < grid.ys.size(); ++i) {
    out << fmt17(grid.ys[i]);
    for (std::size_t j = 0; j < grid.xs.size(); ++j)
      out << ',' << fmt17(grid.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
    out << '\n';
  }
}

void emit_csv_file(const SweepGrid& grid, const std::string& path) {
  std::ostringstream os;
  emit_csv(grid, os);
  atomic_write(path, os.str());
}

SweepGrid parse_sweep_csv(std::istream& in) {
  SweepGrid grid;
  std::string line;
  std::vector<std::vector<double>> rows;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto body = line.substr(line.find_first_not_of(" \t", 1));
      const auto eq = body.find('=');
      if (eq != std::string::npos)
        grid.metadata.emplace_back(body.substr(0, eq), body.substr(eq + 1));
      continue;
    }
    const auto cells = split_csv_line(line);
    if (cells.empty()) continue;
    if (!header_seen) {
      grid.corner = cells[0];
      for (std::size_t j = 1; j < cells.size(); ++j) grid.xs.push_back(std::stod(cells[j]));
      header_seen = true;
      continue;
    }
    grid.ys.push_back(std::stod(cells[0]));
    std::vector<double> row;
    for (std::size_t j = 1; j < cells.size(); ++j) row.push_back(std::stod(cells[j]));
    if (row.size() != grid.xs.size())
      throw std::invalid_argument("sweep CSV: ragged row");
    rows.push_back(std::move(row));
  }
  if (!header_seen) throw std::invalid_argument("sweep CSV: missing header row");
  grid.values.resize(static_cast<Eigen::Index>(rows.size()),
                     static_cast<Eigen::Index>(grid.xs.size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j)
      grid.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  return grid;
}

Palette Palette::viridis() {
  return Palette{{{68, 1, 84},    {71, 44, 122},  {59, 81, 139},  {44, 113, 142},
                  {33, 144, 141}, {39, 173, 129}, {92, 200, 99},  {170, 220, 50},
                  {253, 231, 37}}};
}

std::array<int, 3> Palette::sample(double unit) const {
  if (stops.empty()) throw std::logic_error("Palette: no stops");
  if (stops.size() == 1) return stops[0];
  const double u = std::min(std::max(unit, 0.0), 1.0);
  const double pos = u * static_cast<double>(stops.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, stops.size() - 1);
  const double w = pos - static_cast<double>(lo);
  std::array<int, 3> rgb{};
  for (int c = 0; c < 3; ++c)
    rgb[static_cast<std::size_t>(c)] = static_cast<int>(std::lround(
        (1.0 - w) * stops[lo][static_cast<std::size_t>(c)] +
        w * stops[hi][static_cast<std::size_t>(c)]));
  return rgb;
}

namespace {

constexpr double kClipLo = -15.0;
constexpr double kClipHi = 5.0;

std::string fmt_tick(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

}  // namespace

void emit_svg_heatmap(const SweepGrid& grid, std::ostream& out, const Palette& palette) {
  const auto n_rows = static_cast<int>(grid.ys.size());
  const auto n_cols = static_cast<int>(grid.xs.size());
  if (n_rows == 0 || n_cols == 0) throw std::invalid_argument("svg heatmap: empty grid");

  const double plot_w = 540.0, plot_h = 420.0;
  const double margin_l = 70.0, margin_t = 40.0, margin_b = 55.0;
  const double bar_w = 18.0, bar_gap = 24.0, bar_label = 58.0;
  const double width = margin_l + plot_w + bar_gap + bar_w + bar_label;
  const double height = margin_t + plot_h + margin_b;
  const double cell_w = plot_w / n_cols, cell_h = plot_h / n_rows;

  std::string title;
  for (const auto& [k, v] : grid.metadata)
    if (k == "benchmark") title = v;

  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
      << height << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n";
  out << "<rect width=\"" << width << "\" height=\"" << height << "\" fill=\"white\"/>\n";
  if (!title.empty())
    out << "<text x=\"" << margin_l + plot_w / 2 << "\" y=\"24\" text-anchor=\"middle\" "
        << "font-family=\"sans-serif\" font-size=\"15\">" << title << "</text>\n";

  // cells; row 0 (smallest y) is drawn at the bottom
  char buf[256];
  for (int i = 0; i < n_rows; ++i) {
    for (int j = 0; j < n_cols; ++j) {
      const double v = grid.values(i, j);
      const auto rgb = palette.sample((v - kClipLo) / (kClipHi - kClipLo));
      const double x = margin_l + j * cell_w;
      const double y = margin_t + plot_h - (i + 1) * cell_h;
      std::snprintf(buf, sizeof buf,
                    "<rect x=\"%.3f\" y=\"%.3f\" width=\"%.3f\" height=\"%.3f\" "
                    "fill=\"rgb(%d,%d,%d)\"/>\n",
                    x, y, cell_w + 0.25, cell_h + 0.25, rgb[0], rgb[1], rgb[2]);
      out << buf;
    }
  }

  // axis labels: corner is "<ylabel>\<xlabel>"
  std::string ylabel = grid.corner, xlabel;
  if (const auto slash = grid.corner.find('\\'); slash != std::string::npos) {
    ylabel = grid.corner.substr(0, slash);
    xlabel = grid.corner.substr(slash + 1);
  }
  const int n_ticks = 5;
  for (int t = 0; t < n_ticks; ++t) {
    const double frac = n_ticks == 1 ? 0.0 : static_cast<double>(t) / (n_ticks - 1);
    const auto jc = static_cast<std::size_t>(std::lround(frac * (n_cols - 1)));
    const double x = margin_l + (static_cast<double>(jc) + 0.5) * cell_w;
    out << "<text x=\"" << x << "\" y=\"" << margin_t + plot_h + 18
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
        << fmt_tick(grid.xs[jc]) << "</text>\n";
    const auto ic = static_cast<std::size_t>(std::lround(frac * (n_rows - 1)));
    const double y = margin_t + plot_h - (static_cast<double>(ic) + 0.5) * cell_h;
    out << "<text x=\"" << margin_l - 6 << "\" y=\"" << y + 4
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
        << fmt_tick(grid.ys[ic]) << "</text>\n";
  }
  out << "<text x=\"" << margin_l + plot_w / 2 << "\" y=\"" << height - 14
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">" << xlabel
      << "</text>\n";
  out << "<text x=\"18\" y=\"" << margin_t + plot_h / 2
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" "
      << "transform=\"rotate(-90 18 " << margin_t + plot_h / 2 << ")\">" << ylabel
      << "</text>\n";

  // colorbar over the clipped-log range
  const int bar_steps = 64;
  const double bar_x = margin_l + plot_w + bar_gap;
  for (int s = 0; s < bar_steps; ++s) {
    const double u = (static_cast<double>(s) + 0.5) / bar_steps;
    const auto rgb = palette.sample(u);
    const double y = margin_t + plot_h * (1.0 - (static_cast<double>(s) + 1.0) / bar_steps);
    std::snprintf(buf, sizeof buf,
                  "<rect x=\"%.3f\" y=\"%.3f\" width=\"%.3f\" height=\"%.3f\" "
                  "fill=\"rgb(%d,%d,%d)\"/>\n",
                  bar_x, y, bar_w, plot_h / bar_steps + 0.25, rgb[0], rgb[1], rgb[2]);
    out << buf;
  }
  for (int t = 0; t < n_ticks; ++t) {
    const double frac = static_cast<double>(t) / (n_ticks - 1);
    const double v = kClipLo + frac * (kClipHi - kClipLo);
    const double y = margin_t + plot_h * (1.0 - frac);
    out << "<text x=\"" << bar_x + bar_w + 5 << "\" y=\"" << y + 4
        << "\" font-family=\"sans-serif\" font-size=\"11\">" << fmt_tick(v) << "</text>\n";
  }
  out << "<text x=\"" << bar_x + bar_w / 2 << "\" y=\"" << margin_t - 8
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">log10 err"
      << "</text>\n";
  out << "</svg>\n";
}

void emit_svg_heatmap_file(const SweepGrid& grid, const std::string& path,
                           const Palette& palette) {
  std::ostringstream os;
  emit_svg_heatmap(grid, os, palette);
  atomic_write(path, os.str());
}

}  // namespace carleman
