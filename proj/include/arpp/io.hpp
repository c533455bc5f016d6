#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "arpp/dmh.hpp"
#include "arpp/geometry.hpp"
#include "arpp/posterior.hpp"
#include "arpp/summaries.hpp"

namespace arpp {

namespace fs = std::filesystem;

/// Shortest decimal that reads back to the same double (17 significant digits).
std::string format_double(double x);

/// Writes through a temporary sibling and renames it into place.
void write_text_atomic(const fs::path& path, const std::string& content);
std::string read_text(const fs::path& path);

/// Pattern CSV: header "x,y", one point per row. Throws DataError on malformed
/// rows, non-finite values or points outside `window` (all offenders listed).
PointPattern read_pattern_csv(const fs::path& path, const Window& window);
std::string pattern_csv(const PointPattern& pattern);
void write_pattern_csv(const fs::path& path, const PointPattern& pattern);

/// Chain CSV: one column per parameter plus "accepted" (0/1).
std::string chain_csv(const PosteriorChain& chain);
void write_chain_csv(const fs::path& path, const PosteriorChain& chain);
/// Reads names, samples and accepted flags. Throws DataError on malformed input.
PosteriorChain read_chain_csv(const fs::path& path);

/// Columns r,g_hat,lo95,hi95.
std::string pcf_csv(const PcfEstimate& estimate);
/// Columns r,g_hat,lo95,hi95,g_empirical where g_hat is the mean simulated PCF.
std::string gof_csv(const GofBands& bands, const std::vector<double>& g_empirical);

struct PlotSeries {
  std::vector<double> y;
  std::string color;
  bool dashed = false;
};

struct PlotBand {
  std::vector<double> lo;
  std::vector<double> hi;
  std::string color;
};

/// Self-contained SVG line plot over x with optional shaded bands and a
/// horizontal reference line.
std::string svg_line_plot(const std::vector<double>& x, const std::vector<PlotBand>& bands,
                          const std::vector<PlotSeries>& series, std::optional<double> reference,
                          const std::string& x_label, const std::string& y_label);

}  // namespace arpp
