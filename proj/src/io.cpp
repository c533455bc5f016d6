#include "arpp/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "arpp/errors.hpp"

namespace arpp {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.push_back(trim(std::string_view(line).substr(start, comma - start)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

bool parse_double(const std::string& s, double& out) {
  if (s.empty()) return false;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  if (*first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

std::vector<std::string> read_lines(const fs::path& path) {
  std::istringstream in(read_text(path));
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!trim(line).empty()) lines.push_back(line);
  }
  return lines;
}

}  // namespace

std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_text_atomic(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw DataError("write failed for " + tmp.string());
  }
  fs::rename(tmp, path);
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

PointPattern read_pattern_csv(const fs::path& path, const Window& window) {
  const auto lines = read_lines(path);
  if (lines.empty() || split_fields(lines[0]) != std::vector<std::string>{"x", "y"})
    throw DataError(path.string() + ": expected header \"x,y\"");
  PointPattern pattern{window, {}};
  pattern.points.reserve(lines.size() - 1);
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto fields = split_fields(lines[i]);
    Point p;
    if (fields.size() != 2 || !parse_double(fields[0], p.x) || !parse_double(fields[1], p.y) ||
        !std::isfinite(p.x) || !std::isfinite(p.y))
      throw DataError(path.string() + ": malformed row " + std::to_string(i + 1) + ": " + lines[i]);
    pattern.points.push_back(p);
  }
  try {
    require_inside(pattern);
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
  return pattern;
}

std::string pattern_csv(const PointPattern& pattern) {
  std::string out = "x,y\n";
  for (const auto& p : pattern.points) out += format_double(p.x) + "," + format_double(p.y) + "\n";
  return out;
}

void write_pattern_csv(const fs::path& path, const PointPattern& pattern) {
  write_text_atomic(path, pattern_csv(pattern));
}

std::string chain_csv(const PosteriorChain& chain) {
  std::string out;
  for (const auto& name : chain.names) out += name + ",";
  out += "accepted\n";
  for (std::size_t i = 0; i < chain.samples.size(); ++i) {
    for (double v : chain.samples[i]) out += format_double(v) + ",";
    out += (i < chain.accepted.size() && chain.accepted[i]) ? "1\n" : "0\n";
  }
  return out;
}

void write_chain_csv(const fs::path& path, const PosteriorChain& chain) {
  write_text_atomic(path, chain_csv(chain));
}

PosteriorChain read_chain_csv(const fs::path& path) {
  const auto lines = read_lines(path);
  if (lines.empty()) throw DataError(path.string() + ": empty chain file");
  auto header = split_fields(lines[0]);
  if (header.size() < 2 || header.back() != "accepted")
    throw DataError(path.string() + ": chain header must end with \"accepted\"");
  header.pop_back();
  PosteriorChain chain;
  chain.names = header;
  const std::size_t dim = header.size();
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto fields = split_fields(lines[i]);
    if (fields.size() != dim + 1)
      throw DataError(path.string() + ": wrong column count in row " + std::to_string(i + 1));
    std::vector<double> row(dim);
    for (std::size_t j = 0; j < dim; ++j)
      if (!parse_double(fields[j], row[j]) || !std::isfinite(row[j]))
        throw DataError(path.string() + ": malformed value in row " + std::to_string(i + 1));
    if (fields[dim] != "0" && fields[dim] != "1")
      throw DataError(path.string() + ": accepted flag must be 0 or 1 in row " +
                      std::to_string(i + 1));
    chain.samples.push_back(std::move(row));
    chain.accepted.push_back(fields[dim] == "1");
  }
  chain.n_steps = chain.samples.size();
  chain.accept_count =
      static_cast<std::uint64_t>(std::count(chain.accepted.begin(), chain.accepted.end(), true));
  return chain;
}

std::string pcf_csv(const PcfEstimate& e) {
  std::string out = "r,g_hat,lo95,hi95\n";
  for (std::size_t i = 0; i < e.grid.size(); ++i)
    out += format_double(e.grid[i]) + "," + format_double(e.g_hat[i]) + "," +
           format_double(e.lo95[i]) + "," + format_double(e.hi95[i]) + "\n";
  return out;
}

std::string gof_csv(const GofBands& b, const std::vector<double>& g_empirical) {
  std::string out = "r,g_hat,lo95,hi95,g_empirical\n";
  for (std::size_t i = 0; i < b.grid.size(); ++i)
    out += format_double(b.grid[i]) + "," + format_double(b.mean[i]) + "," +
           format_double(b.lo95[i]) + "," + format_double(b.hi95[i]) + "," +
           format_double(g_empirical[i]) + "\n";
  return out;
}

std::string svg_line_plot(const std::vector<double>& x, const std::vector<PlotBand>& bands,
                          const std::vector<PlotSeries>& series, std::optional<double> reference,
                          const std::string& x_label, const std::string& y_label) {
  constexpr double W = 640, H = 420, L = 60, R = 20, T = 20, B = 50;
  if (x.empty()) throw std::invalid_argument("svg plot needs at least one x value");
  double y_lo = reference.value_or(0.0);
  double y_hi = y_lo;
  auto widen = [&](const std::vector<double>& v) {
    for (double y : v)
      if (std::isfinite(y)) {
        y_lo = std::min(y_lo, y);
        y_hi = std::max(y_hi, y);
      }
  };
  for (const auto& b : bands) {
    widen(b.lo);
    widen(b.hi);
  }
  for (const auto& s : series) widen(s.y);
  y_lo = std::min(y_lo, 0.0);
  if (y_hi <= y_lo) y_hi = y_lo + 1.0;
  const double x_lo = x.front();
  const double x_hi = x.back() > x_lo ? x.back() : x_lo + 1.0;
  auto sx = [&](double v) { return L + (v - x_lo) / (x_hi - x_lo) * (W - L - R); };
  auto sy = [&](double v) { return H - B - (v - y_lo) / (y_hi - y_lo) * (H - T - B); };
  auto num = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return std::string(buf);
  };
  auto polyline = [&](const std::vector<double>& y) {
    std::string pts;
    for (std::size_t i = 0; i < x.size() && i < y.size(); ++i)
      pts += num(sx(x[i])) + "," + num(sy(y[i])) + " ";
    return pts;
  };

  std::string s = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(W) + "\" height=\"" +
                  num(H) + "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  for (const auto& b : bands) {
    std::string pts = polyline(b.hi);
    for (std::size_t i = x.size(); i-- > 0;) pts += num(sx(x[i])) + "," + num(sy(b.lo[i])) + " ";
    s += "<polygon points=\"" + pts + "\" fill=\"" + b.color + "\" fill-opacity=\"0.3\"/>\n";
  }
  if (reference)
    s += "<line x1=\"" + num(sx(x_lo)) + "\" y1=\"" + num(sy(*reference)) + "\" x2=\"" +
         num(sx(x_hi)) + "\" y2=\"" + num(sy(*reference)) +
         "\" stroke=\"gray\" stroke-dasharray=\"4 3\"/>\n";
  for (const auto& ser : series)
    s += "<polyline points=\"" + polyline(ser.y) + "\" fill=\"none\" stroke=\"" + ser.color +
         "\" stroke-width=\"1.5\"" + (ser.dashed ? " stroke-dasharray=\"6 3\"" : "") + "/>\n";
  s += "<rect x=\"" + num(L) + "\" y=\"" + num(T) + "\" width=\"" + num(W - L - R) +
       "\" height=\"" + num(H - T - B) + "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double xv = x_lo + (x_hi - x_lo) * i / 4.0;
    const double yv = y_lo + (y_hi - y_lo) * i / 4.0;
    s += "<text x=\"" + num(sx(xv)) + "\" y=\"" + num(H - B + 16) +
         "\" text-anchor=\"middle\">" + num(xv) + "</text>\n";
    s += "<text x=\"" + num(L - 6) + "\" y=\"" + num(sy(yv) + 4) + "\" text-anchor=\"end\">" +
         num(yv) + "</text>\n";
  }
  s += "<text x=\"" + num(L + (W - L - R) / 2) + "\" y=\"" + num(H - 10) +
       "\" text-anchor=\"middle\">" + x_label + "</text>\n";
  s += "<text x=\"14\" y=\"" + num(T + (H - T - B) / 2) + "\" transform=\"rotate(-90 14 " +
       num(T + (H - T - B) / 2) + ")\" text-anchor=\"middle\">" + y_label + "</text>\n";
  s += "</svg>\n";
  return s;
}

}  // namespace arpp
