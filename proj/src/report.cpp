#include "autospec/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <string_view>
#include <tuple>

namespace autospec {

namespace {

// shortest decimal that round-trips the double exactly
std::string fmt(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

// fixed two decimals for SVG coordinates
std::string fmt2(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::fixed, 2);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& field, std::size_t line, const std::string& path) {
  double v = 0.0;
  const auto res = std::from_chars(field.data(), field.data() + field.size(), v);
  if (res.ec != std::errc() || res.ptr != field.data() + field.size()) {
    throw FormatError("'" + path + "' line " + std::to_string(line) + ": bad number '" + field +
                      "'");
  }
  return v;
}

long parse_long(const std::string& field, std::size_t line, const std::string& path) {
  long v = 0;
  const auto res = std::from_chars(field.data(), field.data() + field.size(), v);
  if (res.ec != std::errc() || res.ptr != field.data() + field.size()) {
    throw FormatError("'" + path + "' line " + std::to_string(line) + ": bad integer '" + field +
                      "'");
  }
  return v;
}

std::string group_label(int group) {
  return group == SpectrumSnapshot::kAllGroups ? "all" : std::to_string(group);
}

int group_from_label(const std::string& field, std::size_t line, const std::string& path) {
  if (field == "all") return SpectrumSnapshot::kAllGroups;
  return static_cast<int>(parse_long(field, line, path));
}

void require_plain_field(const std::string& s, const std::string& what) {
  if (s.empty() || s.find_first_of(",\n\r\"") != std::string::npos) {
    throw FormatError(what + " '" + s + "' must be non-empty and free of commas and quotes");
  }
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(',', start);
    if (pos == std::string::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  if (in.bad()) throw IoError("read failed on '" + path + "'");
  return lines;
}

void write_text(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw IoError("write failed on '" + path + "'");
}

auto spectra_key(const SpectraRow& r) {
  return std::tuple(std::string_view(r.experiment_id), r.epoch, r.layer_id,
                    static_cast<int>(r.statistic), r.group, r.sv_index);
}

constexpr const char* kSpectraHeader =
    "experiment_id,epoch,layer_id,statistic,group,sv_index,value";
constexpr const char* kSignificanceHeader =
    "layer_id,layer_name,statistic,group_a,group_b,axis,index,p,alpha,correction,significant";

const char* kPalette[10] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                            "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

}  // namespace

std::vector<SpectraRow> rows_from_snapshots(const std::string& experiment_id,
                                            const std::vector<SpectrumSnapshot>& snapshots) {
  require_plain_field(experiment_id, "experiment id");
  std::vector<SpectraRow> rows;
  for (const SpectrumSnapshot& s : snapshots) {
    for (std::size_t i = 0; i < s.sigma.size(); ++i) {
      SpectraRow r;
      r.experiment_id = experiment_id;
      r.epoch = s.epoch;
      r.layer_id = s.layer_id;
      r.statistic = s.statistic;
      r.group = s.group;
      r.sv_index = i;
      r.value = s.sigma[i];
      rows.push_back(std::move(r));
    }
  }
  return rows;
}

std::size_t write_spectra_csv(const std::vector<SpectraRow>& rows, const std::string& path) {
  std::vector<const SpectraRow*> sorted;
  sorted.reserve(rows.size());
  for (const SpectraRow& r : rows) {
    require_plain_field(r.experiment_id, "experiment id");
    if (!std::isfinite(r.value)) {
      throw NumericError("spectra row for layer " + std::to_string(r.layer_id) + " epoch " +
                         std::to_string(r.epoch) + " has a non-finite value");
    }
    sorted.push_back(&r);
  }
  std::sort(sorted.begin(), sorted.end(),
            [](const SpectraRow* a, const SpectraRow* b) { return spectra_key(*a) < spectra_key(*b); });
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    if (spectra_key(*sorted[i - 1]) == spectra_key(*sorted[i])) {
      throw ContractError("duplicate spectra key (epoch " + std::to_string(sorted[i]->epoch) +
                          ", layer " + std::to_string(sorted[i]->layer_id) + ", " +
                          to_string(sorted[i]->statistic) + ", group " +
                          group_label(sorted[i]->group) + ", sv " +
                          std::to_string(sorted[i]->sv_index) + ")");
    }
  }
  std::string out(kSpectraHeader);
  out += '\n';
  for (const SpectraRow* r : sorted) {
    out += r->experiment_id;
    out += ',';
    out += std::to_string(r->epoch);
    out += ',';
    out += std::to_string(r->layer_id);
    out += ',';
    out += to_string(r->statistic);
    out += ',';
    out += group_label(r->group);
    out += ',';
    out += std::to_string(r->sv_index);
    out += ',';
    out += fmt(r->value);
    out += '\n';
  }
  write_text(path, out);
  return sorted.size();
}

std::vector<SpectraRow> read_spectra_csv(const std::string& path) {
  const std::vector<std::string> lines = read_lines(path);
  if (lines.empty() || lines[0] != kSpectraHeader) {
    throw FormatError("'" + path + "' line 1: expected header '" + kSpectraHeader + "'");
  }
  std::vector<SpectraRow> rows;
  rows.reserve(lines.size() - 1);
  for (std::size_t li = 1; li < lines.size(); ++li) {
    if (lines[li].empty()) continue;  // tolerate a trailing blank line
    const std::vector<std::string> f = split_csv_line(lines[li]);
    if (f.size() != 7) {
      throw FormatError("'" + path + "' line " + std::to_string(li + 1) + ": expected 7 fields, got " +
                        std::to_string(f.size()));
    }
    SpectraRow r;
    r.experiment_id = f[0];
    r.epoch = parse_long(f[1], li + 1, path);
    r.layer_id = static_cast<int>(parse_long(f[2], li + 1, path));
    r.statistic = statistic_from_string(f[3]);
    r.group = group_from_label(f[4], li + 1, path);
    r.sv_index = static_cast<std::size_t>(parse_long(f[5], li + 1, path));
    r.value = parse_double(f[6], li + 1, path);
    rows.push_back(std::move(r));
  }
  return rows;
}

std::vector<SpectrumSnapshot> snapshots_from_rows(const std::vector<SpectraRow>& rows) {
  for (const SpectraRow& r : rows) {
    if (r.experiment_id != rows.front().experiment_id) {
      throw ContractError("rows mix experiments '" + rows.front().experiment_id + "' and '" +
                          r.experiment_id + "'");
    }
  }
  using Key = std::tuple<long, int, int, int>;  // epoch, layer, statistic, group
  std::map<Key, std::vector<std::pair<std::size_t, double>>> buckets;
  for (const SpectraRow& r : rows) {
    buckets[{r.epoch, r.layer_id, static_cast<int>(r.statistic), r.group}].push_back(
        {r.sv_index, r.value});
  }
  std::vector<SpectrumSnapshot> out;
  out.reserve(buckets.size());
  for (auto& [key, entries] : buckets) {
    std::sort(entries.begin(), entries.end());
    SpectrumSnapshot s;
    s.epoch = std::get<0>(key);
    s.layer_id = std::get<1>(key);
    s.layer_name = "layer" + std::to_string(s.layer_id);
    s.statistic = static_cast<Statistic>(std::get<2>(key));
    s.group = std::get<3>(key);
    s.sigma.resize(entries.size());
    for (std::size_t i = 0; i < entries.size(); ++i) {
      if (entries[i].first != i) {
        throw ContractError("snapshot at epoch " + std::to_string(s.epoch) + " layer " +
                            std::to_string(s.layer_id) + " has a gap or duplicate at sv index " +
                            std::to_string(entries[i].first));
      }
      s.sigma[i] = entries[i].second;
    }
    out.push_back(std::move(s));
  }
  return out;
}

std::size_t write_significance_csv(const std::vector<SignificanceReport>& reports,
                                   const std::string& path) {
  std::string out(kSignificanceHeader);
  out += '\n';
  std::size_t count = 0;
  for (const SignificanceReport& rep : reports) {
    require_plain_field(rep.layer_name, "layer name");
    const std::vector<bool> eflags = epoch_flags(rep);
    const std::vector<bool> sflags = sv_flags(rep);
    const bool have_grid = rep.epochs.size() == rep.per_epoch_p.size();
    auto emit = [&](const char* axis, long index, double p, bool sig) {
      out += std::to_string(rep.layer_id);
      out += ',';
      out += rep.layer_name;
      out += ',';
      out += to_string(rep.statistic);
      out += ',';
      out += std::to_string(rep.group_a);
      out += ',';
      out += std::to_string(rep.group_b);
      out += ',';
      out += axis;
      out += ',';
      out += std::to_string(index);
      out += ',';
      out += fmt(p);
      out += ',';
      out += fmt(rep.alpha);
      out += ',';
      out += to_string(rep.correction);
      out += ',';
      out += sig ? '1' : '0';
      out += '\n';
      ++count;
    };
    for (std::size_t i = 0; i < rep.per_epoch_p.size(); ++i) {
      emit("epoch", have_grid ? rep.epochs[i] : static_cast<long>(i), rep.per_epoch_p[i],
           eflags[i]);
    }
    for (std::size_t i = 0; i < rep.per_sv_p.size(); ++i) {
      emit("sv", static_cast<long>(i), rep.per_sv_p[i], sflags[i]);
    }
  }
  write_text(path, out);
  return count;
}

std::vector<SignificanceReport> read_significance_csv(const std::string& path) {
  const std::vector<std::string> lines = read_lines(path);
  if (lines.empty() || lines[0] != kSignificanceHeader) {
    throw FormatError("'" + path + "' line 1: expected header '" + kSignificanceHeader + "'");
  }
  std::vector<SignificanceReport> out;
  auto key_of = [](const SignificanceReport& r) {
    return std::tuple(r.layer_id, static_cast<int>(r.statistic), r.group_a, r.group_b);
  };
  for (std::size_t li = 1; li < lines.size(); ++li) {
    if (lines[li].empty()) continue;
    const std::vector<std::string> f = split_csv_line(lines[li]);
    if (f.size() != 11) {
      throw FormatError("'" + path + "' line " + std::to_string(li + 1) +
                        ": expected 11 fields, got " + std::to_string(f.size()));
    }
    SignificanceReport probe;
    probe.layer_id = static_cast<int>(parse_long(f[0], li + 1, path));
    probe.layer_name = f[1];
    probe.statistic = statistic_from_string(f[2]);
    probe.group_a = static_cast<int>(parse_long(f[3], li + 1, path));
    probe.group_b = static_cast<int>(parse_long(f[4], li + 1, path));
    const double alpha = parse_double(f[8], li + 1, path);
    const Correction corr = correction_from_string(f[9]);
    if (out.empty() || key_of(out.back()) != key_of(probe)) {
      probe.alpha = alpha;
      probe.correction = corr;
      out.push_back(probe);
    }
    SignificanceReport& rep = out.back();
    if (rep.alpha != alpha || rep.correction != corr) {
      throw FormatError("'" + path + "' line " + std::to_string(li + 1) +
                        ": alpha/correction change within one report");
    }
    const double p = parse_double(f[7], li + 1, path);
    if (f[5] == "epoch") {
      rep.epochs.push_back(parse_long(f[6], li + 1, path));
      rep.per_epoch_p.push_back(p);
    } else if (f[5] == "sv") {
      if (static_cast<std::size_t>(parse_long(f[6], li + 1, path)) != rep.per_sv_p.size()) {
        throw FormatError("'" + path + "' line " + std::to_string(li + 1) +
                          ": sv indices out of order");
      }
      rep.per_sv_p.push_back(p);
    } else {
      throw FormatError("'" + path + "' line " + std::to_string(li + 1) + ": unknown axis '" +
                        f[5] + "'");
    }
  }
  return out;
}

namespace {

struct PlotFrame {
  double left, top, width, height;  // plot rectangle in svg coordinates
  double x0, x1, y0, y1;            // data ranges (y already transformed)

  double sx(double x) const {
    if (x1 == x0) return left + width / 2.0;
    return left + (x - x0) / (x1 - x0) * width;
  }
  double sy(double y) const {
    if (y1 == y0) return top + height / 2.0;
    return top + (1.0 - (y - y0) / (y1 - y0)) * height;
  }
};

void svg_open(std::string& svg, int w, int h) {
  svg += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 " + std::to_string(w) + " " +
         std::to_string(h) + "\" font-family=\"monospace\" font-size=\"12\">\n";
  svg += "<rect x=\"0\" y=\"0\" width=\"" + std::to_string(w) + "\" height=\"" +
         std::to_string(h) + "\" fill=\"white\"/>\n";
}

void svg_text(std::string& svg, double x, double y, const std::string& body,
              const std::string& extra = "") {
  svg += "<text x=\"" + fmt2(x) + "\" y=\"" + fmt2(y) + "\"" + (extra.empty() ? "" : " " + extra) +
         ">" + body + "</text>\n";
}

void svg_axes(std::string& svg, const PlotFrame& fr) {
  svg += "<line x1=\"" + fmt2(fr.left) + "\" y1=\"" + fmt2(fr.top) + "\" x2=\"" + fmt2(fr.left) +
         "\" y2=\"" + fmt2(fr.top + fr.height) + "\" stroke=\"black\"/>\n";
  svg += "<line x1=\"" + fmt2(fr.left) + "\" y1=\"" + fmt2(fr.top + fr.height) + "\" x2=\"" +
         fmt2(fr.left + fr.width) + "\" y2=\"" + fmt2(fr.top + fr.height) +
         "\" stroke=\"black\"/>\n";
}

std::string placeholder_svg(const SvgOptions& options, const std::string& message) {
  std::string svg;
  svg_open(svg, options.width, options.height);
  svg_text(svg, options.width / 2.0, options.height / 2.0, message,
           "text-anchor=\"middle\" fill=\"#666666\"");
  svg += "</svg>\n";
  return svg;
}

}  // namespace

std::string render_trajectory_svg(const std::vector<SpectraRow>& rows,
                                  const SvgOptions& options) {
  if (rows.empty()) return placeholder_svg(options, "no data");

  const SpectraRow& first = rows.front();
  std::vector<long> epochs;
  std::vector<std::size_t> svs;
  std::map<std::pair<long, std::size_t>, double> grid;
  for (const SpectraRow& r : rows) {
    if (r.layer_id != first.layer_id || r.statistic != first.statistic ||
        r.group != first.group) {
      throw ContractError("trajectory plot input mixes series (layer " +
                          std::to_string(first.layer_id) + " vs " + std::to_string(r.layer_id) +
                          ")");
    }
    if (!std::isfinite(r.value)) {
      throw NumericError("trajectory plot input has a non-finite value at epoch " +
                         std::to_string(r.epoch));
    }
    if (!grid.emplace(std::pair{r.epoch, r.sv_index}, r.value).second) {
      throw ContractError("duplicate point (epoch " + std::to_string(r.epoch) + ", sv " +
                          std::to_string(r.sv_index) + ")");
    }
    epochs.push_back(r.epoch);
    svs.push_back(r.sv_index);
  }
  std::sort(epochs.begin(), epochs.end());
  epochs.erase(std::unique(epochs.begin(), epochs.end()), epochs.end());
  std::sort(svs.begin(), svs.end());
  svs.erase(std::unique(svs.begin(), svs.end()), svs.end());
  for (long e : epochs) {
    for (std::size_t k : svs) {
      if (!grid.count({e, k})) {
        throw ContractError("incomplete grid: missing (epoch " + std::to_string(e) + ", sv " +
                            std::to_string(k) + ")");
      }
    }
  }

  auto transform = [&](double v) { return options.log_y ? std::log10(v + 1e-300) : v; };
  double lo = transform(grid.begin()->second), hi = lo;
  for (const auto& [k, v] : grid) {
    lo = std::min(lo, transform(v));
    hi = std::max(hi, transform(v));
  }
  if (lo == hi) {
    lo -= 0.5;
    hi += 0.5;
  } else {
    const double pad = 0.05 * (hi - lo);
    lo -= pad;
    hi += pad;
  }

  PlotFrame fr;
  fr.left = 70.0;
  fr.top = 40.0;
  fr.width = options.width - 70.0 - 150.0;
  fr.height = options.height - 40.0 - 50.0;
  fr.x0 = static_cast<double>(epochs.front());
  fr.x1 = static_cast<double>(epochs.back());
  fr.y0 = lo;
  fr.y1 = hi;

  std::string svg;
  svg_open(svg, options.width, options.height);
  svg_axes(svg, fr);
  svg_text(svg, fr.left, 24.0,
           "layer " + std::to_string(first.layer_id) + " / " + to_string(first.statistic) +
               " / group " + group_label(first.group));

  // ticks
  const int n_ticks = 5;
  for (int i = 0; i < n_ticks; ++i) {
    const double frac = static_cast<double>(i) / (n_ticks - 1);
    const double ex = fr.x0 + frac * (fr.x1 - fr.x0);
    const double x = fr.sx(ex);
    svg += "<line x1=\"" + fmt2(x) + "\" y1=\"" + fmt2(fr.top + fr.height) + "\" x2=\"" +
           fmt2(x) + "\" y2=\"" + fmt2(fr.top + fr.height + 4) + "\" stroke=\"black\"/>\n";
    svg_text(svg, x, fr.top + fr.height + 18, fmt2(ex), "text-anchor=\"middle\"");
    const double vy = fr.y0 + frac * (fr.y1 - fr.y0);
    const double y = fr.sy(vy);
    svg += "<line x1=\"" + fmt2(fr.left - 4) + "\" y1=\"" + fmt2(y) + "\" x2=\"" + fmt2(fr.left) +
           "\" y2=\"" + fmt2(y) + "\" stroke=\"black\"/>\n";
    svg_text(svg, fr.left - 8, y + 4, fmt2(vy), "text-anchor=\"end\"");
  }
  svg_text(svg, fr.left + fr.width / 2.0, static_cast<double>(options.height) - 14.0, "epoch",
           "text-anchor=\"middle\"");
  svg_text(svg, 18.0, fr.top + fr.height / 2.0,
           options.log_y ? "log10(value)" : "value",
           "text-anchor=\"middle\" transform=\"rotate(-90 18 " + fmt2(fr.top + fr.height / 2.0) +
               ")\"");

  // one polyline (or marker set) per singular value index
  for (std::size_t si = 0; si < svs.size(); ++si) {
    const std::size_t k = svs[si];
    const char* color = kPalette[si % 10];
    if (epochs.size() == 1) {
      const double x = fr.sx(static_cast<double>(epochs[0]));
      const double y = fr.sy(transform(grid.at({epochs[0], k})));
      svg += "<circle cx=\"" + fmt2(x) + "\" cy=\"" + fmt2(y) + "\" r=\"3\" fill=\"" + color +
             "\"/>\n";
      continue;
    }
    std::string points;
    for (long e : epochs) {
      if (!points.empty()) points += ' ';
      points += fmt2(fr.sx(static_cast<double>(e)));
      points += ',';
      points += fmt2(fr.sy(transform(grid.at({e, k}))));
    }
    svg += "<polyline fill=\"none\" stroke=\"";
    svg += color;
    svg += "\" stroke-width=\"1.2\" points=\"" + points + "\"/>\n";
  }

  // legend, capped to keep wide spectra readable
  const std::size_t legend_max = 12;
  for (std::size_t si = 0; si < svs.size() && si < legend_max; ++si) {
    const double y = fr.top + 14.0 * static_cast<double>(si);
    svg += "<line x1=\"" + fmt2(fr.left + fr.width + 10) + "\" y1=\"" + fmt2(y) + "\" x2=\"" +
           fmt2(fr.left + fr.width + 30) + "\" y2=\"" + fmt2(y) + "\" stroke=\"" +
           kPalette[si % 10] + "\" stroke-width=\"2\"/>\n";
    svg_text(svg, fr.left + fr.width + 36, y + 4, "sv " + std::to_string(svs[si]));
  }
  if (svs.size() > legend_max) {
    svg_text(svg, fr.left + fr.width + 36, fr.top + 14.0 * legend_max + 4,
             "+" + std::to_string(svs.size() - legend_max) + " more");
  }
  svg += "</svg>\n";
  return svg;
}

std::string render_significance_svg(SignificanceReport report, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw DomainError("alpha must be in (0, 1), got " + std::to_string(alpha));
  }
  report.alpha = alpha;
  SvgOptions options;
  if (report.per_epoch_p.empty() && report.per_sv_p.empty()) {
    return placeholder_svg(options, "no p-values");
  }
  const std::vector<bool> eflags = epoch_flags(report);
  const std::vector<bool> sflags = sv_flags(report);

  std::string svg;
  svg_open(svg, options.width, options.height);
  svg_text(svg, 70.0, 24.0,
           report.layer_name + ": group " + std::to_string(report.group_a) + " vs " +
               std::to_string(report.group_b) + " (" + to_string(report.statistic) + ", alpha " +
               fmt(alpha) + ", " + to_string(report.correction) + ")");

  const double left = 70.0, width = options.width - 70.0 - 40.0;
  const bool have_grid = report.epochs.size() == report.per_epoch_p.size();

  // heat strip: one cell per epoch, darker = smaller p
  const double strip_top = 60.0, strip_h = 120.0;
  if (!report.per_epoch_p.empty()) {
    svg_text(svg, left, strip_top - 8, "per-epoch p");
    const double cell_w = width / static_cast<double>(report.per_epoch_p.size());
    for (std::size_t i = 0; i < report.per_epoch_p.size(); ++i) {
      const double p = std::clamp(report.per_epoch_p[i], 0.0, 1.0);
      const int shade = static_cast<int>(std::lround(235.0 * p));
      const std::string color =
          "rgb(" + std::to_string(shade) + "," + std::to_string(shade) + "," +
          std::to_string(shade) + ")";
      svg += "<rect x=\"" + fmt2(left + cell_w * static_cast<double>(i)) + "\" y=\"" +
             fmt2(strip_top) + "\" width=\"" + fmt2(cell_w) + "\" height=\"" + fmt2(strip_h) +
             "\" fill=\"" + color + "\"";
      if (eflags[i]) svg += " class=\"sig\" stroke=\"#d62728\" stroke-width=\"1.5\"";
      svg += "/>\n";
    }
    const long first_epoch = have_grid ? report.epochs.front() : 0;
    const long last_epoch =
        have_grid ? report.epochs.back() : static_cast<long>(report.per_epoch_p.size()) - 1;
    svg_text(svg, left, strip_top + strip_h + 16, "epoch " + std::to_string(first_epoch));
    svg_text(svg, left + width, strip_top + strip_h + 16, std::to_string(last_epoch),
             "text-anchor=\"end\"");
  }

  // bar strip: taller bar = smaller p
  const double bars_top = 240.0, bars_h = 200.0;
  if (!report.per_sv_p.empty()) {
    svg_text(svg, left, bars_top - 8, "per-singular-value p");
    const double slot = width / static_cast<double>(report.per_sv_p.size());
    for (std::size_t i = 0; i < report.per_sv_p.size(); ++i) {
      const double p = std::clamp(report.per_sv_p[i], 0.0, 1.0);
      const double h = (1.0 - p) * bars_h;
      svg += "<rect x=\"" + fmt2(left + slot * static_cast<double>(i) + slot * 0.1) + "\" y=\"" +
             fmt2(bars_top + bars_h - h) + "\" width=\"" + fmt2(slot * 0.8) + "\" height=\"" +
             fmt2(h) + "\"";
      if (sflags[i]) {
        svg += " fill=\"#d62728\" class=\"sig\"";
      } else {
        svg += " fill=\"#888888\"";
      }
      svg += "/>\n";
      if (report.per_sv_p.size() <= 32) {
        svg_text(svg, left + slot * (static_cast<double>(i) + 0.5), bars_top + bars_h + 16,
                 std::to_string(i), "text-anchor=\"middle\"");
      }
    }
    svg += "<line x1=\"" + fmt2(left) + "\" y1=\"" + fmt2(bars_top + bars_h) + "\" x2=\"" +
           fmt2(left + width) + "\" y2=\"" + fmt2(bars_top + bars_h) + "\" stroke=\"black\"/>\n";
  }
  svg += "</svg>\n";
  return svg;
}

}  // namespace autospec
