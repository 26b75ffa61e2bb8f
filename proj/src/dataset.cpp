#include "cia/dataset.hpp"

#include "cia/error.hpp"
#include "cia/io.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace cia {

std::optional<double> pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw Error(Errc::DimensionMismatch, "pearson needs equal-length samples");
  const std::size_t n = x.size();
  if (n < 2) return std::nullopt;
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = x[i] - mx, dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx <= 0 || syy <= 0) return std::nullopt;
  return std::clamp(sxy / (std::sqrt(sxx) * std::sqrt(syy)), -1.0, 1.0);
}

Histogram histogram(std::span<const double> values, double binWidth) {
  Histogram h;
  h.binWidth = binWidth;
  for (double v : values) {
    if (v < kZeroCia) {
      ++h.zeroCount;
      continue;
    }
    const auto bin = static_cast<std::size_t>(std::floor(v / binWidth));
    if (bin >= h.counts.size()) h.counts.resize(bin + 1, 0);
    ++h.counts[bin];
  }
  return h;
}

DatasetSummary summarize(std::vector<StructureSummary> rows) {
  DatasetSummary s;
  s.rows = std::move(rows);
  s.count = s.rows.size();
  for (const auto& r : s.rows) {
    if (r.cia >= kZeroCia) ++s.positiveCount;
    s.maxCia = std::max(s.maxCia, r.cia);
    s.maxCiaInf = std::max(s.maxCiaInf, r.ciaInf);
  }
  s.percentPositive = s.count == 0 ? 0.0 : 100.0 * static_cast<double>(s.positiveCount) / static_cast<double>(s.count);

  using Getter = std::optional<double> (*)(const StructureSummary&);
  const std::vector<std::pair<std::string, Getter>> columns = {
      {"energy", [](const StructureSummary& r) { return r.energy; }},
      {"density", [](const StructureSummary& r) { return r.density; }},
      {"cia", [](const StructureSummary& r) { return std::optional<double>(r.cia); }},
      {"cia_inf", [](const StructureSummary& r) { return std::optional<double>(r.ciaInf); }},
  };
  for (std::size_t a = 0; a < columns.size(); ++a) {
    for (std::size_t b = a + 1; b < columns.size(); ++b) {
      std::vector<double> x, y;
      for (const auto& r : s.rows) {
        const auto va = columns[a].second(r), vb = columns[b].second(r);
        if (va && vb) {
          x.push_back(*va);
          y.push_back(*vb);
        }
      }
      if (auto rho = pearson(x, y)) s.correlations[columns[a].first + "," + columns[b].first] = *rho;
    }
  }
  return s;
}

namespace {

std::string optionalCell(const std::optional<double>& v) { return v ? formatNumber(*v) : ""; }

}  // namespace

std::string summaryCsv(const DatasetSummary& s) {
  std::string out = "id,G,cia,cia_inf,cia_avg,cia_inf_avg,energy_kj_mol,density_g_cm3,z_prime,wall_ms\n";
  for (const auto& r : s.rows) {
    out += r.id + "," + std::to_string(r.G) + "," + formatNumber(r.cia) + "," + formatNumber(r.ciaInf) + "," +
           formatNumber(r.ciaAvg) + "," + formatNumber(r.ciaInfAvg) + "," + optionalCell(r.energy) + "," +
           optionalCell(r.density) + "," + optionalCell(r.zPrime) + "," + formatNumber(r.wallMs) + "\n";
  }
  return out;
}

std::string histogramCsv(const DatasetSummary& s) {
  std::vector<double> cia, ciaInf;
  for (const auto& r : s.rows) {
    cia.push_back(r.cia);
    ciaInf.push_back(r.ciaInf);
  }
  const Histogram h = histogram(cia);
  const Histogram hInf = histogram(ciaInf);
  std::string out = "bin,lo,hi,count_cia,count_cia_inf\n";
  out += "zero,0,0," + std::to_string(h.zeroCount) + "," + std::to_string(hInf.zeroCount) + "\n";
  const std::size_t bins = std::max(h.counts.size(), hInf.counts.size());
  for (std::size_t b = 0; b < bins; ++b) {
    const std::size_t c = b < h.counts.size() ? h.counts[b] : 0;
    const std::size_t ci = b < hInf.counts.size() ? hInf.counts[b] : 0;
    out += std::to_string(b) + "," + formatNumber(static_cast<double>(b) * h.binWidth) + "," +
           formatNumber(static_cast<double>(b + 1) * h.binWidth) + "," + std::to_string(c) + "," +
           std::to_string(ci) + "\n";
  }
  return out;
}

std::string scatterCsv(const DatasetSummary& s) {
  std::string out = "id,density_g_cm3,energy_kj_mol,cia,cia_inf\n";
  for (const auto& r : s.rows) {
    out += r.id + "," + optionalCell(r.density) + "," + optionalCell(r.energy) + "," + formatNumber(r.cia) + "," +
           formatNumber(r.ciaInf) + "\n";
  }
  return out;
}

std::string aggregateJson(const DatasetSummary& s) {
  nlohmann::ordered_json doc;
  doc["count"] = s.count;
  doc["count_cia_positive"] = s.positiveCount;
  doc["percent_cia_positive"] = round12(s.percentPositive);
  doc["max_cia"] = round12(s.maxCia);
  doc["max_cia_inf"] = round12(s.maxCiaInf);
  nlohmann::ordered_json corr = nlohmann::ordered_json::object();
  for (const auto& [key, value] : s.correlations) {
    const auto comma = key.find(',');
    corr["r(" + key.substr(0, comma) + ", " + key.substr(comma + 1) + ")"] = round12(value);
  }
  doc["pearson"] = corr;
  return doc.dump(2) + "\n";
}

std::string runtimeCsv(const DatasetSummary& s) {
  std::map<std::size_t, std::pair<std::size_t, double>> byG;
  for (const auto& r : s.rows) {
    auto& [n, total] = byG[r.G];
    ++n;
    total += r.wallMs;
  }
  std::string out = "G,structures,mean_wall_ms\n";
  for (const auto& [G, acc] : byG) {
    out += std::to_string(G) + "," + std::to_string(acc.first) + "," +
           formatNumber(acc.second / static_cast<double>(acc.first)) + "\n";
  }
  return out;
}

std::vector<StructureSummary> parseSummaryCsv(std::string_view text) {
  std::vector<StructureSummary> out;
  std::istringstream in{std::string(text)};
  std::string line;
  bool header = true;
  auto num = [](const std::string& cell) -> std::optional<double> {
    if (cell.empty()) return std::nullopt;
    return std::stod(cell);
  };
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (header) {
      header = false;
      continue;
    }
    std::vector<std::string> cells;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    if (cells.size() != 10) throw Error(Errc::ParseError, "summary row has " + std::to_string(cells.size()) + " cells");
    StructureSummary r;
    r.id = cells[0];
    r.G = static_cast<std::size_t>(std::stoul(cells[1]));
    r.cia = std::stod(cells[2]);
    r.ciaInf = std::stod(cells[3]);
    r.ciaAvg = std::stod(cells[4]);
    r.ciaInfAvg = std::stod(cells[5]);
    r.energy = num(cells[6]);
    r.density = num(cells[7]);
    r.zPrime = num(cells[8]);
    r.wallMs = std::stod(cells[9]);
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace cia
