#pragma once

// Dataset-level statistics: per-structure summaries, CIA histograms with a
// separate exact-zero bin, Pearson correlations and runtime per block count.

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace cia {

/// Asymmetries below this count as exactly zero.
inline constexpr double kZeroCia = 1e-12;
inline constexpr double kHistogramBinWidth = 0.01;

/// Pearson correlation, clamped to [-1, 1]; empty if fewer than two points or
/// either sample has zero variance.
std::optional<double> pearson(std::span<const double> x, std::span<const double> y);

struct Histogram {
  double binWidth = kHistogramBinWidth;
  std::size_t zeroCount = 0;
  std::vector<std::size_t> counts;  // bin b covers [b*w, (b+1)*w) for nonzero values
};

Histogram histogram(std::span<const double> values, double binWidth = kHistogramBinWidth);

struct StructureSummary {
  std::string id;
  std::size_t G = 0;
  double cia = 0.0;
  double ciaInf = 0.0;
  double ciaAvg = 0.0;
  double ciaInfAvg = 0.0;
  std::optional<double> energy;
  std::optional<double> density;
  std::optional<double> zPrime;
  double wallMs = 0.0;
};

struct DatasetSummary {
  std::vector<StructureSummary> rows;
  std::size_t count = 0;
  std::size_t positiveCount = 0;
  double percentPositive = 0.0;
  double maxCia = 0.0;
  double maxCiaInf = 0.0;
  /// Keyed "energy,density", "energy,cia", ... for every pair among
  /// {energy, density, cia, cia_inf} with at least two complete rows.
  std::map<std::string, double> correlations;
};

DatasetSummary summarize(std::vector<StructureSummary> rows);

std::string summaryCsv(const DatasetSummary& summary);
std::string histogramCsv(const DatasetSummary& summary);
std::string scatterCsv(const DatasetSummary& summary);
std::string aggregateJson(const DatasetSummary& summary);
std::string runtimeCsv(const DatasetSummary& summary);

/// Reads back a summaryCsv table (for self-consistency checks).
std::vector<StructureSummary> parseSummaryCsv(std::string_view text);

}  // namespace cia
