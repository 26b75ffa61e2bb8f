#pragma once

// Structure ingestion (CIF subset, native JSON), block files, metadata CSV
// and serialization of invariant outputs.

#include "cia/asymmetry.hpp"
#include "cia/geometry.hpp"
#include "cia/invariants.hpp"

#include <Eigen/Dense>

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>

namespace cia {

struct Rational {
  int num = 0;
  int den = 1;

  double value() const { return static_cast<double>(num) / den; }
  friend bool operator==(const Rational&, const Rational&) = default;
};

/// One coordinate triplet such as "-y, x-y, z+1/3": integer linear part with
/// determinant +-1 and an exact rational translation.
struct SymOp {
  Eigen::Matrix3i linear = Eigen::Matrix3i::Identity();
  std::array<Rational, 3> translation{};

  Eigen::Vector3d apply(const Eigen::Vector3d& frac) const;
  friend bool operator==(const SymOp& a, const SymOp& b) {
    return a.linear == b.linear && a.translation == b.translation;
  }
};

SymOp parseSymOp(std::string_view text);
std::string formatSymOp(const SymOp& op);

struct StructureMetadata {
  std::optional<double> energy;   // kJ/mol
  std::optional<double> density;  // g/cm^3
  std::optional<double> zPrime;
};

struct StructureRecord {
  std::string id;
  PeriodicSet set;
  StructureMetadata metadata;
};

struct CifOptions {
  bool dropHydrogens = false;
};

/// Fractional distance (max-norm of the minimum image) below which expanded
/// CIF sites are merged.
inline constexpr double kCifMergeTolerance = 1e-4;
/// Expanded motifs closer than this (Å) are rejected.
inline constexpr double kCifMinSeparation = 1e-3;

StructureRecord parseCif(std::string_view text, const CifOptions& options = {});

StructureRecord parseStructureJson(std::string_view text);
std::string writeStructureJson(const StructureRecord& record);

/// Reads a .cif or .json structure file; the id defaults to the file stem.
StructureRecord loadStructure(const std::filesystem::path& path, const CifOptions& options = {});

/// Keeps only points whose label is in `keep` (block ids are preserved).
StructureRecord filterLabels(const StructureRecord& record, const std::set<std::string>& keep);

/// Either a JSON object {"<blockId>": [indices...], ...} or "auto:<cutoff>".
BlockPartition parseBlocks(std::string_view text, const PeriodicSet& set);

struct MetadataTable {
  std::map<std::string, StructureMetadata> rows;
  bool hasEnergy = false;
  bool hasDensity = false;
  bool hasZPrime = false;
};

/// Header `id,energy_kj_mol,density_g_cm3,z_prime`; any value column may be
/// absent and any cell may be empty.
MetadataTable parseMetadataCsv(std::string_view text);

enum class Format { Json, Csv };

/// "%.12g"
std::string formatNumber(double x);
/// x rounded to 12 significant digits.
double round12(double x);

enum class MetricSelection { Rms, Chebyshev, Both };

/// JSON carries the scalars, per-block d vectors and EMD matrices; CSV is a
/// single summary row. Fields of an unselected metric are omitted.
std::string writeReport(const CiaReport& report, Format format, std::string_view id = {},
                        MetricSelection metrics = MetricSelection::Both);
std::string writeReport(const PddMatrix& pdd, Format format);
std::string writeReport(const PdaMatrix& pda, Format format);
std::string writeReport(const Eigen::VectorXd& ada, Format format);

CiaReport readCiaReport(std::string_view text, Format format);
PddMatrix readPddMatrix(std::string_view text, Format format);
/// PPC and dimension survive only the JSON form.
PdaMatrix readPdaMatrix(std::string_view text, Format format);
Eigen::VectorXd readVector(std::string_view text, Format format);

std::string readFile(const std::filesystem::path& path);
void writeFile(const std::filesystem::path& path, std::string_view content);

}  // namespace cia
