#include "cia/io.hpp"

#include "cia/error.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <fstream>
#include <sstream>

namespace cia {

using nlohmann::json;

std::string formatNumber(double x) {
  if (x == 0.0) return "0";  // no "-0"
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

double round12(double x) {
  if (!std::isfinite(x)) return x;
  return std::strtod(formatNumber(x).c_str(), nullptr);
}

std::string readFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::ParseError, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void writeFile(const std::filesystem::path& path, std::string_view content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::ParseError, "cannot write " + path.string());
  out << content;
}

namespace {

json parseJson(std::string_view text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(Errc::ParseError, e.what());
  }
}

template <class Fn>
auto withJsonErrors(Fn&& fn) {
  try {
    return fn();
  } catch (const json::exception& e) {
    throw Error(Errc::ParseError, e.what());
  }
}

json roundedRow(const Eigen::Ref<const Eigen::RowVectorXd>& row) {
  json out = json::array();
  for (Eigen::Index j = 0; j < row.size(); ++j) out.push_back(round12(row[j]));
  return out;
}

json roundedMatrix(const Eigen::MatrixXd& m) {
  json out = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) out.push_back(roundedRow(m.row(i)));
  return out;
}

json roundedVector(const Eigen::VectorXd& v) { return roundedRow(v.transpose()); }

Eigen::VectorXd vectorFromJson(const json& j) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
  return v;
}

Eigen::MatrixXd matrixFromJson(const json& j, Eigen::Index cols = -1) {
  const auto rows = static_cast<Eigen::Index>(j.size());
  if (cols < 0) cols = rows == 0 ? 0 : static_cast<Eigen::Index>(j[0].size());
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const json& row = j[static_cast<std::size_t>(i)];
    if (static_cast<Eigen::Index>(row.size()) != cols) throw Error(Errc::ParseError, "ragged matrix");
    for (Eigen::Index c = 0; c < cols; ++c) m(i, c) = row[static_cast<std::size_t>(c)].get<double>();
  }
  return m;
}

std::vector<std::string> splitCsvLine(std::string_view line) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur += ch;
    }
  }
  out.push_back(cur);
  for (auto& cell : out) {
    const auto b = cell.find_first_not_of(" \t");
    const auto e = cell.find_last_not_of(" \t");
    cell = b == std::string::npos ? "" : cell.substr(b, e - b + 1);
  }
  return out;
}

std::vector<std::vector<std::string>> csvRows(std::string_view text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    rows.push_back(splitCsvLine(line));
  }
  return rows;
}

double csvNumber(const std::string& cell) {
  try {
    std::size_t used = 0;
    const double v = std::stod(cell, &used);
    if (used != cell.size()) throw Error(Errc::ParseError, "bad number '" + cell + "'");
    return v;
  } catch (const std::logic_error&) {
    throw Error(Errc::ParseError, "bad number '" + cell + "'");
  }
}

template <class Matrix>
std::string weightedRowsCsv(const std::vector<double>& weights, const Matrix& rows) {
  std::string out = "weight";
  for (Eigen::Index j = 0; j < rows.cols(); ++j) out += ",c" + std::to_string(j + 1);
  out += '\n';
  for (std::size_t i = 0; i < weights.size(); ++i) {
    out += formatNumber(weights[i]);
    for (Eigen::Index j = 0; j < rows.cols(); ++j) out += "," + formatNumber(rows(static_cast<Eigen::Index>(i), j));
    out += '\n';
  }
  return out;
}

void weightedRowsFromCsv(std::string_view text, std::vector<double>& weights, Eigen::MatrixXd& rows) {
  const auto table = csvRows(text);
  if (table.empty() || table[0].empty() || table[0][0] != "weight") {
    throw Error(Errc::ParseError, "expected header starting with 'weight'");
  }
  const auto k = static_cast<Eigen::Index>(table[0].size() - 1);
  rows.resize(static_cast<Eigen::Index>(table.size() - 1), k);
  weights.clear();
  for (std::size_t r = 1; r < table.size(); ++r) {
    if (static_cast<Eigen::Index>(table[r].size()) != k + 1) throw Error(Errc::ParseError, "ragged CSV row");
    weights.push_back(csvNumber(table[r][0]));
    for (Eigen::Index j = 0; j < k; ++j) {
      rows(static_cast<Eigen::Index>(r - 1), j) = csvNumber(table[r][static_cast<std::size_t>(j + 1)]);
    }
  }
}

json weightsJson(const std::vector<double>& weights) {
  json out = json::array();
  for (double w : weights) out.push_back(round12(w));
  return out;
}

}  // namespace

StructureRecord parseStructureJson(std::string_view text) {
  const json doc = parseJson(text);
  return withJsonErrors([&] {
    const json& basisJson = doc.at("lattice");
    const Eigen::MatrixXd basis = matrixFromJson(basisJson);
    std::vector<MotifPoint> motif;
    for (const json& p : doc.at("points")) {
      MotifPoint point;
      point.frac = vectorFromJson(p.at("frac"));
      point.label = p.value("label", std::string("X"));
      if (p.contains("block") && !p["block"].is_null()) point.block = p["block"].get<int>();
      motif.push_back(std::move(point));
    }
    StructureMetadata meta;
    if (doc.contains("metadata")) {
      const json& m = doc["metadata"];
      auto opt = [&](const char* key) -> std::optional<double> {
        if (m.contains(key) && !m[key].is_null()) return m[key].get<double>();
        return std::nullopt;
      };
      meta.energy = opt("energy_kj_mol");
      meta.density = opt("density_g_cm3");
      meta.zPrime = opt("z_prime");
    }
    return StructureRecord{doc.value("id", std::string()), PeriodicSet(Lattice(basis), std::move(motif)), meta};
  });
}

std::string writeStructureJson(const StructureRecord& record) {
  json doc;
  doc["id"] = record.id;
  json lattice = json::array();
  const Eigen::MatrixXd& b = record.set.lattice().basis();
  for (Eigen::Index i = 0; i < b.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < b.cols(); ++j) row.push_back(b(i, j));
    lattice.push_back(row);
  }
  doc["lattice"] = lattice;
  json points = json::array();
  for (const auto& p : record.set.motif()) {
    json jp;
    jp["frac"] = std::vector<double>(p.frac.data(), p.frac.data() + p.frac.size());
    jp["label"] = p.label;
    if (p.block) jp["block"] = *p.block;
    points.push_back(jp);
  }
  doc["points"] = points;
  json meta = json::object();
  if (record.metadata.energy) meta["energy_kj_mol"] = *record.metadata.energy;
  if (record.metadata.density) meta["density_g_cm3"] = *record.metadata.density;
  if (record.metadata.zPrime) meta["z_prime"] = *record.metadata.zPrime;
  if (!meta.empty()) doc["metadata"] = meta;
  return doc.dump(1) + "\n";
}

StructureRecord loadStructure(const std::filesystem::path& path, const CifOptions& options) {
  const std::string text = readFile(path);
  std::string ext = path.extension().string();
  for (auto& ch : ext) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  StructureRecord record = [&] {
    if (ext == ".cif") return parseCif(text, options);
    if (ext == ".json") {
      StructureRecord r = parseStructureJson(text);
      if (options.dropHydrogens) {
        std::set<std::string> keep;
        bool hasHydrogen = false;
        for (const auto& p : r.set.motif()) {
          if (p.label == "H" || p.label == "D") {
            hasHydrogen = true;
          } else {
            keep.insert(p.label);
          }
        }
        if (hasHydrogen) r = filterLabels(r, keep);
      }
      return r;
    }
    throw Error(Errc::ParseError, "unsupported structure file extension '" + ext + "' (" + path.string() + ")");
  }();
  record.id = path.stem().string();
  return record;
}

StructureRecord filterLabels(const StructureRecord& record, const std::set<std::string>& keep) {
  std::vector<MotifPoint> motif;
  for (const auto& p : record.set.motif())
    if (keep.contains(p.label)) motif.push_back(p);
  if (motif.empty()) throw Error(Errc::EmptyStructure, "no points of '" + record.id + "' carry a kept label");
  return {record.id, PeriodicSet(record.set.lattice(), std::move(motif)), record.metadata};
}

BlockPartition parseBlocks(std::string_view text, const PeriodicSet& set) {
  std::string trimmed(text);
  trimmed.erase(0, trimmed.find_first_not_of(" \t\r\n"));
  trimmed.erase(trimmed.find_last_not_of(" \t\r\n") + 1);
  if (trimmed.rfind("auto:", 0) == 0) {
    double cutoff = 0.0;
    try {
      std::size_t used = 0;
      cutoff = std::stod(trimmed.substr(5), &used);
      if (used != trimmed.size() - 5) throw std::invalid_argument("trailing");
    } catch (const std::logic_error&) {
      throw Error(Errc::InvalidPartition, "bad connectivity cutoff in '" + trimmed + "'");
    }
    return blocksFromConnectivity(set, cutoff);
  }
  const json doc = parseJson(trimmed);
  if (!doc.is_object()) throw Error(Errc::InvalidPartition, "block file must be a JSON object");
  std::vector<std::pair<long long, std::vector<std::size_t>>> keyed;
  withJsonErrors([&] {
    for (const auto& [key, members] : doc.items()) {
      long long id = 0;
      try {
        std::size_t used = 0;
        id = std::stoll(key, &used);
        if (used != key.size()) throw std::invalid_argument(key);
      } catch (const std::logic_error&) {
        throw Error(Errc::InvalidPartition, "block id '" + key + "' is not an integer");
      }
      std::vector<std::size_t> indices;
      for (const json& idx : members) {
        const long long v = idx.get<long long>();
        if (v < 0) throw Error(Errc::InvalidPartition, "negative index in block " + key);
        indices.push_back(static_cast<std::size_t>(v));
      }
      keyed.emplace_back(id, std::move(indices));
    }
    return 0;
  });
  std::sort(keyed.begin(), keyed.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  BlockPartition partition;
  partition.provenance = BlockProvenance::FromInput;
  for (auto& [id, members] : keyed) partition.blocks.push_back(std::move(members));
  validatePartition(partition, set.size());
  return partition;
}

MetadataTable parseMetadataCsv(std::string_view text) {
  const auto table = csvRows(text);
  if (table.empty()) throw Error(Errc::ParseError, "metadata CSV is empty");
  const auto& header = table[0];
  auto column = [&](std::string_view name) -> std::optional<std::size_t> {
    for (std::size_t c = 0; c < header.size(); ++c)
      if (header[c] == name) return c;
    return std::nullopt;
  };
  const auto idCol = column("id");
  if (!idCol) throw Error(Errc::ParseError, "metadata CSV needs an 'id' column");
  const auto eCol = column("energy_kj_mol"), dCol = column("density_g_cm3"), zCol = column("z_prime");
  MetadataTable out;
  out.hasEnergy = eCol.has_value();
  out.hasDensity = dCol.has_value();
  out.hasZPrime = zCol.has_value();
  for (std::size_t r = 1; r < table.size(); ++r) {
    const auto& row = table[r];
    auto cell = [&](std::optional<std::size_t> c) -> std::optional<double> {
      if (!c || *c >= row.size() || row[*c].empty()) return std::nullopt;
      return csvNumber(row[*c]);
    };
    if (*idCol >= row.size() || row[*idCol].empty()) {
      throw Error(Errc::ParseError, "metadata row " + std::to_string(r + 1) + " has no id");
    }
    out.rows[row[*idCol]] = {cell(eCol), cell(dCol), cell(zCol)};
  }
  return out;
}

std::string writeReport(const CiaReport& r, Format format, std::string_view id, MetricSelection metrics) {
  const bool rms = metrics != MetricSelection::Chebyshev;
  const bool inf = metrics != MetricSelection::Rms;
  if (format == Format::Csv) {
    std::string header = "id,k,G";
    std::string row = std::string(id) + "," + std::to_string(r.k) + "," + std::to_string(r.blockCount());
    if (rms) {
      header += ",cia,cia_avg,center_index";
      row += "," + formatNumber(r.cia) + "," + formatNumber(r.ciaAvg) + "," + std::to_string(r.centerIndex);
    }
    if (inf) {
      header += ",cia_inf,cia_inf_avg,center_index_inf";
      row += "," + formatNumber(r.ciaInf) + "," + formatNumber(r.ciaInfAvg) + "," + std::to_string(r.centerIndexInf);
    }
    return header + "\n" + row + "\n";
  }
  json doc;
  if (!id.empty()) doc["id"] = std::string(id);
  doc["k"] = r.k;
  doc["G"] = r.blockCount();
  if (rms) {
    doc["cia"] = round12(r.cia);
    doc["cia_avg"] = round12(r.ciaAvg);
    doc["center_index"] = r.centerIndex;
    doc["d_rms"] = roundedVector(r.dRms);
    doc["emd_rms"] = roundedMatrix(r.emdRms);
  }
  if (inf) {
    doc["cia_inf"] = round12(r.ciaInf);
    doc["cia_inf_avg"] = round12(r.ciaInfAvg);
    doc["center_index_inf"] = r.centerIndexInf;
    doc["d_inf"] = roundedVector(r.dInf);
    doc["emd_inf"] = roundedMatrix(r.emdInf);
  }
  return doc.dump(2) + "\n";
}

CiaReport readCiaReport(std::string_view text, Format format) {
  CiaReport r;
  if (format == Format::Csv) {
    const auto table = csvRows(text);
    if (table.size() != 2 || table[0].size() != table[1].size()) {
      throw Error(Errc::ParseError, "CIA CSV must be one header and one data row");
    }
    for (std::size_t c = 0; c < table[0].size(); ++c) {
      const std::string& name = table[0][c];
      const std::string& v = table[1][c];
      if (name == "k") r.k = static_cast<int>(csvNumber(v));
      else if (name == "G") r.blocks = static_cast<std::size_t>(csvNumber(v));
      else if (name == "cia") r.cia = csvNumber(v);
      else if (name == "cia_avg") r.ciaAvg = csvNumber(v);
      else if (name == "cia_inf") r.ciaInf = csvNumber(v);
      else if (name == "cia_inf_avg") r.ciaInfAvg = csvNumber(v);
      else if (name == "center_index") r.centerIndex = static_cast<std::size_t>(csvNumber(v));
      else if (name == "center_index_inf") r.centerIndexInf = static_cast<std::size_t>(csvNumber(v));
    }
    return r;
  }
  const json doc = parseJson(text);
  return withJsonErrors([&] {
    r.k = doc.at("k").get<int>();
    r.blocks = doc.at("G").get<std::size_t>();
    if (doc.contains("cia")) {
      r.cia = doc["cia"].get<double>();
      r.ciaAvg = doc.at("cia_avg").get<double>();
      r.centerIndex = doc.at("center_index").get<std::size_t>();
      r.dRms = vectorFromJson(doc.at("d_rms"));
      r.emdRms = matrixFromJson(doc.at("emd_rms"));
    }
    if (doc.contains("cia_inf")) {
      r.ciaInf = doc["cia_inf"].get<double>();
      r.ciaInfAvg = doc.at("cia_inf_avg").get<double>();
      r.centerIndexInf = doc.at("center_index_inf").get<std::size_t>();
      r.dInf = vectorFromJson(doc.at("d_inf"));
      r.emdInf = matrixFromJson(doc.at("emd_inf"));
    }
    return r;
  });
}

std::string writeReport(const PddMatrix& p, Format format) {
  if (format == Format::Csv) return weightedRowsCsv(p.weights, p.rows);
  json doc;
  doc["k"] = p.k();
  doc["collapsed"] = p.collapsed;
  doc["weights"] = weightsJson(p.weights);
  doc["rows"] = roundedMatrix(p.rows);
  return doc.dump(2) + "\n";
}

std::string writeReport(const PdaMatrix& p, Format format) {
  if (format == Format::Csv) return weightedRowsCsv(p.weights, p.rows);
  json doc;
  doc["k"] = p.k();
  doc["dim"] = p.dim;
  doc["ppc"] = round12(p.ppc);
  doc["collapsed"] = p.collapsed;
  doc["weights"] = weightsJson(p.weights);
  doc["rows"] = roundedMatrix(p.rows);
  return doc.dump(2) + "\n";
}

std::string writeReport(const Eigen::VectorXd& ada, Format format) {
  if (format == Format::Csv) {
    std::string out = "j,ada\n";
    for (Eigen::Index j = 0; j < ada.size(); ++j) out += std::to_string(j + 1) + "," + formatNumber(ada[j]) + "\n";
    return out;
  }
  json doc;
  doc["ada"] = roundedVector(ada);
  return doc.dump(2) + "\n";
}

PddMatrix readPddMatrix(std::string_view text, Format format) {
  PddMatrix p;
  if (format == Format::Csv) {
    weightedRowsFromCsv(text, p.weights, p.rows);
    p.collapsed = true;
    return p;
  }
  const json doc = parseJson(text);
  return withJsonErrors([&] {
    p.collapsed = doc.at("collapsed").get<bool>();
    p.weights = doc.at("weights").get<std::vector<double>>();
    p.rows = matrixFromJson(doc.at("rows"), doc.at("k").get<Eigen::Index>());
    return p;
  });
}

PdaMatrix readPdaMatrix(std::string_view text, Format format) {
  PdaMatrix p;
  if (format == Format::Csv) {
    weightedRowsFromCsv(text, p.weights, p.rows);
    p.collapsed = true;
    p.ppc = std::numeric_limits<double>::quiet_NaN();
    return p;
  }
  const json doc = parseJson(text);
  return withJsonErrors([&] {
    p.collapsed = doc.at("collapsed").get<bool>();
    p.dim = doc.at("dim").get<int>();
    p.ppc = doc.at("ppc").get<double>();
    p.weights = doc.at("weights").get<std::vector<double>>();
    p.rows = matrixFromJson(doc.at("rows"), doc.at("k").get<Eigen::Index>());
    return p;
  });
}

Eigen::VectorXd readVector(std::string_view text, Format format) {
  if (format == Format::Csv) {
    const auto table = csvRows(text);
    if (table.empty() || table[0].size() != 2) throw Error(Errc::ParseError, "expected 'j,ada' CSV");
    Eigen::VectorXd v(static_cast<Eigen::Index>(table.size() - 1));
    for (std::size_t r = 1; r < table.size(); ++r) v[static_cast<Eigen::Index>(r - 1)] = csvNumber(table[r][1]);
    return v;
  }
  const json doc = parseJson(text);
  return withJsonErrors([&] { return vectorFromJson(doc.at("ada")); });
}

}  // namespace cia
