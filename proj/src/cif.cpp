#include "cia/error.hpp"
#include "cia/io.hpp"
#include "cia/neighbors.hpp"

#include <cctype>
#include <cmath>
#include <map>
#include <optional>

namespace cia {

namespace {

struct Token {
  std::string text;
  int line;
  bool quoted;
};

std::vector<Token> tokenize(std::string_view text) {
  std::vector<Token> out;
  int line = 1;
  std::size_t i = 0;
  bool lineStart = true;
  while (i < text.size()) {
    const char c = text[i];
    if (c == '\n') {
      ++line;
      ++i;
      lineStart = true;
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    if (c == '#') {
      while (i < text.size() && text[i] != '\n') ++i;
      continue;
    }
    if (c == ';' && lineStart) {
      // Semicolon text field: runs until a line beginning with ';'.
      const int startLine = line;
      std::size_t j = i + 1;
      std::string field;
      for (;;) {
        if (j >= text.size()) throw Error(Errc::MalformedCif, "unterminated text field at line " + std::to_string(startLine));
        if (text[j] == '\n') {
          ++line;
          if (j + 1 < text.size() && text[j + 1] == ';') {
            i = j + 2;
            break;
          }
        }
        field += text[j];
        ++j;
      }
      out.push_back({field, startLine, true});
      lineStart = false;
      continue;
    }
    lineStart = false;
    if (c == '\'' || c == '"') {
      // A quote closes only when followed by whitespace or end of input.
      std::size_t j = i + 1;
      while (j < text.size() &&
             !(text[j] == c && (j + 1 == text.size() || std::isspace(static_cast<unsigned char>(text[j + 1]))))) {
        if (text[j] == '\n') throw Error(Errc::MalformedCif, "unterminated quoted string at line " + std::to_string(line));
        ++j;
      }
      if (j >= text.size()) throw Error(Errc::MalformedCif, "unterminated quoted string at line " + std::to_string(line));
      out.push_back({std::string(text.substr(i + 1, j - i - 1)), line, true});
      i = j + 1;
      continue;
    }
    std::size_t j = i;
    while (j < text.size() && !std::isspace(static_cast<unsigned char>(text[j]))) ++j;
    out.push_back({std::string(text.substr(i, j - i)), line, false});
    i = j;
  }
  return out;
}

std::string lower(std::string s) {
  for (auto& ch : s) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  return s;
}

bool isTag(const Token& t) { return !t.quoted && !t.text.empty() && t.text[0] == '_'; }
bool isKeyword(const Token& t, std::string_view kw) {
  return !t.quoted && lower(t.text).rfind(kw, 0) == 0;
}

struct CifBlock {
  std::string name;
  int line = 0;
  int lastLine = 0;
  std::map<std::string, Token> items;
  std::map<std::string, std::vector<Token>> columns;  // loop columns by tag
};

CifBlock parseFirstBlock(const std::vector<Token>& tokens) {
  CifBlock block;
  std::size_t i = 0;
  while (i < tokens.size() && !isKeyword(tokens[i], "data_")) ++i;
  if (i == tokens.size()) throw Error(Errc::MalformedCif, "no data_ block found (line 1)");
  block.name = tokens[i].text.substr(5);
  block.line = block.lastLine = tokens[i].line;
  ++i;
  while (i < tokens.size()) {
    const Token& t = tokens[i];
    block.lastLine = t.line;
    if (isKeyword(t, "data_")) break;
    if (isKeyword(t, "loop_")) {
      ++i;
      std::vector<std::string> tags;
      while (i < tokens.size() && isTag(tokens[i])) tags.push_back(lower(tokens[i++].text));
      if (tags.empty()) throw Error(Errc::MalformedCif, "loop_ without tags at line " + std::to_string(t.line));
      std::vector<Token> values;
      while (i < tokens.size() && !isTag(tokens[i]) && !isKeyword(tokens[i], "loop_") &&
             !isKeyword(tokens[i], "data_")) {
        values.push_back(tokens[i++]);
      }
      if (values.size() % tags.size() != 0) {
        throw Error(Errc::MalformedCif, "loop at line " + std::to_string(t.line) + " has " +
                                            std::to_string(values.size()) + " values for " +
                                            std::to_string(tags.size()) + " tags");
      }
      for (std::size_t v = 0; v < values.size(); ++v) block.columns[tags[v % tags.size()]].push_back(values[v]);
      continue;
    }
    if (isTag(t)) {
      if (i + 1 >= tokens.size() || isTag(tokens[i + 1])) {
        throw Error(Errc::MalformedCif, "tag " + t.text + " without value at line " + std::to_string(t.line));
      }
      block.items[lower(t.text)] = tokens[i + 1];
      i += 2;
      continue;
    }
    throw Error(Errc::MalformedCif, "unexpected value '" + t.text + "' at line " + std::to_string(t.line));
  }
  return block;
}

std::optional<double> cifNumber(const Token& t) {
  std::string s = t.text;
  if (s == "?" || s == ".") return std::nullopt;
  if (const auto paren = s.find('('); paren != std::string::npos) s.resize(paren);
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw Error(Errc::MalformedCif, "bad number '" + t.text + "' at line " + std::to_string(t.line));
    return v;
  } catch (const std::logic_error&) {
    throw Error(Errc::MalformedCif, "bad number '" + t.text + "' at line " + std::to_string(t.line));
  }
}

double requireCell(const CifBlock& block, const std::string& tag) {
  const auto it = block.items.find(tag);
  if (it == block.items.end()) {
    throw Error(Errc::MalformedCif, "missing " + tag + " in block '" + block.name + "' (lines " +
                                        std::to_string(block.line) + "-" + std::to_string(block.lastLine) + ")");
  }
  const auto v = cifNumber(it->second);
  if (!v) throw Error(Errc::MalformedCif, "unknown value for " + tag + " at line " + std::to_string(it->second.line));
  return *v;
}

std::vector<Token> columnOrItem(const CifBlock& block, const std::string& tag) {
  if (auto it = block.columns.find(tag); it != block.columns.end()) return it->second;
  if (auto it = block.items.find(tag); it != block.items.end()) return {it->second};
  return {};
}

// "Na1+" -> "Na", "C12A" -> "C", "o2-" -> "O". A second letter counts only
// when it is lower case.
std::string elementSymbol(const std::string& raw) {
  if (raw.empty() || !std::isalpha(static_cast<unsigned char>(raw[0]))) return raw;
  std::string out(1, static_cast<char>(std::toupper(static_cast<unsigned char>(raw[0]))));
  if (raw.size() > 1 && std::islower(static_cast<unsigned char>(raw[1]))) out += raw[1];
  return out;
}

}  // namespace

StructureRecord parseCif(std::string_view text, const CifOptions& options) {
  const CifBlock block = parseFirstBlock(tokenize(text));

  const Lattice lattice = Lattice::fromCellParameters(
      requireCell(block, "_cell_length_a"), requireCell(block, "_cell_length_b"),
      requireCell(block, "_cell_length_c"), requireCell(block, "_cell_angle_alpha"),
      requireCell(block, "_cell_angle_beta"), requireCell(block, "_cell_angle_gamma"));

  std::vector<SymOp> ops;
  for (const char* tag : {"_symmetry_equiv_pos_as_xyz", "_space_group_symop_operation_xyz"}) {
    for (const Token& t : columnOrItem(block, tag)) ops.push_back(parseSymOp(t.text));
    if (!ops.empty()) break;
  }
  if (ops.empty()) ops.push_back(SymOp{});

  const auto fx = columnOrItem(block, "_atom_site_fract_x");
  const auto fy = columnOrItem(block, "_atom_site_fract_y");
  const auto fz = columnOrItem(block, "_atom_site_fract_z");
  const auto labels = columnOrItem(block, "_atom_site_label");
  const auto types = columnOrItem(block, "_atom_site_type_symbol");
  if (fx.empty() || fy.empty() || fz.empty()) {
    throw Error(Errc::MalformedCif, "missing _atom_site_fract_{x,y,z} loop in block '" + block.name +
                                        "' (lines " + std::to_string(block.line) + "-" +
                                        std::to_string(block.lastLine) + ")");
  }
  if (labels.empty() && types.empty()) {
    throw Error(Errc::MalformedCif, "atom-site loop needs _atom_site_label or _atom_site_type_symbol (line " +
                                        std::to_string(fx.front().line) + ")");
  }
  const std::size_t nSites = fx.size();
  if (fy.size() != nSites || fz.size() != nSites || (!labels.empty() && labels.size() != nSites) ||
      (!types.empty() && types.size() != nSites)) {
    throw Error(Errc::MalformedCif, "atom-site columns differ in length (line " + std::to_string(fx.front().line) + ")");
  }

  struct Site {
    Eigen::Vector3d frac;
    std::string label;
  };
  std::vector<Site> sites;
  for (std::size_t s = 0; s < nSites; ++s) {
    const std::string symbol =
        elementSymbol(!types.empty() && types[s].text != "?" && types[s].text != "." ? types[s].text : labels[s].text);
    if (options.dropHydrogens && (symbol == "H" || symbol == "D")) continue;
    const auto x = cifNumber(fx[s]), y = cifNumber(fy[s]), z = cifNumber(fz[s]);
    if (!x || !y || !z) throw Error(Errc::MalformedCif, "unknown coordinate at line " + std::to_string(fx[s].line));
    const Eigen::Vector3d base(*x, *y, *z);
    for (const SymOp& op : ops) {
      Eigen::Vector3d f = op.apply(base);
      for (int a = 0; a < 3; ++a) f[a] = wrapUnit(f[a]);
      bool duplicate = false;
      for (const Site& other : sites) {
        if (other.label != symbol) continue;
        Eigen::Vector3d d = f - other.frac;
        for (int a = 0; a < 3; ++a) d[a] -= std::round(d[a]);
        if (d.cwiseAbs().maxCoeff() < kCifMergeTolerance) {
          duplicate = true;
          break;
        }
      }
      if (!duplicate) sites.push_back({f, symbol});
    }
  }
  if (sites.empty()) throw Error(Errc::EmptyStructure, "no atoms left in block '" + block.name + "'");

  std::vector<MotifPoint> motif;
  motif.reserve(sites.size());
  for (auto& s : sites) motif.push_back({Eigen::VectorXd(s.frac), s.label, std::nullopt});
  PeriodicSet set(lattice, std::move(motif));
  const double closest = 2.0 * packingRadius(set);
  if (closest <= kCifMinSeparation) {
    throw Error(Errc::CoincidentPoints, "expanded motif of '" + block.name + "' has points " +
                                            std::to_string(closest) + " A apart");
  }
  return {block.name, std::move(set), {}};
}

}  // namespace cia
