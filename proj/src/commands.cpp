#include "cia/commands.hpp"

#include "cia/asymmetry.hpp"
#include "cia/dataset.hpp"
#include "cia/error.hpp"
#include "cia/invariants.hpp"
#include "cia/io.hpp"
#include "cia/verify.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <filesystem>
#include <functional>
#include <mutex>
#include <optional>
#include <ostream>
#include <sstream>
#include <thread>

namespace cia {

namespace {

namespace fs = std::filesystem;

constexpr const char* kColumnHelp = R"(CSV columns:
  invariants (one file per structure):
    section   pdd | pda | ppc | ada
    weight    row weight for pdd/pda rows, empty otherwise
    c1..ck    distances (pdd), deviations from the asymptotic curve (pda),
              the point packing coefficient in c1 (ppc), column averages (ada)
  cia:
    id, k, G  structure id, neighbour count, number of blocks
    cia, cia_avg, center_index                 RMS ground metric
    cia_inf, cia_inf_avg, center_index_inf     Chebyshev ground metric
  sweep summary.csv:
    id, G, cia, cia_inf, cia_avg, cia_inf_avg, energy_kj_mol, density_g_cm3,
    z_prime, wall_ms (wall-clock time for one structure)
  sweep histogram.csv (bin width 0.01 Angstrom):
    bin       "zero" for values below 1e-12, else the bin index
    lo, hi    bin edges; count_cia, count_cia_inf   counts per bin
  sweep scatter.csv:
    id, density_g_cm3, energy_kj_mol, cia, cia_inf
  sweep runtime.csv:
    G, structures, mean_wall_ms
Exit codes: 0 success, 64 usage error, 65 data error, 70 internal error.)";

struct CommonFlags {
  int k = 100;
  std::string metric = "both";
  double collapseTol = 0.0;
  std::vector<std::string> keepLabels;
  bool dropHydrogens = true;
  std::string blocks;
  std::string format = "json";
  std::string out;
  bool continueOnError = false;
  unsigned threads = 0;
};

Format parseFormat(const std::string& s) { return s == "csv" ? Format::Csv : Format::Json; }

MetricSelection parseMetric(const std::string& s) {
  if (s == "rms") return MetricSelection::Rms;
  if (s == "chebyshev") return MetricSelection::Chebyshev;
  return MetricSelection::Both;
}

bool isStructureFile(const fs::path& p) {
  const std::string name = p.filename().string();
  if (name.ends_with(".blocks.json")) return false;
  const std::string ext = p.extension().string();
  return ext == ".cif" || ext == ".json";
}

std::vector<fs::path> expandInputs(const std::vector<std::string>& inputs) {
  std::vector<fs::path> files;
  for (const auto& in : inputs) {
    const fs::path p(in);
    if (fs::is_directory(p)) {
      std::vector<fs::path> found;
      for (const auto& entry : fs::directory_iterator(p)) {
        if (entry.is_regular_file() && isStructureFile(entry.path())) found.push_back(entry.path());
      }
      std::sort(found.begin(), found.end());
      files.insert(files.end(), found.begin(), found.end());
    } else {
      files.push_back(p);
    }
  }
  return files;
}

StructureRecord loadInput(const fs::path& path, const CommonFlags& flags) {
  StructureRecord record = loadStructure(path, CifOptions{flags.dropHydrogens});
  if (!flags.keepLabels.empty()) {
    record = filterLabels(record, std::set<std::string>(flags.keepLabels.begin(), flags.keepLabels.end()));
  }
  return record;
}

BlockPartition resolveBlocks(const fs::path& path, const StructureRecord& record, const CommonFlags& flags) {
  if (!flags.blocks.empty()) {
    if (flags.blocks.starts_with("auto:")) return parseBlocks(flags.blocks, record.set);
    return parseBlocks(readFile(flags.blocks), record.set);
  }
  fs::path sidecar = path;
  sidecar.replace_extension(".blocks.json");
  if (fs::exists(sidecar)) return parseBlocks(readFile(sidecar), record.set);
  if (record.set.hasBlocks()) return partitionFromBlockIds(record.set);
  throw Error(Errc::InvalidPartition,
              "no block source for " + path.string() + " (use --blocks, a .blocks.json file or point block ids)");
}

int exitCodeFor(const Error& e) { return e.code() == Errc::InternalInvariant ? kExitInternal : kExitData; }

/// Runs `task(i)` for i in [0, n) on a pool of worker threads.
void parallelFor(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& task) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(n, 1)));
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) task(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> pool;
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) task(i);
    });
  }
}

struct Outcome {
  std::string id;
  std::string text;
  std::optional<Error> error;
  std::string errorWhat;
  bool internal = false;
};

/// Reports per-file failures in input order; returns the exit code.
int finish(const std::vector<fs::path>& files, const std::vector<Outcome>& outcomes, const CommonFlags& flags,
           std::ostream& err) {
  int code = kExitOk;
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    if (outcomes[i].errorWhat.empty()) continue;
    err << files[i].string() << ": " << outcomes[i].errorWhat << "\n";
    const int c = outcomes[i].internal ? kExitInternal : kExitData;
    code = std::max(code, c);
    if (!flags.continueOnError) break;
  }
  return code;
}

template <typename Fn>
std::vector<Outcome> processAll(const std::vector<fs::path>& files, const CommonFlags& flags, Fn&& fn) {
  std::vector<Outcome> outcomes(files.size());
  std::atomic<bool> stop{false};
  parallelFor(files.size(), flags.threads, [&](std::size_t i) {
    if (stop && !flags.continueOnError) return;
    try {
      outcomes[i] = fn(files[i]);
    } catch (const Error& e) {
      outcomes[i].errorWhat = e.what();
      outcomes[i].internal = e.code() == Errc::InternalInvariant;
      stop = true;
    } catch (const std::exception& e) {
      outcomes[i].errorWhat = e.what();
      outcomes[i].internal = true;
      stop = true;
    }
  });
  return outcomes;
}

void emit(const std::vector<Outcome>& outcomes, const CommonFlags& flags, std::ostream& out, bool csvSharedHeader) {
  const Format format = parseFormat(flags.format);
  const std::string ext = format == Format::Csv ? ".csv" : ".json";
  if (!flags.out.empty()) fs::create_directories(flags.out);
  bool headerDone = false;
  for (const auto& o : outcomes) {
    if (!o.errorWhat.empty() || o.id.empty()) continue;
    if (!flags.out.empty()) {
      writeFile(fs::path(flags.out) / (o.id + ext), o.text);
    } else if (csvSharedHeader && format == Format::Csv) {
      std::string_view text = o.text;
      if (headerDone) text.remove_prefix(text.find('\n') + 1);
      out << text;
      headerDone = true;
    } else {
      out << o.text;
    }
  }
}

std::string invariantsCsv(const PddMatrix& pddM, const PdaMatrix& pdaM, double packing, const Eigen::VectorXd& adaV) {
  std::string text = "section,weight";
  for (int j = 1; j <= pddM.k(); ++j) text += ",c" + std::to_string(j);
  text += "\n";
  auto rows = [&](const char* section, const std::vector<double>& weights, const Eigen::MatrixXd& m) {
    for (std::size_t i = 0; i < weights.size(); ++i) {
      text += std::string(section) + "," + formatNumber(weights[i]);
      for (Eigen::Index j = 0; j < m.cols(); ++j) text += "," + formatNumber(m(static_cast<Eigen::Index>(i), j));
      text += "\n";
    }
  };
  rows("pdd", pddM.weights, pddM.rows);
  rows("pda", pdaM.weights, pdaM.rows);
  text += "ppc," + std::string() + "," + formatNumber(packing) + "\n";
  text += "ada,";
  for (Eigen::Index j = 0; j < adaV.size(); ++j) text += "," + formatNumber(adaV[j]);
  text += "\n";
  return text;
}

int cmdInvariants(const std::vector<std::string>& inputs, const CommonFlags& flags, std::ostream& out,
                  std::ostream& err) {
  const auto files = expandInputs(inputs);
  const Format format = parseFormat(flags.format);
  const auto outcomes = processAll(files, flags, [&](const fs::path& path) {
    const StructureRecord record = loadInput(path, flags);
    const std::optional<double> tol = flags.collapseTol;
    const PddMatrix pddM = pdd(record.set, flags.k, tol);
    const double packing = ppc(record.set);
    const PdaMatrix pdaM = pdaFromPdd(pddM, packing, record.set.dim());
    const Eigen::VectorXd adaV = ada(record.set, flags.k);
    Outcome o;
    o.id = record.id;
    if (format == Format::Csv) {
      o.text = invariantsCsv(pddM, pdaM, packing, adaV);
    } else {
      nlohmann::ordered_json doc;
      doc["id"] = record.id;
      doc["k"] = flags.k;
      doc["ppc"] = round12(packing);
      doc["pdd"] = nlohmann::ordered_json::parse(writeReport(pddM, Format::Json));
      doc["pda"] = nlohmann::ordered_json::parse(writeReport(pdaM, Format::Json));
      doc["ada"] = nlohmann::ordered_json::parse(writeReport(adaV, Format::Json))["ada"];
      o.text = doc.dump(2) + "\n";
    }
    return o;
  });
  emit(outcomes, flags, out, false);
  return finish(files, outcomes, flags, err);
}

int cmdCia(const std::vector<std::string>& inputs, const CommonFlags& flags, std::ostream& out, std::ostream& err) {
  const auto files = expandInputs(inputs);
  const Format format = parseFormat(flags.format);
  const auto outcomes = processAll(files, flags, [&](const fs::path& path) {
    const StructureRecord record = loadInput(path, flags);
    const BlockPartition partition = resolveBlocks(path, record, flags);
    const CiaReport report = cia(record.set, partition, CiaOptions{flags.k, true});
    return Outcome{record.id, writeReport(report, format, record.id, parseMetric(flags.metric)), {}, {}, false};
  });
  emit(outcomes, flags, out, true);
  return finish(files, outcomes, flags, err);
}

int cmdSweep(const std::string& dir, std::string metadataPath, CommonFlags flags, std::ostream& out,
             std::ostream& err) {
  if (!fs::is_directory(dir)) throw Error(Errc::ParseError, "not a directory: " + dir);
  const auto files = expandInputs({dir});
  if (metadataPath.empty() && fs::exists(fs::path(dir) / "metadata.csv")) {
    metadataPath = (fs::path(dir) / "metadata.csv").string();
  }
  MetadataTable metadata;
  if (!metadataPath.empty()) {
    metadata = parseMetadataCsv(readFile(metadataPath));
    if (!metadata.hasEnergy) err << "warning: metadata has no energy_kj_mol column\n";
    if (!metadata.hasDensity) err << "warning: metadata has no density_g_cm3 column\n";
    if (!metadata.hasZPrime) err << "warning: metadata has no z_prime column\n";
  } else {
    err << "warning: no metadata; correlations with energy and density are omitted\n";
  }

  std::vector<std::optional<StructureSummary>> rows(files.size());
  std::vector<CiaReport> reports(files.size());
  const auto outcomes = processAll(files, flags, [&](const fs::path& path) {
    const auto start = std::chrono::steady_clock::now();
    const StructureRecord record = loadInput(path, flags);
    const BlockPartition partition = resolveBlocks(path, record, flags);
    const CiaReport report = cia(record.set, partition, CiaOptions{flags.k, true});
    const auto stop = std::chrono::steady_clock::now();
    StructureSummary row;
    row.id = record.id;
    row.G = report.blockCount();
    row.cia = report.cia;
    row.ciaInf = report.ciaInf;
    row.ciaAvg = report.ciaAvg;
    row.ciaInfAvg = report.ciaInfAvg;
    StructureMetadata meta = record.metadata;
    if (auto it = metadata.rows.find(record.id); it != metadata.rows.end()) meta = it->second;
    row.energy = meta.energy;
    row.density = meta.density;
    row.zPrime = meta.zPrime;
    row.wallMs = std::chrono::duration<double, std::milli>(stop - start).count();
    const std::size_t index = static_cast<std::size_t>(&path - files.data());
    rows[index] = std::move(row);
    return Outcome{record.id, writeReport(report, Format::Json, record.id), {}, {}, false};
  });
  const int code = finish(files, outcomes, flags, err);
  if (code != kExitOk && !flags.continueOnError) return code;

  std::vector<StructureSummary> kept;
  for (auto& r : rows) {
    if (r) kept.push_back(std::move(*r));
  }
  if (!metadataPath.empty()) {
    for (auto& r : kept) {
      if (!metadata.hasEnergy) r.energy.reset();
      if (!metadata.hasDensity) r.density.reset();
      if (!metadata.hasZPrime) r.zPrime.reset();
    }
  }
  const DatasetSummary summary = summarize(std::move(kept));
  const fs::path outDir = flags.out.empty() ? fs::path("sweep") : fs::path(flags.out);
  fs::create_directories(outDir / "reports");
  for (const auto& o : outcomes) {
    if (o.errorWhat.empty() && !o.id.empty()) writeFile(outDir / "reports" / (o.id + ".json"), o.text);
  }
  writeFile(outDir / "summary.csv", summaryCsv(summary));
  writeFile(outDir / "histogram.csv", histogramCsv(summary));
  writeFile(outDir / "scatter.csv", scatterCsv(summary));
  writeFile(outDir / "aggregate.json", aggregateJson(summary));
  writeFile(outDir / "runtime.csv", runtimeCsv(summary));
  out << aggregateJson(summary);
  return code;
}

int cmdVerify(const VerifyOptions& options, const std::string& outPath, std::ostream& out) {
  const VerifyReport report = runVerification(options);
  const std::string json = verifyReportJson(report);
  if (outPath.empty()) {
    out << json;
  } else {
    writeFile(outPath, json);
  }
  return report.allPass() ? kExitOk : kExitInternal;
}

}  // namespace

int runCli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Isometry invariants and asymmetry measures of periodic point sets"};
  app.footer(kColumnHelp);
  app.require_subcommand(1);

  CommonFlags flags;
  std::vector<std::string> inputs;
  auto addShared = [&](CLI::App* sub, bool blocks) {
    sub->add_option("--k", flags.k, "Number of neighbours per point")->check(CLI::PositiveNumber);
    sub->add_flag("--drop-hydrogens,!--keep-hydrogens", flags.dropHydrogens,
                  "Remove H and D atoms (default on)");
    sub->add_option("--keep-labels", flags.keepLabels, "Keep only these atom labels (comma separated)")
        ->delimiter(',');
    sub->add_option("--threads", flags.threads, "Worker threads (0 = all cores, 1 = serial timing)");
    sub->add_flag("--continue-on-error", flags.continueOnError, "Keep going after a file fails");
    if (blocks) sub->add_option("--blocks", flags.blocks, "Block file (JSON) or auto:<cutoff>");
  };

  auto* inv = app.add_subcommand("invariants", "PDD, PDA, PPC and ADA per structure");
  addShared(inv, false);
  inv->add_option("inputs", inputs, "CIF or JSON files, or directories")->required();
  inv->add_option("--collapse-tol", flags.collapseTol, "Merge PDD rows within this Chebyshev distance")
      ->check(CLI::NonNegativeNumber);
  inv->add_option("--format", flags.format)->check(CLI::IsMember({"json", "csv"}));
  inv->add_option("--out", flags.out, "Output directory (default: standard output)");

  auto* ciaCmd = app.add_subcommand("cia", "Asymmetry report per structure");
  addShared(ciaCmd, true);
  ciaCmd->add_option("inputs", inputs, "CIF or JSON files, or directories")->required();
  ciaCmd->add_option("--metric", flags.metric)->check(CLI::IsMember({"rms", "chebyshev", "both"}));
  ciaCmd->add_option("--format", flags.format)->check(CLI::IsMember({"json", "csv"}));
  ciaCmd->add_option("--out", flags.out, "Output directory (default: standard output)");

  std::string datasetDir, metadataPath;
  auto* sweep = app.add_subcommand("sweep", "Asymmetry statistics over a dataset directory");
  addShared(sweep, true);
  sweep->add_option("dataset", datasetDir, "Directory of CIF or JSON structures")->required();
  sweep->add_option("--metadata", metadataPath, "CSV: id,energy_kj_mol,density_g_cm3,z_prime");
  sweep->add_option("--out", flags.out, "Output directory (default: ./sweep)");

  VerifyOptions verifyOptions;
  std::vector<double> epsilonFractions;
  std::string verifyOut;
  auto* verify = app.add_subcommand("verify", "Run the invariance, inequality and continuity checks");
  verify->add_option("--seed", verifyOptions.seed, "Master seed");
  verify->add_option("--k", verifyOptions.k)->check(CLI::PositiveNumber);
  verify->add_option("--trials", verifyOptions.trials, "Perturbation trials per fixture and epsilon")
      ->check(CLI::NonNegativeNumber);
  verify->add_option("--epsilon-frac", epsilonFractions, "Epsilon as fractions of the packing radius")
      ->delimiter(',')
      ->check(CLI::Range(0.0, 1.0));
  verify->add_option("--out", verifyOut, "Report file (default: standard output)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*inv) return cmdInvariants(inputs, flags, out, err);
    if (*ciaCmd) return cmdCia(inputs, flags, out, err);
    if (*sweep) return cmdSweep(datasetDir, metadataPath, flags, out, err);
    if (*verify) {
      if (!epsilonFractions.empty()) verifyOptions.epsilonFractions = epsilonFractions;
      for (double f : verifyOptions.epsilonFractions) {
        if (!(f < 1.0)) {
          err << "--epsilon-frac must be below 1\n";
          return kExitUsage;
        }
      }
      return cmdVerify(verifyOptions, verifyOut, out);
    }
  } catch (const Error& e) {
    err << e.what() << "\n";
    return exitCodeFor(e);
  } catch (const std::exception& e) {
    err << e.what() << "\n";
    return kExitInternal;
  }
  return kExitUsage;
}

}  // namespace cia
