// Acceptance checks: prints one PASS/FAIL line per criterion and exits
// nonzero if any criterion fails.

#include "oracles.hpp"

#include "cia/commands.hpp"
#include "cia/dataset.hpp"
#include "cia/error.hpp"
#include "cia/fixtures.hpp"
#include "cia/invariants.hpp"
#include "cia/io.hpp"
#include "cia/neighbors.hpp"
#include "cia/transport.hpp"
#include "cia/verify.hpp"

#include "json.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <numbers>
#include <sstream>
#include <string>

namespace fs = std::filesystem;
using namespace cia;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      if (!detail.empty()) detail += "; ";
      detail += what;
    }
  }
};

int failures = 0;

void criterion(int number, const std::string& name, double budgetSeconds, const std::function<Outcome()>& body) {
  const auto start = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o.pass = false;
    o.detail = std::string("exception: ") + e.what();
  }
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (budgetSeconds > 0 && seconds >= budgetSeconds) {
    o.require(false, "took " + formatNumber(seconds) + " s, budget " + formatNumber(budgetSeconds) + " s");
  }
  if (!o.pass) ++failures;
  std::printf("criterion %d %s  %s (%.3f s)%s%s\n", number, o.pass ? "PASS" : "FAIL", name.c_str(), seconds,
              o.detail.empty() ? "" : ": ", o.detail.c_str());
  std::fflush(stdout);
}

Outcome suiteOutcome(const VerifyReport& report, const std::string& suite) {
  Outcome o;
  for (const auto& s : report.suites) {
    if (s.name != suite) continue;
    o.detail = std::to_string(s.checks) + " checks, worst " + formatNumber(s.worst);
    o.require(s.failures == 0, std::to_string(s.failures) + " failures");
  }
  for (const auto& f : report.failures) o.require(false, "seed " + std::to_string(f.fixtureSeed) + ": " + f.detail);
  return o;
}

VerifyOptions onlySuite() {
  VerifyOptions v;
  v.inequalityFixtures = v.invarianceFixtures = v.continuityFixtures = v.zeroFixtures = 0;
  return v;
}

}  // namespace

int main() {
  criterion(1, "lattice invariants of the cubic lattice", 1.0, [] {
    Outcome o;
    const PeriodicSet z3(Lattice(Eigen::MatrixXd::Identity(3, 3)), {{Eigen::VectorXd::Zero(3), "X", std::nullopt}});
    const double expectedPpc = std::cbrt(3.0 / (4.0 * std::numbers::pi));
    o.require(std::abs(ppc(z3) - expectedPpc) <= 1e-12, "packing coefficient " + formatNumber(ppc(z3)));
    const auto row = pdd(z3, 18).rows;
    const auto brute = bruteForceNeighbors(z3, 18, 3).distances;
    double worst = 0;
    for (int j = 0; j < 18; ++j) {
      const double shell = j < 6 ? 1.0 : std::sqrt(2.0);
      worst = std::max({worst, std::abs(row(0, j) - shell), std::abs(brute(0, j) - shell)});
    }
    o.require(worst <= 1e-12, "shell deviation " + formatNumber(worst));
    return o;
  });

  criterion(2, "neighbour search equals the brute-force oracle on 200 random sets", 30.0, [] {
    Outcome o;
    double worst = 0;
    for (int t = 0; t < 200; ++t) {
      std::mt19937_64 rng(1000 + t);
      const int dim = 1 + t % 3;
      const int m = 1 + static_cast<int>(rng() % 8);
      const int k = 1 + static_cast<int>(rng() % 50);
      const auto s = fixtures::randomPeriodicSet(dim, m, rng);
      const auto fast = kNearestDistances(s, k);
      std::optional<NeighborTable> slow;
      for (int R = 2; !slow; R *= 2) {
        try {
          slow = bruteForceNeighbors(s, k, R);
        } catch (const cia::Error& e) {
          if (e.code() != Errc::InsufficientShellRadius || R > 256) throw;
        }
      }
      worst = std::max(worst, (fast.distances - slow->distances).cwiseAbs().maxCoeff());
    }
    o.require(worst <= 1e-10, "max deviation " + formatNumber(worst));
    if (o.pass) o.detail = "max deviation " + formatNumber(worst);
    return o;
  });

  criterion(3, "transport solver equals the permutation minimum on 100 block pairs", 10.0, [] {
    Outcome o;
    double worst = 0;
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int t = 0; t < 100; ++t) {
      std::mt19937_64 rng(2000 + t);
      const std::size_t m = 1 + t % 6;
      PdaMatrix p;
      p.rows.resize(static_cast<Eigen::Index>(2 * m), 8);
      for (Eigen::Index i = 0; i < p.rows.rows(); ++i)
        for (int j = 0; j < 8; ++j) p.rows(i, j) = u(rng);
      p.weights.assign(2 * m, 0.5 / static_cast<double>(m));
      std::vector<std::size_t> b, c;
      for (std::size_t i = 0; i < m; ++i) {
        b.push_back(i);
        c.push_back(m + i);
      }
      const Eigen::MatrixXd rb = p.rows.topRows(static_cast<Eigen::Index>(m));
      const Eigen::MatrixXd rc = p.rows.bottomRows(static_cast<Eigen::Index>(m));
      worst = std::max(worst, std::abs(emdBlocks(p, b, c, GroundMetric::Rms).cost - oracle::emd(rb, rc, oracle::rms)));
      worst = std::max(worst, std::abs(emdBlocks(p, b, c, GroundMetric::Chebyshev).cost -
                                       oracle::emd(rb, rc, oracle::chebyshev)));
    }
    o.require(worst <= 1e-9, "max deviation " + formatNumber(worst));
    if (o.pass) o.detail = "max deviation " + formatNumber(worst);
    return o;
  });

  criterion(4, "asymmetry inequalities on 100 multi-block fixtures", 0.0, [] {
    VerifyOptions v = onlySuite();
    v.inequalityFixtures = 100;
    return suiteOutcome(runVerification(v), "inequalities");
  });

  criterion(5, "invariance under rigid motions, cell changes and scaling on 100 fixtures", 0.0, [] {
    VerifyOptions v = onlySuite();
    v.invarianceFixtures = 100;
    return suiteOutcome(runVerification(v), "invariance");
  });

  criterion(6, "4 epsilon continuity bound on 20 fixtures x 3 epsilons x 100 trials", 120.0, [] {
    VerifyOptions v = onlySuite();
    v.continuityFixtures = 20;
    v.trials = 100;
    v.epsilonFractions = {0.001, 0.01, 0.1};
    return suiteOutcome(runVerification(v), "continuity");
  });

  criterion(7, "deviation from the asymptotic curve shrinks with k on the cubic lattice", 0.0, [] {
    Outcome o;
    const PeriodicSet z3(Lattice(Eigen::MatrixXd::Identity(3, 3)), {{Eigen::VectorXd::Zero(3), "X", std::nullopt}});
    const double at100 = std::abs(ada(z3, 100)[99]);
    const double at1000 = std::abs(ada(z3, 1000)[999]);
    o.detail = "k=100: " + formatNumber(at100) + ", k=1000: " + formatNumber(at1000);
    o.require(at1000 < at100, "no decrease");
    return o;
  });

  criterion(8, "CIF expansion, operator evaluation and round trip", 0.0, [] {
    Outcome o;
    const auto salt = parseCif(readFile(fs::path(CIA_TEST_DATA) / "rocksalt.cif"));
    std::map<std::string, int> counts;
    for (const auto& p : salt.set.motif()) ++counts[p.label];
    o.require(counts == std::map<std::string, int>{{"Cl", 4}, {"Na", 4}},
              "expanded to " + std::to_string(salt.set.size()) + " sites");

    const SymOp op = parseSymOp("x, y+1/2, -z");
    const Eigen::Vector3d image = wrapFractional(op.apply(Eigen::Vector3d(0.1, 0.2, 0.3)));
    o.require((image - Eigen::Vector3d(0.1, 0.7, 0.7)).norm() < 1e-12, "operator image wrong");
    o.require(parseSymOp(formatSymOp(op)) == op, "operator round trip");

    const auto glide = parseCif(readFile(fs::path(CIA_TEST_DATA) / "glide.cif"));
    o.require(glide.set.size() == 2 && (glide.set.motif()[1].frac - Eigen::Vector3d(0.1, 0.7, 0.7)).norm() < 1e-12,
              "glide expansion");

    const std::string written = writeStructureJson(salt);
    const auto back = parseStructureJson(written);
    bool same = back.set.size() == salt.set.size() && back.id == salt.id &&
                back.set.lattice().basis() == salt.set.lattice().basis();
    for (std::size_t i = 0; same && i < salt.set.size(); ++i) {
      same = back.set.motif()[i].frac == salt.set.motif()[i].frac && back.set.motif()[i].label == salt.set.motif()[i].label;
    }
    o.require(same && writeStructureJson(back) == written, "structure round trip");
    return o;
  });

  criterion(9, "sweep statistics on the bundled 50-structure synthetic dataset", 0.0, [] {
    Outcome o;
    const fs::path bundled = fs::path(CIA_SOURCE_DIR) / "data" / "synthetic50";
    const fs::path regenerated = fs::path(CIA_TEST_TMP) / "acceptance_synthetic";
    const fs::path out = fs::path(CIA_TEST_TMP) / "acceptance_sweep";
    fs::remove_all(regenerated);
    fs::remove_all(out);
    const auto info = fixtures::writeSyntheticDataset(regenerated, 2024);
    for (const auto& entry : fs::directory_iterator(regenerated)) {
      const fs::path mine = bundled / entry.path().filename();
      o.require(fs::exists(mine) && readFile(mine) == readFile(entry.path()),
                "bundled file differs: " + entry.path().filename().string());
    }

    const std::string outArg = out.string(), dirArg = bundled.string();
    const char* argv[] = {"cia", "sweep", dirArg.c_str(), "--out", outArg.c_str()};
    std::ostringstream sout, serr;
    const int code = runCli(5, argv, sout, serr);
    o.require(code == 0, "sweep exit code " + std::to_string(code) + " " + serr.str());
    if (code != 0) return o;

    const auto agg = nlohmann::json::parse(readFile(out / "aggregate.json"));
    const auto rows = parseSummaryCsv(readFile(out / "summary.csv"));
    const auto recomputed = summarize(rows);
    o.require(agg["count"] == info.count && recomputed.count == info.count, "structure count");
    o.require(agg["count_cia_positive"] == recomputed.positiveCount, "positive count differs from summary rows");
    o.require(agg["count_cia_positive"] == info.count - info.symmetricCount, "positive count differs from construction");
    o.require(std::abs(agg["percent_cia_positive"].get<double>() -
                       100.0 * static_cast<double>(info.count - info.symmetricCount) / static_cast<double>(info.count)) < 1e-9,
              "percentage");

    // energy = -100 - i and density = 1 + (i + 10 (-1)^i) / 100 over i = 0..n-1.
    const double n = static_cast<double>(info.count);
    const double sxx = n * (n * n - 1) / 12.0;
    double sxy = sxx, syy = sxx;
    double meanNoise = 0;
    for (std::size_t i = 0; i < info.count; ++i) meanNoise += (i % 2 == 0 ? 10.0 : -10.0) / n;
    for (std::size_t i = 0; i < info.count; ++i) {
      const double dx = static_cast<double>(i) - (n - 1) / 2;
      const double noise = (i % 2 == 0 ? 10.0 : -10.0) - meanNoise;
      sxy += dx * noise;
      syy += 2 * dx * noise + noise * noise;
    }
    const double expected = -sxy / std::sqrt(sxx * syy);
    const double reported = agg["pearson"]["r(energy, density)"].get<double>();
    o.require(std::abs(reported - expected) <= 1e-9,
              "r(energy, density) " + formatNumber(reported) + " vs " + formatNumber(expected));
    for (const auto& [key, value] : recomputed.correlations) {
      const auto comma = key.find(',');
      const std::string name = "r(" + key.substr(0, comma) + ", " + key.substr(comma + 1) + ")";
      o.require(std::abs(agg["pearson"][name].get<double>() - value) <= 1e-9, name + " inconsistent");
    }

    const std::string hist = readFile(out / "histogram.csv");
    const std::string zeroRow = "zero,0,0," + std::to_string(info.symmetricCount) + ",";
    o.require(hist.find(zeroRow) != std::string::npos, "zero bin does not count the symmetric structures");
    o.detail = std::to_string(info.symmetricCount) + " symmetric of " + std::to_string(info.count) +
               ", r(energy, density) = " + formatNumber(reported) + (o.detail.empty() ? "" : "; " + o.detail);
    return o;
  });

  std::printf("%d of 9 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
