#include "cia/verify.hpp"

#include "cia/error.hpp"
#include "cia/io.hpp"
#include "cia/neighbors.hpp"

#include "json.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>

namespace cia {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::array<double, 4> values(const CiaReport& r) { return {r.cia, r.ciaInf, r.ciaAvg, r.ciaInfAvg}; }

constexpr std::array<const char*, 4> kValueNames{"cia", "cia_inf", "cia_avg", "cia_inf_avg"};

class SuiteRunner {
 public:
  SuiteRunner(VerifyReport& report, std::string name) : report_(report) {
    report_.suites.push_back({std::move(name), 0, 0, 0.0});
  }

  /// Runs one check; exceptions count as failures.
  void check(std::uint64_t seed, const std::function<std::pair<bool, std::string>(double&)>& body) {
    SuiteResult& suite = report_.suites.back();
    ++suite.checks;
    double worst = 0.0;
    std::pair<bool, std::string> outcome;
    try {
      outcome = body(worst);
    } catch (const std::exception& e) {
      outcome = {false, std::string("exception: ") + e.what()};
    }
    suite.worst = std::max(suite.worst, worst);
    if (!outcome.first) {
      ++suite.failures;
      report_.failures.push_back({suite.name, seed, outcome.second});
    }
  }

 private:
  VerifyReport& report_;
};

std::pair<bool, std::string> compareReports(const CiaReport& a, const CiaReport& b, double tol,
                                            const std::string& what, double& worst) {
  const auto va = values(a), vb = values(b);
  for (std::size_t i = 0; i < va.size(); ++i) {
    const double diff = std::abs(va[i] - vb[i]);
    worst = std::max(worst, diff);
    if (!(diff <= tol)) {
      return {false, what + ": " + kValueNames[i] + " changed by " + formatNumber(diff)};
    }
  }
  return {true, {}};
}

}  // namespace

std::uint64_t fixtureSeed(std::uint64_t seed, std::uint64_t suite, std::uint64_t index) {
  return splitmix64(splitmix64(seed) ^ splitmix64((suite << 32) | index));
}

fixtures::BlockFixture verifyFixture(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const int dim = std::uniform_int_distribution<int>(2, 3)(rng);
  const int G = std::uniform_int_distribution<int>(2, 4)(rng);
  const int blockSize = std::uniform_int_distribution<int>(2, 4)(rng);
  return fixtures::randomBlockFixture(dim, G, blockSize, rng);
}

fixtures::BlockFixture continuityFixture(std::uint64_t seed, int index) {
  static constexpr std::array<double, 3> kJumps{0.0, 0.05, 0.3};
  if (index < static_cast<int>(kJumps.size())) return fixtures::cellJumpFixture(kJumps[index]);
  return verifyFixture(seed);
}

VerifyReport runVerification(const VerifyOptions& options) {
  VerifyReport report;
  report.seed = options.seed;
  const CiaOptions ciaOptions{options.k, true};
  const double tol = options.tolerance;

  {
    SuiteRunner suite(report, "inequalities");
    for (int f = 0; f < options.inequalityFixtures; ++f) {
      const auto fs = fixtureSeed(options.seed, 1, f);
      suite.check(fs, [&](double& worst) -> std::pair<bool, std::string> {
        const auto fx = verifyFixture(fs);
        const CiaReport r = cia(fx.set, fx.partition, ciaOptions);
        const std::array<double, 4> slack{r.cia - r.ciaInf, r.ciaAvg - r.ciaInfAvg, r.cia - r.ciaAvg,
                                          r.ciaAvg - 2 * r.cia};
        static constexpr std::array<const char*, 4> names{"cia <= cia_inf", "cia_avg <= cia_inf_avg",
                                                          "cia <= cia_avg", "cia_avg <= 2 cia"};
        for (std::size_t i = 0; i < slack.size(); ++i) {
          worst = std::max(worst, slack[i]);
          if (slack[i] > tol) return {false, std::string(names[i]) + " violated by " + formatNumber(slack[i])};
        }
        return {true, {}};
      });
    }
  }

  {
    SuiteRunner suite(report, "invariance");
    for (int f = 0; f < options.invarianceFixtures; ++f) {
      const auto fs = fixtureSeed(options.seed, 2, f);
      suite.check(fs, [&](double& worst) -> std::pair<bool, std::string> {
        const auto fx = verifyFixture(fs);
        std::mt19937_64 rng(splitmix64(fs));
        const int dim = fx.set.dim();
        const CiaReport base = cia(fx.set, fx.partition, ciaOptions);

        std::uniform_real_distribution<double> shift(-5.0, 5.0);
        Eigen::VectorXd t(dim);
        for (int a = 0; a < dim; ++a) t[a] = shift(rng);
        const auto moved = applyRigidMotion(fx.set, fixtures::randomRotation(dim, rng), t);
        auto result = compareReports(base, cia(moved, fx.partition, ciaOptions), tol, "rigid motion", worst);
        if (!result.first) return result;

        const auto changed = transformCell(fx.set, fixtures::randomUnimodular(dim, rng));
        result = compareReports(base, cia(changed, fx.partition, ciaOptions), tol, "cell change", worst);
        if (!result.first) return result;

        for (int c : {2, 3}) {
          const int axis = std::uniform_int_distribution<int>(0, dim - 1)(rng);
          const auto scaled = scaleCell(fx.set, c, axis);
          const auto part = scalePartition(fx.partition, fx.set.size(), c);
          result = compareReports(base, cia(scaled, part, ciaOptions), tol,
                                  "scaling by " + std::to_string(c) + " along axis " + std::to_string(axis), worst);
          if (!result.first) return result;
        }
        return {true, {}};
      });
    }
  }

  {
    SuiteRunner suite(report, "continuity");
    for (int f = 0; f < options.continuityFixtures; ++f) {
      const auto fs = fixtureSeed(options.seed, 3, f);
      for (double frac : options.epsilonFractions) {
        suite.check(fs, [&](double& worst) -> std::pair<bool, std::string> {
          const auto fx = continuityFixture(fs, f);
          const double eps = frac * packingRadius(fx.set);
          const auto trials = perturbationHarness(fx.set, fx.partition, eps, options.trials, fs, ciaOptions);
          for (std::size_t t = 0; t < trials.size(); ++t) {
            const auto& tr = trials[t];
            const double delta = std::max({tr.deltaCia, tr.deltaCiaInf, tr.deltaCiaAvg, tr.deltaCiaInfAvg});
            if (tr.bound > 0) worst = std::max(worst, delta / tr.bound);
            if (!tr.pass) {
              return {false, "epsilon fraction " + formatNumber(frac) + ", trial " + std::to_string(t) +
                                 ": change " + formatNumber(delta) + " exceeds " + formatNumber(tr.bound)};
            }
          }
          return {true, {}};
        });
      }
    }
  }

  {
    SuiteRunner suite(report, "zero");
    for (int f = 0; f < options.zeroFixtures; ++f) {
      const auto fs = fixtureSeed(options.seed, 4, f);
      suite.check(fs, [&](double& worst) -> std::pair<bool, std::string> {
        std::mt19937_64 rng(fs);
        const int dim = std::uniform_int_distribution<int>(2, 3)(rng);
        const int G = std::uniform_int_distribution<int>(1, 4)(rng);
        const int blockSize = std::uniform_int_distribution<int>(2, 4)(rng);
        const auto fx = fixtures::symmetricBlockFixture(dim, G, blockSize, rng);
        const auto v = values(cia(fx.set, fx.partition, ciaOptions));
        for (std::size_t i = 0; i < v.size(); ++i) {
          worst = std::max(worst, std::abs(v[i]));
          if (!(std::abs(v[i]) <= tol)) return {false, std::string(kValueNames[i]) + " = " + formatNumber(v[i])};
        }
        return {true, {}};
      });
    }
  }

  {
    SuiteRunner suite(report, "cell_jump");
    const auto fs = fixtureSeed(options.seed, 5, 0);
    suite.check(fs, [&](double& worst) -> std::pair<bool, std::string> {
      // The asymmetry must vanish at zero displacement and grow continuously
      // (bounded by 4x the displacement) as the primitive cell jumps.
      const auto zero = values(cia(fixtures::cellJumpFixture(0.0).set, fixtures::cellJumpFixture(0.0).partition,
                                   ciaOptions));
      for (double v : zero) {
        worst = std::max(worst, std::abs(v));
        if (!(std::abs(v) <= tol)) return {false, "nonzero asymmetry at zero displacement: " + formatNumber(v)};
      }
      for (double d : {1e-4, 1e-3, 1e-2, 1e-1}) {
        const auto fx = fixtures::cellJumpFixture(d);
        const auto v = values(cia(fx.set, fx.partition, ciaOptions));
        for (std::size_t i = 0; i < v.size(); ++i) {
          if (!(v[i] > 0.0) || v[i] > 4 * d + tol) {
            return {false, "displacement " + formatNumber(d) + ": " + kValueNames[i] + " = " + formatNumber(v[i])};
          }
        }
      }
      return {true, {}};
    });
  }

  return report;
}

std::string verifyReportJson(const VerifyReport& report) {
  nlohmann::ordered_json doc;
  doc["seed"] = report.seed;
  doc["pass"] = report.allPass();
  nlohmann::ordered_json suites = nlohmann::ordered_json::array();
  for (const auto& s : report.suites) {
    suites.push_back({{"suite", s.name},
                      {"checks", s.checks},
                      {"failures", s.failures},
                      {"pass", s.failures == 0},
                      {"worst", round12(s.worst)}});
  }
  doc["suites"] = suites;
  nlohmann::ordered_json failures = nlohmann::ordered_json::array();
  for (const auto& f : report.failures) {
    failures.push_back({{"suite", f.suite}, {"fixture_seed", f.fixtureSeed}, {"detail", f.detail}});
  }
  doc["failures"] = failures;
  return doc.dump(2) + "\n";
}

}  // namespace cia
