#pragma once

#include <map>
#include <string>
#include <vector>

namespace bifcalc::suites {

// One acceptance claim: id "C1".."C9", pass/fail, scalar metrics, and an
// optional CSV body for the suite report.
struct CheckResult {
    std::string id;
    std::string name;
    bool pass = false;
    std::vector<std::pair<std::string, double>> metrics;
    std::string csv;
};

struct SuiteOptions {
    unsigned seed = 7;
    int instances = 100;     // randomized-suite size (C7)
    int versus_models = 20;  // Galois models (C8)
    int gamma_order = 2;     // crossed-product |Gamma| (C6)
    std::vector<int> grids = {8, 16, 32};
};

CheckResult criterion1_homogeneity(const SuiteOptions& opt);
CheckResult criterion2_thresholds(const SuiteOptions& opt);
CheckResult criterion3_sobolev_bound(const SuiteOptions& opt);
CheckResult criterion4_parametrix(const SuiteOptions& opt);
CheckResult criterion5_cm(const SuiteOptions& opt);
CheckResult criterion6_triples(const SuiteOptions& opt);
CheckResult criterion7_algebra(const SuiteOptions& opt);
CheckResult criterion8_versus(const SuiteOptions& opt);
CheckResult criterion9_dixmier(const SuiteOptions& opt);

// suite name -> list of criteria it runs (names: thresholds, sobolev,
// parametrix, cm, dixmier, morita, triples, all)
std::vector<CheckResult> run_suite(const std::string& name, const SuiteOptions& opt);
bool known_suite(const std::string& name);

}  // namespace bifcalc::suites
