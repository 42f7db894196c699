#pragma once
// Canned verification scenarios and the full acceptance suite. Each criterion
// writes its result files under an output directory and reports pass/fail.

#include "mlg/io.hpp"

namespace mlg {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool pass = false;
    std::string detail;
    double seconds = 0.0;
};

// Criteria 1..12, result files under out_dir (created if missing).
std::vector<CriterionResult> run_criteria(const std::string& out_dir);

// Criteria 1..12 twice (out_dir/run1, out_dir/run2) plus the byte-identity
// determinism check as criterion 13.
std::vector<CriterionResult> run_acceptance(const std::string& out_dir);

// Named symbol catalog used by the CLI and the suite.
SymbolFamily catalog_symbol(const std::string& label);
std::vector<std::string> symbol_catalog_labels();

}  // namespace mlg
