// Acceptance gate: one line per criterion, nonzero exit on any failure.
#include <iostream>

#include "mlg/scenarios.hpp"

int main() {
    try {
        auto results = mlg::run_acceptance("acceptance_out");
        bool all = true;
        for (auto& r : results) {
            std::cout << "criterion " << r.id << " (" << r.name << "): "
                      << (r.pass ? "PASS" : "FAIL") << "  " << r.detail << "  ["
                      << r.seconds << " s]" << std::endl;
            all = all && r.pass;
        }
        return all ? 0 : 1;
    } catch (const std::exception& e) {
        std::cerr << "acceptance suite error: " << e.what() << std::endl;
        return 2;
    }
}
