#pragma once

#include <vector>

namespace freqdiff {

struct DiffusionSchedule {
    int T = 0;
    std::vector<double> beta;       // in (0,1), linear between the endpoints
    std::vector<double> alpha;      // 1 - beta
    std::vector<double> alpha_bar;  // running product of alpha
};

DiffusionSchedule make_schedule(int T, double beta_start, double beta_end);

// Evenly strided step subsequence for fast sampling. Always contains step 0
// and step T-1; alpha_bar entries are copied verbatim from the full schedule
// so the subsequence's signal levels match the full chain exactly.
struct StridedSchedule {
    std::vector<int> steps;  // ascending
    std::vector<double> alpha_bar;
};

StridedSchedule make_strided(const DiffusionSchedule& s, int stride);

}  // namespace freqdiff
