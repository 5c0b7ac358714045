#include "freqdiff/schedule.hpp"

#include <algorithm>
#include <stdexcept>

namespace freqdiff {

DiffusionSchedule make_schedule(int T, double beta_start, double beta_end) {
    if (T < 2) throw std::invalid_argument("make_schedule: T must be at least 2");
    if (!(beta_start > 0.0) || !(beta_start <= beta_end) || !(beta_end < 1.0))
        throw std::invalid_argument("make_schedule: need 0 < beta_start <= beta_end < 1");
    DiffusionSchedule s;
    s.T = T;
    s.beta.resize(T);
    s.alpha.resize(T);
    s.alpha_bar.resize(T);
    double prod = 1.0;
    for (int t = 0; t < T; ++t) {
        s.beta[t] = beta_start + (beta_end - beta_start) * t / (T - 1);
        s.alpha[t] = 1.0 - s.beta[t];
        prod *= s.alpha[t];
        s.alpha_bar[t] = prod;
    }
    return s;
}

StridedSchedule make_strided(const DiffusionSchedule& s, int stride) {
    if (stride < 1) throw std::invalid_argument("make_strided: stride must be >= 1");
    if (s.T < 2) throw std::invalid_argument("make_strided: empty schedule");
    StridedSchedule out;
    for (int t = s.T - 1; t >= 0; t -= stride) out.steps.push_back(t);
    if (out.steps.back() != 0) out.steps.push_back(0);
    std::reverse(out.steps.begin(), out.steps.end());
    out.alpha_bar.reserve(out.steps.size());
    for (int t : out.steps) out.alpha_bar.push_back(s.alpha_bar[t]);
    return out;
}

}  // namespace freqdiff
