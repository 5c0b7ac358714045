#include "freqdiff/fft.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>
#include <tuple>

namespace freqdiff {
namespace {

// FFTW plan creation is not thread safe; execution via fftw_execute_dft is.
// Plans are cached per (h, w, sign) and created with FFTW_UNALIGNED so they
// can run on arbitrary std::vector storage.
class PlanCache {
  public:
    fftw_plan get(int h, int w, int sign) {
        std::lock_guard<std::mutex> lock(mu_);
        auto key = std::make_tuple(h, w, sign);
        auto it = plans_.find(key);
        if (it != plans_.end()) return it->second;
        std::vector<std::complex<double>> tmp(static_cast<std::size_t>(h) * w);
        fftw_plan p = fftw_plan_dft_2d(h, w, reinterpret_cast<fftw_complex*>(tmp.data()),
                                       reinterpret_cast<fftw_complex*>(tmp.data()), sign,
                                       FFTW_ESTIMATE | FFTW_UNALIGNED);
        if (!p) throw std::runtime_error("fftw plan creation failed");
        plans_.emplace(key, p);
        return p;
    }

  private:
    std::mutex mu_;
    std::map<std::tuple<int, int, int>, fftw_plan> plans_;
};

PlanCache& cache() {
    static PlanCache c;
    return c;
}

CField transform(const CField& x, int sign) {
    if (x.h <= 0 || x.w <= 0) throw std::invalid_argument("fft2: empty field");
    fftw_plan p = cache().get(x.h, x.w, sign);
    CField out(x.h, x.w);
    CField in = x;  // fftw_execute_dft may clobber input
    fftw_execute_dft(p, reinterpret_cast<fftw_complex*>(in.v.data()),
                     reinterpret_cast<fftw_complex*>(out.v.data()));
    double scale = 1.0 / std::sqrt(static_cast<double>(x.h) * static_cast<double>(x.w));
    for (auto& z : out.v) z *= scale;
    return out;
}

}  // namespace

CField fft2(const CField& x) { return transform(x, FFTW_FORWARD); }

CField ifft2(const CField& x) { return transform(x, FFTW_BACKWARD); }

CField fft2(const Field& x) {
    CField c(x.h, x.w);
    for (std::size_t i = 0; i < x.v.size(); ++i) c.v[i] = {x.v[i], 0.0};
    return fft2(c);
}

Field ifft2_real(const CField& x) {
    CField y = ifft2(x);
    Field out(x.h, x.w);
    for (std::size_t i = 0; i < y.v.size(); ++i) out.v[i] = y.v[i].real();
    return out;
}

Field power_map(const CField& x) {
    Field out(x.h, x.w);
    for (std::size_t i = 0; i < x.v.size(); ++i) out.v[i] = std::norm(x.v[i]);
    return out;
}

}  // namespace freqdiff
