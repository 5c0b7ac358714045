#pragma once

#include <memory>
#include <string>
#include <vector>

#include "freqdiff/layers.hpp"
#include "freqdiff/rng.hpp"
#include "freqdiff/tensor.hpp"

namespace freqdiff {

// Channel widths per resolution stage (stage i runs at input/2^i), plus the
// time-embedding width and group-norm group count.
struct ArchDescriptor {
    int in_h = 28, in_w = 28;
    std::vector<int> widths = {32, 64};
    int time_dim = 64;
    int groups = 8;
};

void validate_arch(const ArchDescriptor& a);
std::string arch_to_text(const ArchDescriptor& a);
ArchDescriptor arch_from_text(const std::string& text);
bool arch_equal(const ArchDescriptor& a, const ArchDescriptor& b);

// U-shaped conv net predicting a noise field from (x_t, t). Residual blocks
// with group norm, SiLU, and a per-block channel bias projected from a
// sinusoidal embedding of t / T. forward() is safe to call concurrently;
// forward_train()/backward() keep per-instance caches and are single-writer.
template <typename T>
class UNet {
  public:
    UNet();
    explicit UNet(const ArchDescriptor& a);
    UNet(const UNet& o);
    UNet& operator=(const UNet& o);
    UNet(UNet&& o) noexcept;
    UNet& operator=(UNet&& o) noexcept;
    ~UNet();

    void init(Rng& rng);  // fan-in uniform; output conv starts at zero

    Tensor<T> forward(const Tensor<T>& x, int t, int t_total) const;
    Tensor<T> forward_train(const Tensor<T>& x, int t, int t_total);
    void backward(const Tensor<T>& dout);  // accumulates into params().grad

    void zero_grad();
    ParamStore<T>& params();
    const ParamStore<T>& params() const;
    const ArchDescriptor& arch() const;
    std::size_t param_count() const;

  private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

extern template class UNet<float>;
extern template class UNet<double>;

}  // namespace freqdiff
