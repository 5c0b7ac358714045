#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstring>
#include <string>
#include <vector>

#include "freqdiff/rng.hpp"
#include "freqdiff/tensor.hpp"

// Building blocks for the hand-differentiated networks. Convention: backward
// functions accumulate (+=) into parameter gradients and overwrite activation
// gradients (dx).

namespace freqdiff {

template <typename T>
using MatR = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename T>
using VecE = Eigen::Matrix<T, Eigen::Dynamic, 1>;

template <typename T>
struct ParamStore {
    std::vector<T> data, grad;
    struct Seg {
        std::string name;
        std::size_t off, n;
    };
    std::vector<Seg> segs;

    std::size_t add(const std::string& name, std::size_t n) {
        std::size_t off = data.size();
        data.resize(off + n, T(0));
        grad.resize(off + n, T(0));
        segs.push_back({name, off, n});
        return off;
    }
    void zero_grad() { std::fill(grad.begin(), grad.end(), T(0)); }
    T* p(std::size_t off) { return data.data() + off; }
    const T* p(std::size_t off) const { return data.data() + off; }
    T* g(std::size_t off) { return grad.data() + off; }
};

template <typename T>
void fill_fan_in_uniform(T* w, std::size_t n, std::size_t fan_in, Rng& rng) {
    double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
    for (std::size_t i = 0; i < n; ++i) w[i] = static_cast<T>((rng.uniform() * 2.0 - 1.0) * bound);
}

// ---- conv 3x3, stride 1, zero padding 1 ----

template <typename T>
void im2col3(const T* x, int cin, int h, int w, T* col) {
    const std::size_t hw = static_cast<std::size_t>(h) * w;
    for (int ci = 0; ci < cin; ++ci) {
        const T* xc = x + ci * hw;
        for (int dy = -1; dy <= 1; ++dy)
            for (int dx = -1; dx <= 1; ++dx) {
                T* dst = col + (static_cast<std::size_t>(ci * 9 + (dy + 1) * 3 + (dx + 1))) * hw;
                for (int y = 0; y < h; ++y) {
                    T* row = dst + static_cast<std::size_t>(y) * w;
                    int sy = y + dy;
                    if (sy < 0 || sy >= h) {
                        std::memset(row, 0, sizeof(T) * w);
                        continue;
                    }
                    const T* src = xc + static_cast<std::size_t>(sy) * w;
                    if (dx == -1) {
                        row[0] = T(0);
                        std::memcpy(row + 1, src, sizeof(T) * (w - 1));
                    } else if (dx == 0) {
                        std::memcpy(row, src, sizeof(T) * w);
                    } else {
                        std::memcpy(row, src + 1, sizeof(T) * (w - 1));
                        row[w - 1] = T(0);
                    }
                }
            }
    }
}

template <typename T>
void col2im3(const T* col, int cin, int h, int w, T* x) {
    const std::size_t hw = static_cast<std::size_t>(h) * w;
    std::memset(x, 0, sizeof(T) * cin * hw);
    for (int ci = 0; ci < cin; ++ci) {
        T* xc = x + ci * hw;
        for (int dy = -1; dy <= 1; ++dy)
            for (int dx = -1; dx <= 1; ++dx) {
                const T* src = col + (static_cast<std::size_t>(ci * 9 + (dy + 1) * 3 + (dx + 1))) * hw;
                for (int y = 0; y < h; ++y) {
                    int sy = y + dy;
                    if (sy < 0 || sy >= h) continue;
                    const T* srow = src + static_cast<std::size_t>(y) * w;
                    T* xrow = xc + static_cast<std::size_t>(sy) * w;
                    if (dx == -1) {
                        for (int xx = 1; xx < w; ++xx) xrow[xx - 1] += srow[xx];
                    } else if (dx == 0) {
                        for (int xx = 0; xx < w; ++xx) xrow[xx] += srow[xx];
                    } else {
                        for (int xx = 0; xx + 1 < w; ++xx) xrow[xx + 1] += srow[xx];
                    }
                }
            }
    }
}

// y = W * col + b, with W (cout x cin*9) and col (cin*9 x hw).
template <typename T>
void conv3_forward(const T* W, const T* b, const T* col, int cin, int cout, int hw, T* y) {
    Eigen::Map<const MatR<T>> Wm(W, cout, cin * 9);
    Eigen::Map<const MatR<T>> cm(col, cin * 9, hw);
    Eigen::Map<MatR<T>> ym(y, cout, hw);
    ym.noalias() = Wm * cm;
    Eigen::Map<const VecE<T>> bv(b, cout);
    ym.colwise() += bv;
}

template <typename T>
void conv3_backward(const T* W, const T* col, const T* dy, int cin, int cout, int h, int w,
                    T* dW, T* db, T* dx) {
    const int hw = h * w;
    Eigen::Map<const MatR<T>> dym(dy, cout, hw);
    Eigen::Map<const MatR<T>> cm(col, cin * 9, hw);
    Eigen::Map<MatR<T>> dWm(dW, cout, cin * 9);
    dWm.noalias() += dym * cm.transpose();
    Eigen::Map<VecE<T>> dbv(db, cout);
    dbv += dym.rowwise().sum();
    if (dx) {
        Eigen::Map<const MatR<T>> Wm(W, cout, cin * 9);
        MatR<T> dcol = Wm.transpose() * dym;
        col2im3(dcol.data(), cin, h, w, dx);
    }
}

// ---- conv 1x1 ----

template <typename T>
void conv1_forward(const T* W, const T* b, const T* x, int cin, int cout, int hw, T* y) {
    Eigen::Map<const MatR<T>> Wm(W, cout, cin);
    Eigen::Map<const MatR<T>> xm(x, cin, hw);
    Eigen::Map<MatR<T>> ym(y, cout, hw);
    ym.noalias() = Wm * xm;
    Eigen::Map<const VecE<T>> bv(b, cout);
    ym.colwise() += bv;
}

template <typename T>
void conv1_backward(const T* W, const T* x, const T* dy, int cin, int cout, int hw, T* dW, T* db,
                    T* dx) {
    Eigen::Map<const MatR<T>> dym(dy, cout, hw);
    Eigen::Map<const MatR<T>> xm(x, cin, hw);
    Eigen::Map<MatR<T>> dWm(dW, cout, cin);
    dWm.noalias() += dym * xm.transpose();
    Eigen::Map<VecE<T>> dbv(db, cout);
    dbv += dym.rowwise().sum();
    if (dx) {
        Eigen::Map<const MatR<T>> Wm(W, cout, cin);
        Eigen::Map<MatR<T>> dxm(dx, cin, hw);
        dxm.noalias() = Wm.transpose() * dym;
    }
}

// ---- group norm (eps 1e-5) ----

template <typename T>
void gn_forward(const T* gamma, const T* beta, const T* x, int c, int groups, int hw, T* y,
                T* xhat, T* istd) {
    const int cpg = c / groups;
    const std::size_t m = static_cast<std::size_t>(cpg) * hw;
    for (int g = 0; g < groups; ++g) {
        const T* xg = x + static_cast<std::size_t>(g) * m;
        double mean = 0.0;
        for (std::size_t i = 0; i < m; ++i) mean += xg[i];
        mean /= static_cast<double>(m);
        double var = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            double d = xg[i] - mean;
            var += d * d;
        }
        var /= static_cast<double>(m);
        double is = 1.0 / std::sqrt(var + 1e-5);
        istd[g] = static_cast<T>(is);
        T* xh = xhat + static_cast<std::size_t>(g) * m;
        T* yg = y + static_cast<std::size_t>(g) * m;
        for (int cc = 0; cc < cpg; ++cc) {
            int ch = g * cpg + cc;
            for (int i = 0; i < hw; ++i) {
                std::size_t k = static_cast<std::size_t>(cc) * hw + i;
                T v = static_cast<T>((xg[k] - mean) * is);
                xh[k] = v;
                yg[k] = gamma[ch] * v + beta[ch];
            }
        }
    }
}

template <typename T>
void gn_backward(const T* gamma, const T* xhat, const T* istd, const T* dy, int c, int groups,
                 int hw, T* dgamma, T* dbeta, T* dx) {
    const int cpg = c / groups;
    const std::size_t m = static_cast<std::size_t>(cpg) * hw;
    for (int g = 0; g < groups; ++g) {
        const T* xh = xhat + static_cast<std::size_t>(g) * m;
        const T* dyg = dy + static_cast<std::size_t>(g) * m;
        T* dxg = dx + static_cast<std::size_t>(g) * m;
        double sum_dxh = 0.0, sum_dxh_xh = 0.0;
        for (int cc = 0; cc < cpg; ++cc) {
            int ch = g * cpg + cc;
            double dg = 0.0, db = 0.0;
            for (int i = 0; i < hw; ++i) {
                std::size_t k = static_cast<std::size_t>(cc) * hw + i;
                double d = dyg[k];
                dg += d * xh[k];
                db += d;
                double dxh = d * gamma[ch];
                sum_dxh += dxh;
                sum_dxh_xh += dxh * xh[k];
            }
            dgamma[ch] += static_cast<T>(dg);
            dbeta[ch] += static_cast<T>(db);
        }
        double mean_dxh = sum_dxh / static_cast<double>(m);
        double mean_dxh_xh = sum_dxh_xh / static_cast<double>(m);
        for (int cc = 0; cc < cpg; ++cc) {
            int ch = g * cpg + cc;
            for (int i = 0; i < hw; ++i) {
                std::size_t k = static_cast<std::size_t>(cc) * hw + i;
                double dxh = static_cast<double>(dyg[k]) * gamma[ch];
                dxg[k] = static_cast<T>(istd[g] * (dxh - mean_dxh - xh[k] * mean_dxh_xh));
            }
        }
    }
}

// ---- SiLU ----

template <typename T>
void silu_forward(const T* x, std::size_t n, T* y) {
    for (std::size_t i = 0; i < n; ++i) {
        double s = 1.0 / (1.0 + std::exp(-static_cast<double>(x[i])));
        y[i] = static_cast<T>(x[i] * s);
    }
}

template <typename T>
void silu_backward(const T* x, const T* dy, std::size_t n, T* dx) {
    for (std::size_t i = 0; i < n; ++i) {
        double s = 1.0 / (1.0 + std::exp(-static_cast<double>(x[i])));
        dx[i] = static_cast<T>(dy[i] * s * (1.0 + x[i] * (1.0 - s)));
    }
}

// ---- 2x2 average pool / nearest-neighbor upsample ----

template <typename T>
void avgpool2_forward(const T* x, int c, int h, int w, T* y) {
    const int oh = h / 2, ow = w / 2;
    for (int ci = 0; ci < c; ++ci) {
        const T* xc = x + static_cast<std::size_t>(ci) * h * w;
        T* yc = y + static_cast<std::size_t>(ci) * oh * ow;
        for (int yy = 0; yy < oh; ++yy)
            for (int xx = 0; xx < ow; ++xx) {
                const T* p = xc + (2 * yy) * w + 2 * xx;
                yc[yy * ow + xx] = static_cast<T>(0.25) * (p[0] + p[1] + p[w] + p[w + 1]);
            }
    }
}

template <typename T>
void avgpool2_backward(const T* dy, int c, int h, int w, T* dx) {
    const int oh = h / 2, ow = w / 2;
    for (int ci = 0; ci < c; ++ci) {
        const T* dyc = dy + static_cast<std::size_t>(ci) * oh * ow;
        T* dxc = dx + static_cast<std::size_t>(ci) * h * w;
        for (int yy = 0; yy < oh; ++yy)
            for (int xx = 0; xx < ow; ++xx) {
                T g = static_cast<T>(0.25) * dyc[yy * ow + xx];
                T* p = dxc + (2 * yy) * w + 2 * xx;
                p[0] = g;
                p[1] = g;
                p[w] = g;
                p[w + 1] = g;
            }
    }
}

template <typename T>
void upnearest2_forward(const T* x, int c, int h, int w, T* y) {
    const int oh = 2 * h, ow = 2 * w;
    for (int ci = 0; ci < c; ++ci) {
        const T* xc = x + static_cast<std::size_t>(ci) * h * w;
        T* yc = y + static_cast<std::size_t>(ci) * oh * ow;
        for (int yy = 0; yy < oh; ++yy)
            for (int xx = 0; xx < ow; ++xx) yc[yy * ow + xx] = xc[(yy / 2) * w + xx / 2];
    }
}

template <typename T>
void upnearest2_backward(const T* dy, int c, int h, int w, T* dx) {
    const int oh = 2 * h, ow = 2 * w;
    for (int ci = 0; ci < c; ++ci) {
        const T* dyc = dy + static_cast<std::size_t>(ci) * oh * ow;
        T* dxc = dx + static_cast<std::size_t>(ci) * h * w;
        std::memset(dxc, 0, sizeof(T) * h * w);
        for (int yy = 0; yy < oh; ++yy)
            for (int xx = 0; xx < ow; ++xx) dxc[(yy / 2) * w + xx / 2] += dyc[yy * ow + xx];
    }
}

// ---- dense ----

template <typename T>
void dense_forward(const T* W, const T* b, const T* x, int nin, int nout, T* y) {
    Eigen::Map<const MatR<T>> Wm(W, nout, nin);
    Eigen::Map<const VecE<T>> xv(x, nin);
    Eigen::Map<VecE<T>> yv(y, nout);
    yv.noalias() = Wm * xv;
    yv += Eigen::Map<const VecE<T>>(b, nout);
}

template <typename T>
void dense_backward(const T* W, const T* x, const T* dy, int nin, int nout, T* dW, T* db, T* dx) {
    Eigen::Map<const VecE<T>> dyv(dy, nout);
    Eigen::Map<const VecE<T>> xv(x, nin);
    Eigen::Map<MatR<T>> dWm(dW, nout, nin);
    dWm.noalias() += dyv * xv.transpose();
    Eigen::Map<VecE<T>> dbv(db, nout);
    dbv += dyv;
    if (dx) {
        Eigen::Map<const MatR<T>> Wm(W, nout, nin);
        Eigen::Map<VecE<T>> dxv(dx, nin);
        dxv.noalias() = Wm.transpose() * dyv;
    }
}

// ---- optimizer ----

template <typename T>
double grad_global_norm(const std::vector<T>& grad) {
    double s = 0.0;
    for (T g : grad) s += static_cast<double>(g) * static_cast<double>(g);
    return std::sqrt(s);
}

template <typename T>
double clip_grad_norm(std::vector<T>& grad, double max_norm) {
    double n = grad_global_norm(grad);
    if (n > max_norm && n > 0.0) {
        T scale = static_cast<T>(max_norm / n);
        for (T& g : grad) g *= scale;
    }
    return n;
}

template <typename T>
struct Adam {
    double lr = 2e-4, b1 = 0.9, b2 = 0.999, eps = 1e-8;
    std::vector<double> m, v;
    long long step = 0;

    void init(std::size_t n) {
        m.assign(n, 0.0);
        v.assign(n, 0.0);
        step = 0;
    }

    void update(std::vector<T>& data, const std::vector<T>& grad) {
        ++step;
        double c1 = 1.0 - std::pow(b1, static_cast<double>(step));
        double c2 = 1.0 - std::pow(b2, static_cast<double>(step));
        for (std::size_t i = 0; i < data.size(); ++i) {
            double g = grad[i];
            m[i] = b1 * m[i] + (1.0 - b1) * g;
            v[i] = b2 * v[i] + (1.0 - b2) * g * g;
            double mh = m[i] / c1, vh = v[i] / c2;
            data[i] -= static_cast<T>(lr * mh / (std::sqrt(vh) + eps));
        }
    }
};

}  // namespace freqdiff
