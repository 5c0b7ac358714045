#include "freqdiff/unet.hpp"

#include <cmath>
#include <map>
#include <sstream>
#include <stdexcept>

namespace freqdiff {

namespace {

std::vector<int> gn_channel_counts(const ArchDescriptor& a) {
    int d = static_cast<int>(a.widths.size());
    std::vector<int> cs;
    cs.push_back(a.widths[0]);  // enc0 input
    for (int i = 1; i < d; ++i) cs.push_back(a.widths[i - 1]);
    for (int w : a.widths) cs.push_back(w);  // block outputs
    cs.push_back(2 * a.widths[d - 1]);       // first decoder concat
    for (int i = d - 2; i >= 0; --i) cs.push_back(a.widths[i + 1] + a.widths[i]);
    return cs;
}

}  // namespace

void validate_arch(const ArchDescriptor& a) {
    int d = static_cast<int>(a.widths.size());
    if (d < 1) throw std::invalid_argument("arch: at least one stage required");
    for (int w : a.widths)
        if (w < 1) throw std::invalid_argument("arch: zero-width stage");
    int div = 1 << d;
    if (a.in_h < 2 * div || a.in_w < 2 * div || a.in_h % div != 0 || a.in_w % div != 0)
        throw std::invalid_argument("arch: input size must be a multiple of 2^stages");
    if (a.time_dim < 2 || a.time_dim % 2 != 0)
        throw std::invalid_argument("arch: time_dim must be even and >= 2");
    if (a.groups < 1) throw std::invalid_argument("arch: groups must be positive");
    for (int c : gn_channel_counts(a))
        if (c % a.groups != 0)
            throw std::invalid_argument("arch: group count must divide every normed width");
}

std::string arch_to_text(const ArchDescriptor& a) {
    std::ostringstream s;
    s << "in_h=" << a.in_h << "\nin_w=" << a.in_w << "\nwidths=";
    for (std::size_t i = 0; i < a.widths.size(); ++i) s << (i ? "," : "") << a.widths[i];
    s << "\ntime_dim=" << a.time_dim << "\ngroups=" << a.groups << "\n";
    return s.str();
}

ArchDescriptor arch_from_text(const std::string& text) {
    std::map<std::string, std::string> kv;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos) throw std::invalid_argument("arch text: bad line: " + line);
        kv[line.substr(0, eq)] = line.substr(eq + 1);
    }
    auto geti = [&](const char* k) {
        auto it = kv.find(k);
        if (it == kv.end()) throw std::invalid_argument(std::string("arch text: missing ") + k);
        return std::stoi(it->second);
    };
    ArchDescriptor a;
    a.in_h = geti("in_h");
    a.in_w = geti("in_w");
    a.time_dim = geti("time_dim");
    a.groups = geti("groups");
    a.widths.clear();
    std::istringstream ws(kv["widths"]);
    std::string tok;
    while (std::getline(ws, tok, ',')) a.widths.push_back(std::stoi(tok));
    validate_arch(a);
    return a;
}

bool arch_equal(const ArchDescriptor& a, const ArchDescriptor& b) {
    return a.in_h == b.in_h && a.in_w == b.in_w && a.widths == b.widths &&
           a.time_dim == b.time_dim && a.groups == b.groups;
}

namespace {

struct ConvP {
    int cin = 0, cout = 0, k = 3;
    std::size_t w_off = 0, b_off = 0;
};

struct GnP {
    int c = 0;
    std::size_t g_off = 0, b_off = 0;
};

struct DenseP {
    int nin = 0, nout = 0;
    std::size_t w_off = 0, b_off = 0;
};

struct ResBlockP {
    int cin = 0, cout = 0;
    GnP gn1, gn2;
    ConvP conv1, conv2, skip;  // skip only when cin != cout
    DenseP proj;               // time embedding -> per-channel bias
    bool has_skip = false;
};

template <typename T>
struct ResCache {
    Tensor<T> x, gn1_y, gn1_xhat, s1, h1, gn2_y, gn2_xhat, s2;
    std::vector<T> istd1, istd2, col1, col2;
};

template <typename T>
struct Cache {
    std::vector<T> emb0, e1, a1, temb;  // time path
    std::vector<T> demb_accum;
    Tensor<T> x_in, stem_out;
    std::vector<T> stem_col;
    std::vector<ResCache<T>> enc, dec;
    ResCache<T> mid;
    std::vector<Tensor<T>> skips, pooled, upped, cat;
    Tensor<T> head_gn_y, head_gn_xhat, head_silu;
    std::vector<T> head_istd, head_col;
    bool valid = false;
};

template <typename T>
void time_embed_base(double s, int dim, T* out) {
    int half = dim / 2;
    for (int j = 0; j < half; ++j) {
        double freq = half > 1 ? std::exp(std::log(1000.0) * j / (half - 1)) : 1.0;
        out[j] = static_cast<T>(std::sin(s * freq));
        out[half + j] = static_cast<T>(std::cos(s * freq));
    }
}

}  // namespace

template <typename T>
struct UNet<T>::Impl {
    ArchDescriptor arch;
    ParamStore<T> ps;
    int depth = 0;

    ConvP stem, head_conv;
    GnP head_gn;
    DenseP mlp1, mlp2;
    std::vector<ResBlockP> enc, dec;
    ResBlockP mid;

    Cache<T> cache;

    explicit Impl(const ArchDescriptor& a) : arch(a) {
        validate_arch(a);
        depth = static_cast<int>(a.widths.size());
        int td = a.time_dim;
        mlp1 = add_dense("time.mlp1", td, td);
        mlp2 = add_dense("time.mlp2", td, td);
        stem = add_conv("stem", 1, a.widths[0], 3);
        for (int i = 0; i < depth; ++i) {
            int cin = i == 0 ? a.widths[0] : a.widths[i - 1];
            enc.push_back(add_res("enc" + std::to_string(i), cin, a.widths[i]));
        }
        mid = add_res("mid", a.widths[depth - 1], a.widths[depth - 1]);
        dec.resize(depth);
        for (int i = depth - 1; i >= 0; --i) {
            int above = (i == depth - 1) ? a.widths[depth - 1] : a.widths[i + 1];
            dec[i] = add_res("dec" + std::to_string(i), above + a.widths[i], a.widths[i]);
        }
        head_gn = add_gn("head.norm", a.widths[0]);
        head_conv = add_conv("head.conv", a.widths[0], 1, 3);
    }

    ConvP add_conv(const std::string& name, int cin, int cout, int k) {
        ConvP c;
        c.cin = cin;
        c.cout = cout;
        c.k = k;
        c.w_off = ps.add(name + ".w", static_cast<std::size_t>(cout) * cin * k * k);
        c.b_off = ps.add(name + ".b", cout);
        return c;
    }

    GnP add_gn(const std::string& name, int c) {
        GnP g;
        g.c = c;
        g.g_off = ps.add(name + ".gamma", c);
        g.b_off = ps.add(name + ".beta", c);
        return g;
    }

    DenseP add_dense(const std::string& name, int nin, int nout) {
        DenseP d;
        d.nin = nin;
        d.nout = nout;
        d.w_off = ps.add(name + ".w", static_cast<std::size_t>(nout) * nin);
        d.b_off = ps.add(name + ".b", nout);
        return d;
    }

    ResBlockP add_res(const std::string& name, int cin, int cout) {
        ResBlockP r;
        r.cin = cin;
        r.cout = cout;
        r.gn1 = add_gn(name + ".norm1", cin);
        r.conv1 = add_conv(name + ".conv1", cin, cout, 3);
        r.proj = add_dense(name + ".time", arch.time_dim, cout);
        r.gn2 = add_gn(name + ".norm2", cout);
        r.conv2 = add_conv(name + ".conv2", cout, cout, 3);
        if (cin != cout) {
            r.skip = add_conv(name + ".skip", cin, cout, 1);
            r.has_skip = true;
        }
        return r;
    }

    void init_conv(const ConvP& c, Rng& rng, bool zero) {
        std::size_t n = static_cast<std::size_t>(c.cout) * c.cin * c.k * c.k;
        if (zero)
            std::fill(ps.p(c.w_off), ps.p(c.w_off) + n, T(0));
        else
            fill_fan_in_uniform(ps.p(c.w_off), n, static_cast<std::size_t>(c.cin) * c.k * c.k, rng);
        std::fill(ps.p(c.b_off), ps.p(c.b_off) + c.cout, T(0));
    }

    void init_gn(const GnP& g) {
        std::fill(ps.p(g.g_off), ps.p(g.g_off) + g.c, T(1));
        std::fill(ps.p(g.b_off), ps.p(g.b_off) + g.c, T(0));
    }

    void init_dense(const DenseP& d, Rng& rng) {
        fill_fan_in_uniform(ps.p(d.w_off), static_cast<std::size_t>(d.nout) * d.nin,
                            static_cast<std::size_t>(d.nin), rng);
        std::fill(ps.p(d.b_off), ps.p(d.b_off) + d.nout, T(0));
    }

    void init_res(const ResBlockP& r, Rng& rng) {
        init_gn(r.gn1);
        init_conv(r.conv1, rng, false);
        init_dense(r.proj, rng);
        init_gn(r.gn2);
        init_conv(r.conv2, rng, false);
        if (r.has_skip) init_conv(r.skip, rng, false);
    }

    void init(Rng& rng) {
        init_dense(mlp1, rng);
        init_dense(mlp2, rng);
        init_conv(stem, rng, false);
        for (auto& r : enc) init_res(r, rng);
        init_res(mid, rng);
        for (int i = depth - 1; i >= 0; --i) init_res(dec[i], rng);
        init_gn(head_gn);
        init_conv(head_conv, rng, true);
    }

    Tensor<T> res_forward(const ResBlockP& r, const Tensor<T>& x, const std::vector<T>& temb,
                          ResCache<T>& c) const {
        const int h = x.h, w = x.w, hw = h * w;
        c.x = x;
        c.gn1_y = Tensor<T>(r.cin, h, w);
        c.gn1_xhat = Tensor<T>(r.cin, h, w);
        c.istd1.resize(arch.groups);
        gn_forward(ps.p(r.gn1.g_off), ps.p(r.gn1.b_off), x.v.data(), r.cin, arch.groups, hw,
                   c.gn1_y.v.data(), c.gn1_xhat.v.data(), c.istd1.data());
        c.s1 = Tensor<T>(r.cin, h, w);
        silu_forward(c.gn1_y.v.data(), c.gn1_y.size(), c.s1.v.data());
        c.col1.resize(static_cast<std::size_t>(r.cin) * 9 * hw);
        im2col3(c.s1.v.data(), r.cin, h, w, c.col1.data());
        c.h1 = Tensor<T>(r.cout, h, w);
        conv3_forward(ps.p(r.conv1.w_off), ps.p(r.conv1.b_off), c.col1.data(), r.cin, r.cout, hw,
                      c.h1.v.data());
        std::vector<T> tb(r.cout);
        dense_forward(ps.p(r.proj.w_off), ps.p(r.proj.b_off), temb.data(), r.proj.nin, r.cout,
                      tb.data());
        for (int ch = 0; ch < r.cout; ++ch) {
            T* p = c.h1.ch(ch);
            for (int i = 0; i < hw; ++i) p[i] += tb[ch];
        }
        c.gn2_y = Tensor<T>(r.cout, h, w);
        c.gn2_xhat = Tensor<T>(r.cout, h, w);
        c.istd2.resize(arch.groups);
        gn_forward(ps.p(r.gn2.g_off), ps.p(r.gn2.b_off), c.h1.v.data(), r.cout, arch.groups, hw,
                   c.gn2_y.v.data(), c.gn2_xhat.v.data(), c.istd2.data());
        c.s2 = Tensor<T>(r.cout, h, w);
        silu_forward(c.gn2_y.v.data(), c.gn2_y.size(), c.s2.v.data());
        c.col2.resize(static_cast<std::size_t>(r.cout) * 9 * hw);
        im2col3(c.s2.v.data(), r.cout, h, w, c.col2.data());
        Tensor<T> out(r.cout, h, w);
        conv3_forward(ps.p(r.conv2.w_off), ps.p(r.conv2.b_off), c.col2.data(), r.cout, r.cout, hw,
                      out.v.data());
        if (r.has_skip) {
            Tensor<T> sk(r.cout, h, w);
            conv1_forward(ps.p(r.skip.w_off), ps.p(r.skip.b_off), x.v.data(), r.cin, r.cout, hw,
                          sk.v.data());
            for (std::size_t i = 0; i < out.size(); ++i) out.v[i] += sk.v[i];
        } else {
            for (std::size_t i = 0; i < out.size(); ++i) out.v[i] += x.v[i];
        }
        return out;
    }

    // Returns d(input); accumulates parameter grads and d(temb).
    Tensor<T> res_backward(const ResBlockP& r, const Tensor<T>& dout, const ResCache<T>& c,
                           std::vector<T>& dtemb) {
        const int h = c.x.h, w = c.x.w, hw = h * w;
        Tensor<T> ds2(r.cout, h, w);
        conv3_backward(ps.p(r.conv2.w_off), c.col2.data(), dout.v.data(), r.cout, r.cout, h, w,
                       ps.g(r.conv2.w_off), ps.g(r.conv2.b_off), ds2.v.data());
        Tensor<T> dgn2(r.cout, h, w);
        silu_backward(c.gn2_y.v.data(), ds2.v.data(), ds2.size(), dgn2.v.data());
        Tensor<T> dh1(r.cout, h, w);
        gn_backward(ps.p(r.gn2.g_off), c.gn2_xhat.v.data(), c.istd2.data(), dgn2.v.data(), r.cout,
                    arch.groups, hw, ps.g(r.gn2.g_off), ps.g(r.gn2.b_off), dh1.v.data());
        std::vector<T> dtb(r.cout, T(0));
        for (int ch = 0; ch < r.cout; ++ch) {
            const T* p = dh1.ch(ch);
            double s = 0.0;
            for (int i = 0; i < hw; ++i) s += p[i];
            dtb[ch] = static_cast<T>(s);
        }
        std::vector<T> demb(r.proj.nin);
        dense_backward(ps.p(r.proj.w_off), cache.temb.data(), dtb.data(), r.proj.nin, r.cout,
                       ps.g(r.proj.w_off), ps.g(r.proj.b_off), demb.data());
        for (int i = 0; i < r.proj.nin; ++i) dtemb[i] += demb[i];
        Tensor<T> ds1(r.cin, h, w);
        conv3_backward(ps.p(r.conv1.w_off), c.col1.data(), dh1.v.data(), r.cin, r.cout, h, w,
                       ps.g(r.conv1.w_off), ps.g(r.conv1.b_off), ds1.v.data());
        Tensor<T> dgn1(r.cin, h, w);
        silu_backward(c.gn1_y.v.data(), ds1.v.data(), ds1.size(), dgn1.v.data());
        Tensor<T> dx(r.cin, h, w);
        gn_backward(ps.p(r.gn1.g_off), c.gn1_xhat.v.data(), c.istd1.data(), dgn1.v.data(), r.cin,
                    arch.groups, hw, ps.g(r.gn1.g_off), ps.g(r.gn1.b_off), dx.v.data());
        if (r.has_skip) {
            Tensor<T> dsk(r.cin, h, w);
            conv1_backward(ps.p(r.skip.w_off), c.x.v.data(), dout.v.data(), r.cin, r.cout, hw,
                           ps.g(r.skip.w_off), ps.g(r.skip.b_off), dsk.v.data());
            for (std::size_t i = 0; i < dx.size(); ++i) dx.v[i] += dsk.v[i];
        } else {
            for (std::size_t i = 0; i < dx.size(); ++i) dx.v[i] += dout.v[i];
        }
        return dx;
    }

    Tensor<T> forward(const Tensor<T>& x, int t, int t_total, Cache<T>& c) const {
        if (x.c != 1 || x.h != arch.in_h || x.w != arch.in_w)
            throw std::invalid_argument("unet: input shape does not match arch");
        if (t_total < 1 || t < 0 || t >= t_total)
            throw std::invalid_argument("unet: t out of range");
        const int td = arch.time_dim;
        c.x_in = x;
        c.emb0.resize(td);
        time_embed_base(static_cast<double>(t) / t_total, td, c.emb0.data());
        c.e1.resize(td);
        dense_forward(ps.p(mlp1.w_off), ps.p(mlp1.b_off), c.emb0.data(), td, td, c.e1.data());
        c.a1.resize(td);
        silu_forward(c.e1.data(), c.e1.size(), c.a1.data());
        c.temb.resize(td);
        dense_forward(ps.p(mlp2.w_off), ps.p(mlp2.b_off), c.a1.data(), td, td, c.temb.data());

        int h = arch.in_h, w = arch.in_w;
        c.stem_col.resize(static_cast<std::size_t>(9) * h * w);
        im2col3(x.v.data(), 1, h, w, c.stem_col.data());
        c.stem_out = Tensor<T>(arch.widths[0], h, w);
        conv3_forward(ps.p(stem.w_off), ps.p(stem.b_off), c.stem_col.data(), 1, arch.widths[0],
                      h * w, c.stem_out.v.data());

        c.enc.assign(depth, {});
        c.skips.assign(depth, {});
        c.pooled.assign(depth, {});
        Tensor<T> cur = c.stem_out;
        for (int i = 0; i < depth; ++i) {
            cur = res_forward(enc[i], cur, c.temb, c.enc[i]);
            c.skips[i] = cur;
            Tensor<T> p(cur.c, cur.h / 2, cur.w / 2);
            avgpool2_forward(cur.v.data(), cur.c, cur.h, cur.w, p.v.data());
            c.pooled[i] = p;
            cur = std::move(p);
        }
        cur = res_forward(mid, cur, c.temb, c.mid);
        c.dec.assign(depth, {});
        c.upped.assign(depth, {});
        c.cat.assign(depth, {});
        for (int i = depth - 1; i >= 0; --i) {
            Tensor<T> up(cur.c, cur.h * 2, cur.w * 2);
            upnearest2_forward(cur.v.data(), cur.c, cur.h, cur.w, up.v.data());
            c.upped[i] = up;
            const Tensor<T>& sk = c.skips[i];
            Tensor<T> cat(up.c + sk.c, up.h, up.w);
            std::copy(up.v.begin(), up.v.end(), cat.v.begin());
            std::copy(sk.v.begin(), sk.v.end(), cat.v.begin() + up.size());
            c.cat[i] = cat;
            cur = res_forward(dec[i], cat, c.temb, c.dec[i]);
        }
        c.head_gn_y = Tensor<T>(arch.widths[0], h, w);
        c.head_gn_xhat = Tensor<T>(arch.widths[0], h, w);
        c.head_istd.resize(arch.groups);
        gn_forward(ps.p(head_gn.g_off), ps.p(head_gn.b_off), cur.v.data(), arch.widths[0],
                   arch.groups, h * w, c.head_gn_y.v.data(), c.head_gn_xhat.v.data(),
                   c.head_istd.data());
        c.head_silu = Tensor<T>(arch.widths[0], h, w);
        silu_forward(c.head_gn_y.v.data(), c.head_gn_y.size(), c.head_silu.v.data());
        c.head_col.resize(static_cast<std::size_t>(arch.widths[0]) * 9 * h * w);
        im2col3(c.head_silu.v.data(), arch.widths[0], h, w, c.head_col.data());
        Tensor<T> out(1, h, w);
        conv3_forward(ps.p(head_conv.w_off), ps.p(head_conv.b_off), c.head_col.data(),
                      arch.widths[0], 1, h * w, out.v.data());
        c.valid = true;
        return out;
    }

    void backward(const Tensor<T>& dout, Cache<T>& c) {
        if (!c.valid) throw std::logic_error("unet: backward without forward_train");
        const int h = arch.in_h, w = arch.in_w, hw = h * w;
        const int w0 = arch.widths[0];
        c.demb_accum.assign(arch.time_dim, T(0));

        Tensor<T> dsilu(w0, h, w);
        conv3_backward(ps.p(head_conv.w_off), c.head_col.data(), dout.v.data(), w0, 1, h, w,
                       ps.g(head_conv.w_off), ps.g(head_conv.b_off), dsilu.v.data());
        Tensor<T> dgn(w0, h, w);
        silu_backward(c.head_gn_y.v.data(), dsilu.v.data(), dsilu.size(), dgn.v.data());
        Tensor<T> dcur(w0, h, w);
        gn_backward(ps.p(head_gn.g_off), c.head_gn_xhat.v.data(), c.head_istd.data(),
                    dgn.v.data(), w0, arch.groups, hw, ps.g(head_gn.g_off), ps.g(head_gn.b_off),
                    dcur.v.data());

        // Decoder chain: dec[0] was applied last, so unwind i = 0..depth-1.
        // Each stage splits its concat gradient into the upsample branch
        // (which continues down toward mid) and the skip branch (held for the
        // encoder descent afterwards).
        std::vector<Tensor<T>> dskip(depth);
        for (int i = 0; i <= depth - 1; ++i) {
            Tensor<T> dcat = res_backward(dec[i], dcur, c.dec[i], c.demb_accum);
            const Tensor<T>& up = c.upped[i];
            const Tensor<T>& sk = c.skips[i];
            Tensor<T> dup(up.c, up.h, up.w);
            std::copy(dcat.v.begin(), dcat.v.begin() + up.size(), dup.v.begin());
            dskip[i] = Tensor<T>(sk.c, sk.h, sk.w);
            std::copy(dcat.v.begin() + up.size(), dcat.v.end(), dskip[i].v.begin());
            Tensor<T> dbelow(up.c, up.h / 2, up.w / 2);
            upnearest2_backward(dup.v.data(), up.c, up.h / 2, up.w / 2, dbelow.v.data());
            dcur = std::move(dbelow);
        }
        // dcur is now the gradient at the mid-block output.
        Tensor<T> dpool = res_backward(mid, dcur, c.mid, c.demb_accum);
        // Encoder descent: enc[depth-1] feeds mid, enc[i] feeds pool -> enc[i+1].
        for (int i = depth - 1; i >= 0; --i) {
            const Tensor<T>& sk = c.skips[i];
            Tensor<T> denc_out(sk.c, sk.h, sk.w);
            avgpool2_backward(dpool.v.data(), sk.c, sk.h, sk.w, denc_out.v.data());
            for (std::size_t k = 0; k < denc_out.size(); ++k) denc_out.v[k] += dskip[i].v[k];
            dpool = res_backward(enc[i], denc_out, c.enc[i], c.demb_accum);
        }
        Tensor<T> dstem_in(1, h, w);
        conv3_backward(ps.p(stem.w_off), c.stem_col.data(), dpool.v.data(), 1, w0, h, w,
                       ps.g(stem.w_off), ps.g(stem.b_off), dstem_in.v.data());

        // time MLP
        std::vector<T> da1(arch.time_dim);
        dense_backward(ps.p(mlp2.w_off), c.a1.data(), c.demb_accum.data(), arch.time_dim,
                       arch.time_dim, ps.g(mlp2.w_off), ps.g(mlp2.b_off), da1.data());
        std::vector<T> de1(arch.time_dim);
        silu_backward(c.e1.data(), da1.data(), da1.size(), de1.data());
        dense_backward(ps.p(mlp1.w_off), c.emb0.data(), de1.data(), arch.time_dim, arch.time_dim,
                       ps.g(mlp1.w_off), ps.g(mlp1.b_off), static_cast<T*>(nullptr));
        c.valid = false;
    }

};

template <typename T>
UNet<T>::UNet() = default;

template <typename T>
UNet<T>::UNet(const ArchDescriptor& a) : impl_(new Impl(a)) {}

template <typename T>
UNet<T>::UNet(const UNet& o) : impl_(o.impl_ ? new Impl(*o.impl_) : nullptr) {}

template <typename T>
UNet<T>& UNet<T>::operator=(const UNet& o) {
    if (this != &o) impl_.reset(o.impl_ ? new Impl(*o.impl_) : nullptr);
    return *this;
}

template <typename T>
UNet<T>::UNet(UNet&& o) noexcept = default;

template <typename T>
UNet<T>& UNet<T>::operator=(UNet&& o) noexcept = default;

template <typename T>
UNet<T>::~UNet() = default;

template <typename T>
void UNet<T>::init(Rng& rng) {
    impl_->init(rng);
}

template <typename T>
Tensor<T> UNet<T>::forward(const Tensor<T>& x, int t, int t_total) const {
    Cache<T> local;
    return impl_->forward(x, t, t_total, local);
}

template <typename T>
Tensor<T> UNet<T>::forward_train(const Tensor<T>& x, int t, int t_total) {
    return impl_->forward(x, t, t_total, impl_->cache);
}

template <typename T>
void UNet<T>::backward(const Tensor<T>& dout) {
    impl_->backward(dout, impl_->cache);
}

template <typename T>
void UNet<T>::zero_grad() {
    impl_->ps.zero_grad();
}

template <typename T>
ParamStore<T>& UNet<T>::params() {
    return impl_->ps;
}

template <typename T>
const ParamStore<T>& UNet<T>::params() const {
    return impl_->ps;
}

template <typename T>
const ArchDescriptor& UNet<T>::arch() const {
    return impl_->arch;
}

template <typename T>
std::size_t UNet<T>::param_count() const {
    return impl_->ps.data.size();
}

template class UNet<float>;
template class UNet<double>;

}  // namespace freqdiff
