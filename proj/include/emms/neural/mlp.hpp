#pragma once

#include <random>

#include "emms/neural/linalg.hpp"
#include "emms/util/error.hpp"

namespace emms::neural {

enum class Act { None, Relu, Sigmoid };

// Fully-connected layer, weights [out x in] row-major.
template <typename T>
struct Dense {
    int in = 0, out = 0;
    Act act = Act::None;
    std::vector<T> w, b;
    std::vector<T> gw, gb;             // gradient accumulators
    std::vector<T> mw, vw, mb, vb;     // Adam moments

    void init(int in_, int out_, Act act_, std::mt19937_64& rng)
    {
        in = in_;
        out = out_;
        act = act_;
        w.assign(static_cast<std::size_t>(in) * out, T(0));
        b.assign(static_cast<std::size_t>(out), T(0));
        // Scaled uniform fan-in initialization.
        const double bound = std::sqrt(6.0 / in);
        std::uniform_real_distribution<double> dist(-bound, bound);
        for (auto& x : w)
            x = static_cast<T>(dist(rng));
        alloc_grads();
    }

    void alloc_grads()
    {
        gw.assign(w.size(), T(0));
        gb.assign(b.size(), T(0));
        mw.assign(w.size(), T(0));
        vw.assign(w.size(), T(0));
        mb.assign(b.size(), T(0));
        vb.assign(b.size(), T(0));
    }

    void zero_grads()
    {
        std::fill(gw.begin(), gw.end(), T(0));
        std::fill(gb.begin(), gb.end(), T(0));
    }

    // y[batch x out] = act(x[batch x in] W^T + b)
    void forward(int batch, const T* x, T* y) const
    {
        gemm_nt<T>(batch, out, in, x, w.data(), y);
        for (int i = 0; i < batch; ++i) {
            T* yi = y + static_cast<std::ptrdiff_t>(i) * out;
            for (int j = 0; j < out; ++j)
                yi[j] += b[static_cast<std::size_t>(j)];
        }
        if (act == Act::Relu)
            relu_fwd<T>(batch * out, y, y);
        else if (act == Act::Sigmoid)
            sigmoid_fwd<T>(batch * out, y, y);
    }

    // dy is the gradient wrt the post-activation output (or wrt the
    // pre-activation if `dy_is_preact`); x/y are the cached forward tensors.
    // Accumulates gw/gb and writes dx (may be null for the first layer).
    void backward(int batch, const T* x, const T* y, const T* dy, bool dy_is_preact,
                  std::vector<T>& dz_scratch, T* dx)
    {
        const T* dz = dy;
        if (!dy_is_preact && act != Act::None) {
            dz_scratch.resize(static_cast<std::size_t>(batch) * out);
            if (act == Act::Relu) {
                relu_bwd<T>(batch * out, y, dy, dz_scratch.data());
            } else {
                for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(batch) * out; ++i)
                    dz_scratch[static_cast<std::size_t>(i)] = dy[i] * y[i] * (T(1) - y[i]);
            }
            dz = dz_scratch.data();
        }
        gemm_tn_acc<T>(out, in, batch, dz, x, gw.data());
        for (int i = 0; i < batch; ++i)
            for (int j = 0; j < out; ++j)
                gb[static_cast<std::size_t>(j)] += dz[static_cast<std::ptrdiff_t>(i) * out + j];
        if (dx)
            gemm_nn<T>(batch, in, out, dz, w.data(), dx);
    }

    std::size_t param_count() const { return w.size() + b.size(); }
};

// Stack of dense layers: hidden layers ReLU, output activation configurable.
template <typename T>
struct Mlp {
    std::vector<Dense<T>> layers;

    void init(int input, const std::vector<int>& hidden, int output, Act out_act,
              std::mt19937_64& rng)
    {
        if (hidden.empty())
            throw InvalidArgument("MLP needs at least one hidden layer");
        layers.clear();
        int prev = input;
        for (int h : hidden) {
            if (h <= 0)
                throw InvalidArgument("MLP widths must be positive");
            Dense<T> d;
            d.init(prev, h, Act::Relu, rng);
            layers.push_back(std::move(d));
            prev = h;
        }
        Dense<T> d;
        d.init(prev, output, out_act, rng);
        layers.push_back(std::move(d));
    }

    int input_dim() const { return layers.front().in; }
    int output_dim() const { return layers.back().out; }

    // Returns all activations: acts[0] is the input copy, acts.back() the output.
    void forward(int batch, const T* x, std::vector<std::vector<T>>& acts) const
    {
        acts.resize(layers.size() + 1);
        acts[0].assign(x, x + static_cast<std::ptrdiff_t>(batch) * input_dim());
        for (std::size_t l = 0; l < layers.size(); ++l) {
            acts[l + 1].resize(static_cast<std::size_t>(batch) * layers[l].out);
            layers[l].forward(batch, acts[l].data(), acts[l + 1].data());
        }
    }

    // dy: gradient wrt the network output (pre-activation of the last layer
    // when `dy_is_preact`). Writes the input gradient into dx if non-null.
    void backward(int batch, const std::vector<std::vector<T>>& acts, const T* dy,
                  bool dy_is_preact, T* dx)
    {
        std::vector<T> grad(dy, dy + static_cast<std::ptrdiff_t>(batch) * output_dim());
        std::vector<T> scratch, next;
        for (std::size_t l = layers.size(); l-- > 0;) {
            T* dst = nullptr;
            if (l > 0) {
                next.resize(static_cast<std::size_t>(batch) * layers[l].in);
                dst = next.data();
            } else if (dx) {
                dst = dx;
            }
            layers[l].backward(batch, acts[l].data(), acts[l + 1].data(), grad.data(),
                               dy_is_preact && l == layers.size() - 1, scratch, dst);
            if (l > 0)
                grad = next;
        }
    }

    void zero_grads()
    {
        for (auto& l : layers)
            l.zero_grads();
    }

    std::size_t param_count() const
    {
        std::size_t n = 0;
        for (const auto& l : layers)
            n += l.param_count();
        return n;
    }
};

// Adam over a set of layers; call step() once per minibatch.
template <typename T>
class Adam {
public:
    Adam(double lr, double b1 = 0.9, double b2 = 0.999, double eps = 1e-8)
        : lr_(lr), b1_(b1), b2_(b2), eps_(eps)
    {
    }

    void step(std::vector<Dense<T>*> layers)
    {
        ++t_;
        const double c1 = 1.0 - std::pow(b1_, t_);
        const double c2 = 1.0 - std::pow(b2_, t_);
        for (Dense<T>* l : layers) {
            update(l->w, l->gw, l->mw, l->vw, c1, c2);
            update(l->b, l->gb, l->mb, l->vb, c1, c2);
        }
    }

    long iteration() const { return t_; }

private:
    void update(std::vector<T>& w, const std::vector<T>& g, std::vector<T>& m,
                std::vector<T>& v, double c1, double c2)
    {
        if constexpr (std::is_same_v<T, float>) {
            kernels::active().adam_step(static_cast<int>(w.size()), w.data(), g.data(),
                                        m.data(), v.data(), static_cast<float>(lr_),
                                        static_cast<float>(b1_), static_cast<float>(b2_),
                                        static_cast<float>(eps_), static_cast<float>(c1),
                                        static_cast<float>(c2));
        } else {
            for (std::size_t i = 0; i < w.size(); ++i) {
                m[i] = T(b1_) * m[i] + T(1.0 - b1_) * g[i];
                v[i] = T(b2_) * v[i] + T(1.0 - b2_) * g[i] * g[i];
                const T mhat = m[i] / T(c1);
                const T vhat = v[i] / T(c2);
                w[i] -= T(lr_) * mhat / (std::sqrt(vhat) + T(eps_));
            }
        }
    }

    double lr_, b1_, b2_, eps_;
    long t_ = 0;
};

} // namespace emms::neural
