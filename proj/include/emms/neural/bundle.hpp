#pragma once

#include "emms/em/spectrum.hpp"
#include "emms/neural/mlp.hpp"
#include "emms/sheet/mask.hpp"
#include "emms/util/rng.hpp"

namespace emms::neural {

inline constexpr int kInputDim = 2 * sheet::kMaskPixels;   // 5408

// Network widths. Defaults follow the full-scale architecture; reduced
// widths are allowed through configuration for desk-scale runs.
struct BundleArch {
    std::vector<int> encoder_hidden = {2048, 2048, 1024, 512, 512, 256, 128, 64};
    std::vector<int> decoder_hidden = {64, 128, 256, 512, 512, 1024, 2048, 2048};
    std::vector<int> mag_hidden = {500, 1000, 2000, 1000, 500, 200, 100};
    std::vector<int> phase_hidden = {100, 200, 500, 1000, 1000, 500, 200, 100};
    int latent_dim = 8;   // K

    bool operator==(const BundleArch&) const = default;
};

// z_k = mu_k + exp(logvar_k / 2) * eps_k
template <typename T>
void reparameterize(int n, const T* mu, const T* logvar, const T* eps, T* z)
{
    for (int i = 0; i < n; ++i)
        z[i] = mu[i] + std::exp(logvar[i] / T(2)) * eps[i];
}

// KL[N(mu, sigma) || N(0, 1)] summed over dimensions, sigma = exp(logvar)
// treated as the variance.
template <typename T>
T kl_loss(int n, const T* mu, const T* logvar)
{
    T acc = 0;
    for (int i = 0; i < n; ++i)
        acc += std::exp(logvar[i]) + mu[i] * mu[i] - logvar[i] - T(1);
    return acc / T(2);
}

// Jointly trained VAE + four spectrum predictors for one
// (layer count, thickness) pair.
template <typename T>
struct ModelBundle {
    BundleArch arch;
    Mlp<T> encoder;              // input -> hidden (ReLU)
    Dense<T> mu_head, logvar_head;   // linear, width K
    Mlp<T> decoder;              // K -> 5408, sigmoid output
    Mlp<T> mag_te, mag_tm, phase_te, phase_tm;   // K+1 -> 1, sigmoid output

    // Metadata identifying the latent space.
    int layer_count = 2;
    double thickness_mm = 1.575;
    em::FrequencyGrid grid;
    double alpha = 10.0;
    double beta = 20.0;
    std::uint64_t seed = 0;
    std::string data_hash;

    void init(const BundleArch& a, std::uint64_t init_seed)
    {
        arch = a;
        seed = init_seed;
        auto rng = substream(init_seed, 0x6d6f64656cULL);
        const int k = arch.latent_dim;
        encoder.layers.clear();
        {
            int prev = kInputDim;
            for (int h : arch.encoder_hidden) {
                Dense<T> d;
                d.init(prev, h, Act::Relu, rng);
                encoder.layers.push_back(std::move(d));
                prev = h;
            }
            mu_head.init(prev, k, Act::None, rng);
            logvar_head.init(prev, k, Act::None, rng);
        }
        decoder.init(k, arch.decoder_hidden, kInputDim, Act::Sigmoid, rng);
        mag_te.init(k + 1, arch.mag_hidden, 1, Act::Sigmoid, rng);
        mag_tm.init(k + 1, arch.mag_hidden, 1, Act::Sigmoid, rng);
        phase_te.init(k + 1, arch.phase_hidden, 1, Act::Sigmoid, rng);
        phase_tm.init(k + 1, arch.phase_hidden, 1, Act::Sigmoid, rng);
    }

    // Deterministic forward pass; x has `batch` rows of length 5408.
    void encode(int batch, const T* x, std::vector<T>& mu, std::vector<T>& logvar) const
    {
        std::vector<std::vector<T>> acts;
        encoder.forward(batch, x, acts);
        const int k = arch.latent_dim;
        mu.resize(static_cast<std::size_t>(batch) * k);
        logvar.resize(static_cast<std::size_t>(batch) * k);
        mu_head.forward(batch, acts.back().data(), mu.data());
        logvar_head.forward(batch, acts.back().data(), logvar.data());
    }

    void encode_checked(int batch, const std::vector<T>& x, std::vector<T>& mu,
                        std::vector<T>& logvar) const
    {
        if (static_cast<int>(x.size()) != batch * kInputDim)
            throw InvalidArgument("encode: input must have 5408 values per sample");
        encode(batch, x.data(), mu, logvar);
    }

    // z rows of length K -> sigmoid pixel pair rows of length 5408.
    std::vector<T> decode(int batch, const T* z) const
    {
        std::vector<std::vector<T>> acts;
        decoder.forward(batch, z, acts);
        return acts.back();
    }

    // Evaluate the four predictors at every grid frequency for one latent
    // vector; de-normalizes the phase channels into the label convention.
    em::SpectrumLabel predict_spectrum(const T* z) const
    {
        const int k = arch.latent_dim;
        const int n = grid.n_points;
        std::vector<T> rows(static_cast<std::size_t>(n) * (k + 1));
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < k; ++j)
                rows[static_cast<std::size_t>(i) * (k + 1) + j] = z[j];
            rows[static_cast<std::size_t>(i) * (k + 1) + k] =
                static_cast<T>(grid.normalized(grid.freq_ghz(i)));
        }
        std::vector<std::vector<T>> acts;
        em::SpectrumLabel out(grid);
        auto run = [&](const Mlp<T>& net, std::vector<double>& dst) {
            net.forward(n, rows.data(), acts);
            for (int i = 0; i < n; ++i)
                dst[static_cast<std::size_t>(i)] = acts.back()[static_cast<std::size_t>(i)];
        };
        run(mag_te, out.mag_te);
        run(phase_te, out.phase_te);
        run(mag_tm, out.mag_tm);
        run(phase_tm, out.phase_tm);
        return out;
    }

    std::vector<Dense<T>*> all_layers()
    {
        std::vector<Dense<T>*> out;
        for (auto& l : encoder.layers)
            out.push_back(&l);
        out.push_back(&mu_head);
        out.push_back(&logvar_head);
        for (auto& l : decoder.layers)
            out.push_back(&l);
        for (auto* net : {&mag_te, &mag_tm, &phase_te, &phase_tm})
            for (auto& l : net->layers)
                out.push_back(&l);
        return out;
    }

    void zero_grads()
    {
        for (auto* l : all_layers())
            l->zero_grads();
    }

    std::size_t param_count()
    {
        std::size_t n = 0;
        for (auto* l : all_layers())
            n += l->param_count();
        return n;
    }
};

} // namespace emms::neural
