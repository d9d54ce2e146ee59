#pragma once

#include <algorithm>
#include <cstdio>
#include <numeric>

#include "emms/neural/bundle.hpp"
#include "emms/shapes/dataset.hpp"
#include "emms/util/hash.hpp"

namespace emms::neural {

struct TrainConfig {
    double alpha = 10.0;
    double beta = 20.0;
    double learning_rate = 5e-4;
    std::vector<int> batch_schedule = {32, 64, 128, 256};   // stepped at 25/50/75%
    int epochs = 200;
    double val_fraction = 0.1;
    int patience = 20;               // epochs of validation stall before stopping
    std::uint64_t seed = 1;
    bool verbose = false;

    void validate() const
    {
        if (alpha <= 0 || beta <= 0)
            throw InvalidArgument("alpha and beta must be positive");
        if (batch_schedule.empty() ||
            !std::is_sorted(batch_schedule.begin(), batch_schedule.end()))
            throw InvalidArgument("batch schedule must be non-decreasing");
        if (epochs < 1 || val_fraction < 0 || val_fraction >= 1)
            throw InvalidArgument("bad epoch budget or validation fraction");
    }
};

struct LossParts {
    double total = 0, recons = 0, kl = 0, pred = 0;
};

struct EpochStats {
    LossParts train;
    double val_total = 0;
    double val_pixel_accuracy = 0;
    double val_mag_mse = 0;     // mean of TE/TM magnitude predictor MSE per point
    double val_phase_mse = 0;
};

struct TrainReport {
    std::vector<EpochStats> epochs;
    int best_epoch = -1;
    double best_val_total = 0;
    EpochStats final_validation;
    bool early_stopped = false;
};

// One assembled minibatch: inputs plus per-channel labels, sample-major.
template <typename T>
struct JointBatch {
    int size = 0;
    int n_freq = 0;
    std::vector<T> x;                                   // size x 5408
    std::vector<T> mag_te, phase_te, mag_tm, phase_tm;  // size x n_freq
};

inline constexpr double kProbClamp = 1e-7;

// Forward pass of the joint loss: alpha * L_recons + L_KL + beta * L_pred,
// all reported as batch means. eps holds size x K standard-normal draws.
// When `bundle_grads` is true the same pass accumulates gradients into the
// bundle's layers.
template <typename T>
LossParts joint_loss(ModelBundle<T>& b, const JointBatch<T>& batch,
                     const std::vector<T>& eps, bool bundle_grads)
{
    const int B = batch.size;
    const int k = b.arch.latent_dim;
    const int n = batch.n_freq;
    const T invB = T(1) / B;

    // Encoder and latent heads.
    std::vector<std::vector<T>> acts_enc;
    b.encoder.forward(B, batch.x.data(), acts_enc);
    const std::vector<T>& h = acts_enc.back();
    std::vector<T> mu(static_cast<std::size_t>(B) * k), lv(static_cast<std::size_t>(B) * k);
    b.mu_head.forward(B, h.data(), mu.data());
    b.logvar_head.forward(B, h.data(), lv.data());

    std::vector<T> z(mu.size());
    reparameterize<T>(B * k, mu.data(), lv.data(), eps.data(), z.data());

    // Decoder.
    std::vector<std::vector<T>> acts_dec;
    b.decoder.forward(B, z.data(), acts_dec);
    const std::vector<T>& xhat = acts_dec.back();

    double l_rec = 0;
    for (std::size_t i = 0; i < xhat.size(); ++i) {
        const double p = std::clamp(static_cast<double>(xhat[i]), kProbClamp, 1.0 - kProbClamp);
        const double xv = batch.x[i];
        l_rec += -(xv * std::log(p) + (1.0 - xv) * std::log(1.0 - p));
    }
    l_rec /= B;

    double l_kl = 0;
    for (int s = 0; s < B; ++s)
        l_kl += kl_loss<T>(k, mu.data() + static_cast<std::ptrdiff_t>(s) * k,
                           lv.data() + static_cast<std::ptrdiff_t>(s) * k);
    l_kl /= B;

    // Predictor rows: (mu, normalized frequency) for every sample/frequency.
    const int rows = B * n;
    std::vector<T> pin(static_cast<std::size_t>(rows) * (k + 1));
    for (int s = 0; s < B; ++s)
        for (int i = 0; i < n; ++i) {
            T* row = pin.data() + (static_cast<std::ptrdiff_t>(s) * n + i) * (k + 1);
            for (int j = 0; j < k; ++j)
                row[j] = mu[static_cast<std::size_t>(s) * k + j];
            row[k] = static_cast<T>(b.grid.normalized(b.grid.freq_ghz(i)));
        }

    struct PredEval {
        Mlp<T>* net;
        const std::vector<T>* label;
        std::vector<std::vector<T>> acts;
        double mse = 0;
    };
    std::array<PredEval, 4> preds = {{{&b.mag_te, &batch.mag_te},
                                      {&b.phase_te, &batch.phase_te},
                                      {&b.mag_tm, &batch.mag_tm},
                                      {&b.phase_tm, &batch.phase_tm}}};
    double l_pred = 0;
    for (auto& p : preds) {
        p.net->forward(rows, pin.data(), p.acts);
        double acc = 0;
        for (int r = 0; r < rows; ++r) {
            const double d = static_cast<double>(p.acts.back()[static_cast<std::size_t>(r)]) -
                             static_cast<double>((*p.label)[static_cast<std::size_t>(r)]);
            acc += d * d;
        }
        p.mse = acc / rows;           // per-point MSE of this predictor
        l_pred += acc / (B * n);
    }

    LossParts parts;
    parts.recons = l_rec;
    parts.kl = l_kl;
    parts.pred = l_pred;
    parts.total = b.alpha * l_rec + l_kl + b.beta * l_pred;
    if (!std::isfinite(parts.total))
        throw NumericalError("joint loss is not finite (recons=" + std::to_string(l_rec) +
                             ", kl=" + std::to_string(l_kl) +
                             ", pred=" + std::to_string(l_pred) + ")");
    if (!bundle_grads)
        return parts;

    // ---- backward ----
    std::vector<T> dmu(mu.size(), T(0)), dlv(lv.size(), T(0));

    // Decoder: sigmoid + cross-entropy collapse to (xhat - x) on the preact.
    {
        std::vector<T> dpre(xhat.size());
        const T scale = T(b.alpha) * invB;
        for (std::size_t i = 0; i < xhat.size(); ++i)
            dpre[i] = scale * (xhat[i] - batch.x[i]);
        std::vector<T> dz(z.size());
        b.decoder.backward(B, acts_dec, dpre.data(), true, dz.data());
        for (int s = 0; s < B; ++s)
            for (int j = 0; j < k; ++j) {
                const std::size_t idx = static_cast<std::size_t>(s) * k + j;
                dmu[idx] += dz[idx];
                dlv[idx] += dz[idx] * eps[idx] * std::exp(lv[idx] / T(2)) / T(2);
            }
    }

    // Predictors: MSE through the output sigmoid; input gradients feed mu.
    {
        std::vector<T> dpin_total(pin.size(), T(0));
        std::vector<T> dout(static_cast<std::size_t>(rows));
        std::vector<T> dpin(pin.size());
        const T scale = T(2) * T(b.beta) * invB / T(n);
        for (auto& p : preds) {
            for (int r = 0; r < rows; ++r)
                dout[static_cast<std::size_t>(r)] =
                    scale * (p.acts.back()[static_cast<std::size_t>(r)] -
                             (*p.label)[static_cast<std::size_t>(r)]);
            p.net->backward(rows, p.acts, dout.data(), false, dpin.data());
            for (std::size_t i = 0; i < dpin.size(); ++i)
                dpin_total[i] += dpin[i];
        }
        for (int s = 0; s < B; ++s)
            for (int i = 0; i < n; ++i) {
                const T* row =
                    dpin_total.data() + (static_cast<std::ptrdiff_t>(s) * n + i) * (k + 1);
                for (int j = 0; j < k; ++j)
                    dmu[static_cast<std::size_t>(s) * k + j] += row[j];
            }
    }

    // KL.
    for (int s = 0; s < B; ++s)
        for (int j = 0; j < k; ++j) {
            const std::size_t idx = static_cast<std::size_t>(s) * k + j;
            dmu[idx] += mu[idx] * invB;
            dlv[idx] += (std::exp(lv[idx]) - T(1)) / T(2) * invB;
        }

    // Latent heads and encoder trunk.
    {
        std::vector<T> dh(h.size(), T(0)), dh2(h.size());
        std::vector<T> scratch;
        b.mu_head.backward(B, h.data(), mu.data(), dmu.data(), true, scratch, dh.data());
        b.logvar_head.backward(B, h.data(), lv.data(), dlv.data(), true, scratch, dh2.data());
        for (std::size_t i = 0; i < dh.size(); ++i)
            dh[i] += dh2[i];
        b.encoder.backward(B, acts_enc, dh.data(), false, nullptr);
    }
    return parts;
}

// Validation metrics with eps = 0 (z = mu): joint loss parts, binarized
// pixel reconstruction accuracy, per-point predictor MSEs.
template <typename T>
EpochStats evaluate(ModelBundle<T>& b, const JointBatch<T>& batch)
{
    EpochStats st;
    const int B = batch.size;
    const int k = b.arch.latent_dim;
    std::vector<T> eps(static_cast<std::size_t>(B) * k, T(0));
    // Loss parts without touching gradients.
    const LossParts parts = joint_loss(b, batch, eps, false);
    st.val_total = parts.total;
    st.train = parts;

    std::vector<T> mu, lv;
    b.encode(B, batch.x.data(), mu, lv);
    const auto xhat = b.decode(B, mu.data());
    long correct = 0;
    for (std::size_t i = 0; i < xhat.size(); ++i) {
        const bool bit = xhat[i] >= T(0.5);
        correct += bit == (batch.x[i] >= T(0.5));
    }
    st.val_pixel_accuracy = static_cast<double>(correct) / static_cast<double>(xhat.size());

    // Per-predictor MSE at (mu, f).
    const int n = batch.n_freq;
    const int rows = B * n;
    std::vector<T> pin(static_cast<std::size_t>(rows) * (k + 1));
    for (int s = 0; s < B; ++s)
        for (int i = 0; i < n; ++i) {
            T* row = pin.data() + (static_cast<std::ptrdiff_t>(s) * n + i) * (k + 1);
            for (int j = 0; j < k; ++j)
                row[j] = mu[static_cast<std::size_t>(s) * k + j];
            row[k] = static_cast<T>(b.grid.normalized(b.grid.freq_ghz(i)));
        }
    auto mse_of = [&](Mlp<T>& net, const std::vector<T>& label) {
        std::vector<std::vector<T>> acts;
        net.forward(rows, pin.data(), acts);
        double acc = 0;
        for (int r = 0; r < rows; ++r) {
            const double d = static_cast<double>(acts.back()[static_cast<std::size_t>(r)]) -
                             static_cast<double>(label[static_cast<std::size_t>(r)]);
            acc += d * d;
        }
        return acc / rows;
    };
    st.val_mag_mse = 0.5 * (mse_of(b.mag_te, batch.mag_te) + mse_of(b.mag_tm, batch.mag_tm));
    st.val_phase_mse =
        0.5 * (mse_of(b.phase_te, batch.phase_te) + mse_of(b.phase_tm, batch.phase_tm));
    return st;
}

// Assemble a batch from dataset samples by index.
template <typename T>
JointBatch<T> make_batch(const shapes::Dataset& ds, const std::vector<int>& indices)
{
    JointBatch<T> batch;
    batch.size = static_cast<int>(indices.size());
    batch.n_freq = ds.config.grid.n_points;
    const int n = batch.n_freq;
    batch.x.resize(static_cast<std::size_t>(batch.size) * kInputDim);
    batch.mag_te.resize(static_cast<std::size_t>(batch.size) * n);
    batch.phase_te.resize(static_cast<std::size_t>(batch.size) * n);
    batch.mag_tm.resize(static_cast<std::size_t>(batch.size) * n);
    batch.phase_tm.resize(static_cast<std::size_t>(batch.size) * n);
    for (int s = 0; s < batch.size; ++s) {
        const auto& sample = ds.samples[static_cast<std::size_t>(indices[static_cast<std::size_t>(s)])];
        T* xrow = batch.x.data() + static_cast<std::ptrdiff_t>(s) * kInputDim;
        for (int p = 0; p < sheet::kMaskPixels; ++p) {
            xrow[p] = static_cast<T>(sample.design.outer.mask.data()[static_cast<std::size_t>(p)]);
            xrow[sheet::kMaskPixels + p] =
                static_cast<T>(sample.design.second.mask.data()[static_cast<std::size_t>(p)]);
        }
        for (int i = 0; i < n; ++i) {
            const std::size_t idx = static_cast<std::size_t>(s) * n + static_cast<std::size_t>(i);
            batch.mag_te[idx] = static_cast<T>(sample.label.mag_te[static_cast<std::size_t>(i)]);
            batch.phase_te[idx] = static_cast<T>(sample.label.phase_te[static_cast<std::size_t>(i)]);
            batch.mag_tm[idx] = static_cast<T>(sample.label.mag_tm[static_cast<std::size_t>(i)]);
            batch.phase_tm[idx] = static_cast<T>(sample.label.phase_tm[static_cast<std::size_t>(i)]);
        }
    }
    return batch;
}

template <typename T>
TrainReport train(ModelBundle<T>& bundle, const shapes::Dataset& ds, const TrainConfig& cfg)
{
    cfg.validate();
    if (ds.samples.empty())
        throw InvalidArgument("training dataset is empty");
    bundle.alpha = cfg.alpha;
    bundle.beta = cfg.beta;
    bundle.layer_count = ds.config.layer_count;
    bundle.thickness_mm = ds.config.thickness_mm;
    bundle.grid = ds.config.grid;
    {
        Hasher h;
        h.update_value(ds.config.seed);
        h.update_value<std::int32_t>(ds.count());
        h.update_value<std::int32_t>(ds.config.layer_count);
        h.update_value(ds.config.thickness_mm);
        bundle.data_hash = hex64(h.digest());
    }

    // Deterministic train/validation split.
    std::vector<int> order(static_cast<std::size_t>(ds.count()));
    std::iota(order.begin(), order.end(), 0);
    {
        auto rng = substream(cfg.seed, 0x73706c6974ULL);
        std::shuffle(order.begin(), order.end(), rng);
    }
    const int n_val = std::max(1, static_cast<int>(cfg.val_fraction * ds.count()));
    std::vector<int> val_idx(order.end() - n_val, order.end());
    std::vector<int> train_idx(order.begin(), order.end() - n_val);
    if (train_idx.empty())
        train_idx = val_idx;   // tiny datasets: overfit checks train == val

    const JointBatch<T> val_batch = make_batch<T>(ds, val_idx);

    Adam<T> opt(cfg.learning_rate);
    auto layers = bundle.all_layers();

    TrainReport report;
    double initial_loss = 0;
    int over_count = 0;
    int stall = 0;
    double best_val = std::numeric_limits<double>::infinity();
    std::vector<std::vector<T>> best_weights;

    auto snapshot = [&]() {
        best_weights.clear();
        for (auto* l : layers) {
            best_weights.push_back(l->w);
            best_weights.push_back(l->b);
        }
    };
    auto restore = [&]() {
        std::size_t i = 0;
        for (auto* l : layers) {
            l->w = best_weights[i++];
            l->b = best_weights[i++];
        }
    };

    const int k = bundle.arch.latent_dim;
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        // Batch size schedule: milestones at 25/50/75% of the epoch budget.
        const double frac = static_cast<double>(epoch) / cfg.epochs;
        std::size_t stage = std::min<std::size_t>(
            static_cast<std::size_t>(frac * static_cast<double>(cfg.batch_schedule.size())),
            cfg.batch_schedule.size() - 1);
        const int batch_size =
            std::min<int>(cfg.batch_schedule[stage], static_cast<int>(train_idx.size()));

        auto rng = substream(cfg.seed, 0x65706f6368ULL + static_cast<std::uint64_t>(epoch));
        std::shuffle(train_idx.begin(), train_idx.end(), rng);
        std::normal_distribution<double> normal(0.0, 1.0);

        LossParts epoch_parts;
        long seen = 0;
        for (std::size_t pos = 0; pos < train_idx.size(); pos += static_cast<std::size_t>(batch_size)) {
            const std::size_t take =
                std::min<std::size_t>(static_cast<std::size_t>(batch_size), train_idx.size() - pos);
            std::vector<int> idx(train_idx.begin() + static_cast<std::ptrdiff_t>(pos),
                                 train_idx.begin() + static_cast<std::ptrdiff_t>(pos + take));
            const JointBatch<T> batch = make_batch<T>(ds, idx);
            std::vector<T> eps(take * static_cast<std::size_t>(k));
            for (auto& e : eps)
                e = static_cast<T>(normal(rng));
            bundle.zero_grads();
            const LossParts parts = joint_loss(bundle, batch, eps, true);
            opt.step(layers);
            epoch_parts.total += parts.total * static_cast<double>(take);
            epoch_parts.recons += parts.recons * static_cast<double>(take);
            epoch_parts.kl += parts.kl * static_cast<double>(take);
            epoch_parts.pred += parts.pred * static_cast<double>(take);
            seen += static_cast<long>(take);
        }
        epoch_parts.total /= static_cast<double>(seen);
        epoch_parts.recons /= static_cast<double>(seen);
        epoch_parts.kl /= static_cast<double>(seen);
        epoch_parts.pred /= static_cast<double>(seen);

        EpochStats st = evaluate(bundle, val_batch);
        st.train = epoch_parts;
        report.epochs.push_back(st);
        if (cfg.verbose)
            std::fprintf(stderr,
                         "epoch %3d  total %.4f  recons %.4f  kl %.4f  pred %.5f  "
                         "val %.4f  pix %.4f  magMSE %.5f\n",
                         epoch, epoch_parts.total, epoch_parts.recons, epoch_parts.kl,
                         epoch_parts.pred, st.val_total, st.val_pixel_accuracy, st.val_mag_mse);

        if (epoch == 0)
            initial_loss = epoch_parts.total;
        if (epoch_parts.total > 10.0 * initial_loss) {
            if (++over_count >= 3)
                throw NumericalError("training diverged: loss exceeded 10x initial for 3 epochs");
        } else {
            over_count = 0;
        }

        if (st.val_total < best_val) {
            best_val = st.val_total;
            report.best_epoch = epoch;
            snapshot();
            stall = 0;
        } else if (++stall >= cfg.patience) {
            report.early_stopped = true;
            break;
        }
    }

    if (!best_weights.empty())
        restore();
    report.best_val_total = best_val;
    report.final_validation = evaluate(bundle, val_batch);
    return report;
}

} // namespace emms::neural
