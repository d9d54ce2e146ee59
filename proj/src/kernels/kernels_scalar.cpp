#include "emms/kernels/kernels.hpp"

#include <cmath>

namespace emms::kernels {

namespace {

void gemm_nt(int m, int n, int k, const float* a, const float* b, float* c)
{
    for (int i = 0; i < m; ++i) {
        const float* ai = a + static_cast<std::ptrdiff_t>(i) * k;
        for (int j = 0; j < n; ++j) {
            const float* bj = b + static_cast<std::ptrdiff_t>(j) * k;
            float acc = 0.0f;
            for (int t = 0; t < k; ++t)
                acc += ai[t] * bj[t];
            c[static_cast<std::ptrdiff_t>(i) * n + j] = acc;
        }
    }
}

void gemm_nn(int m, int n, int k, const float* a, const float* b, float* c)
{
    for (int i = 0; i < m; ++i) {
        float* ci = c + static_cast<std::ptrdiff_t>(i) * n;
        for (int j = 0; j < n; ++j)
            ci[j] = 0.0f;
        const float* ai = a + static_cast<std::ptrdiff_t>(i) * k;
        for (int t = 0; t < k; ++t) {
            const float av = ai[t];
            const float* bt = b + static_cast<std::ptrdiff_t>(t) * n;
            for (int j = 0; j < n; ++j)
                ci[j] += av * bt[j];
        }
    }
}

void gemm_tn_acc(int m, int n, int k, const float* a, const float* b, float* c)
{
    for (int t = 0; t < k; ++t) {
        const float* at = a + static_cast<std::ptrdiff_t>(t) * m;
        const float* bt = b + static_cast<std::ptrdiff_t>(t) * n;
        for (int i = 0; i < m; ++i) {
            const float av = at[i];
            float* ci = c + static_cast<std::ptrdiff_t>(i) * n;
            for (int j = 0; j < n; ++j)
                ci[j] += av * bt[j];
        }
    }
}

void relu_fwd(int n, const float* x, float* y)
{
    for (int i = 0; i < n; ++i)
        y[i] = x[i] > 0.0f ? x[i] : 0.0f;
}

void relu_bwd(int n, const float* y, const float* dy, float* dx)
{
    for (int i = 0; i < n; ++i)
        dx[i] = y[i] > 0.0f ? dy[i] : 0.0f;
}

void sigmoid_fwd(int n, const float* x, float* y)
{
    for (int i = 0; i < n; ++i)
        y[i] = 1.0f / (1.0f + std::exp(-x[i]));
}

void axpy(int n, float alpha, const float* x, float* y)
{
    for (int i = 0; i < n; ++i)
        y[i] += alpha * x[i];
}

void adam_step(int n, float* w, const float* g, float* m1, float* m2, float lr,
               float b1, float b2, float eps, float c1, float c2)
{
    for (int i = 0; i < n; ++i) {
        m1[i] = b1 * m1[i] + (1.0f - b1) * g[i];
        m2[i] = b2 * m2[i] + (1.0f - b2) * g[i] * g[i];
        const float mhat = m1[i] / c1;
        const float vhat = m2[i] / c2;
        w[i] -= lr * mhat / (std::sqrt(vhat) + eps);
    }
}

} // namespace

const KernelTable& scalar_table()
{
    static const KernelTable t = {"scalar",  gemm_nt,     gemm_nn, gemm_tn_acc,
                                  relu_fwd,  relu_bwd,    sigmoid_fwd,
                                  axpy,      adam_step};
    return t;
}

} // namespace emms::kernels
