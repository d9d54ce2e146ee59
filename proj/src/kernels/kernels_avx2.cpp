#include "emms/kernels/kernels.hpp"

#include <cmath>
#include <immintrin.h>

// AVX2/FMA variants. Accumulation order differs from the scalar reference
// (8-lane partial sums), so results agree to rounding, not bitwise; the
// equivalence suite pins the tolerance.

namespace emms::kernels {

namespace {

inline float hsum256(__m256 v)
{
    __m128 lo = _mm256_castps256_ps128(v);
    __m128 hi = _mm256_extractf128_ps(v, 1);
    lo = _mm_add_ps(lo, hi);
    lo = _mm_add_ps(lo, _mm_movehl_ps(lo, lo));
    lo = _mm_add_ss(lo, _mm_shuffle_ps(lo, lo, 0x55));
    return _mm_cvtss_f32(lo);
}

void gemm_nt(int m, int n, int k, const float* a, const float* b, float* c)
{
    const int k8 = k & ~7;
    for (int i = 0; i < m; ++i) {
        const float* ai = a + static_cast<std::ptrdiff_t>(i) * k;
        for (int j = 0; j < n; ++j) {
            const float* bj = b + static_cast<std::ptrdiff_t>(j) * k;
            __m256 acc = _mm256_setzero_ps();
            for (int t = 0; t < k8; t += 8)
                acc = _mm256_fmadd_ps(_mm256_loadu_ps(ai + t), _mm256_loadu_ps(bj + t), acc);
            float s = hsum256(acc);
            for (int t = k8; t < k; ++t)
                s += ai[t] * bj[t];
            c[static_cast<std::ptrdiff_t>(i) * n + j] = s;
        }
    }
}

void gemm_nn(int m, int n, int k, const float* a, const float* b, float* c)
{
    const int n8 = n & ~7;
    for (int i = 0; i < m; ++i) {
        float* ci = c + static_cast<std::ptrdiff_t>(i) * n;
        for (int j = 0; j < n; ++j)
            ci[j] = 0.0f;
        const float* ai = a + static_cast<std::ptrdiff_t>(i) * k;
        for (int t = 0; t < k; ++t) {
            const __m256 av = _mm256_set1_ps(ai[t]);
            const float* bt = b + static_cast<std::ptrdiff_t>(t) * n;
            for (int j = 0; j < n8; j += 8) {
                __m256 cv = _mm256_loadu_ps(ci + j);
                cv = _mm256_fmadd_ps(av, _mm256_loadu_ps(bt + j), cv);
                _mm256_storeu_ps(ci + j, cv);
            }
            for (int j = n8; j < n; ++j)
                ci[j] += ai[t] * bt[j];
        }
    }
}

void gemm_tn_acc(int m, int n, int k, const float* a, const float* b, float* c)
{
    const int n8 = n & ~7;
    for (int t = 0; t < k; ++t) {
        const float* at = a + static_cast<std::ptrdiff_t>(t) * m;
        const float* bt = b + static_cast<std::ptrdiff_t>(t) * n;
        for (int i = 0; i < m; ++i) {
            const __m256 av = _mm256_set1_ps(at[i]);
            float* ci = c + static_cast<std::ptrdiff_t>(i) * n;
            for (int j = 0; j < n8; j += 8) {
                __m256 cv = _mm256_loadu_ps(ci + j);
                cv = _mm256_fmadd_ps(av, _mm256_loadu_ps(bt + j), cv);
                _mm256_storeu_ps(ci + j, cv);
            }
            for (int j = n8; j < n; ++j)
                ci[j] += at[i] * bt[j];
        }
    }
}

void relu_fwd(int n, const float* x, float* y)
{
    const __m256 zero = _mm256_setzero_ps();
    const int n8 = n & ~7;
    for (int i = 0; i < n8; i += 8)
        _mm256_storeu_ps(y + i, _mm256_max_ps(_mm256_loadu_ps(x + i), zero));
    for (int i = n8; i < n; ++i)
        y[i] = x[i] > 0.0f ? x[i] : 0.0f;
}

void relu_bwd(int n, const float* y, const float* dy, float* dx)
{
    const __m256 zero = _mm256_setzero_ps();
    const int n8 = n & ~7;
    for (int i = 0; i < n8; i += 8) {
        const __m256 mask = _mm256_cmp_ps(_mm256_loadu_ps(y + i), zero, _CMP_GT_OQ);
        _mm256_storeu_ps(dx + i, _mm256_and_ps(_mm256_loadu_ps(dy + i), mask));
    }
    for (int i = n8; i < n; ++i)
        dx[i] = y[i] > 0.0f ? dy[i] : 0.0f;
}

void sigmoid_fwd(int n, const float* x, float* y)
{
    // exp stays scalar so both backends produce identical transcendentals.
    for (int i = 0; i < n; ++i)
        y[i] = 1.0f / (1.0f + std::exp(-x[i]));
}

void axpy(int n, float alpha, const float* x, float* y)
{
    const __m256 av = _mm256_set1_ps(alpha);
    const int n8 = n & ~7;
    for (int i = 0; i < n8; i += 8) {
        __m256 yv = _mm256_loadu_ps(y + i);
        yv = _mm256_fmadd_ps(av, _mm256_loadu_ps(x + i), yv);
        _mm256_storeu_ps(y + i, yv);
    }
    for (int i = n8; i < n; ++i)
        y[i] += alpha * x[i];
}

void adam_step(int n, float* w, const float* g, float* m1, float* m2, float lr,
               float b1, float b2, float eps, float c1, float c2)
{
    const int n8 = n & ~7;
    const __m256 b1v = _mm256_set1_ps(b1);
    const __m256 b2v = _mm256_set1_ps(b2);
    const __m256 ob1 = _mm256_set1_ps(1.0f - b1);
    const __m256 ob2 = _mm256_set1_ps(1.0f - b2);
    const __m256 lrv = _mm256_set1_ps(lr);
    const __m256 epsv = _mm256_set1_ps(eps);
    const __m256 ic1 = _mm256_set1_ps(1.0f / c1);
    const __m256 ic2 = _mm256_set1_ps(1.0f / c2);
    for (int i = 0; i < n8; i += 8) {
        const __m256 gv = _mm256_loadu_ps(g + i);
        __m256 m1v = _mm256_loadu_ps(m1 + i);
        __m256 m2v = _mm256_loadu_ps(m2 + i);
        m1v = _mm256_fmadd_ps(b1v, m1v, _mm256_mul_ps(ob1, gv));
        m2v = _mm256_fmadd_ps(b2v, m2v, _mm256_mul_ps(ob2, _mm256_mul_ps(gv, gv)));
        _mm256_storeu_ps(m1 + i, m1v);
        _mm256_storeu_ps(m2 + i, m2v);
        const __m256 mhat = _mm256_mul_ps(m1v, ic1);
        const __m256 vhat = _mm256_mul_ps(m2v, ic2);
        const __m256 den = _mm256_add_ps(_mm256_sqrt_ps(vhat), epsv);
        __m256 wv = _mm256_loadu_ps(w + i);
        wv = _mm256_sub_ps(wv, _mm256_div_ps(_mm256_mul_ps(lrv, mhat), den));
        _mm256_storeu_ps(w + i, wv);
    }
    for (int i = n8; i < n; ++i) {
        m1[i] = b1 * m1[i] + (1.0f - b1) * g[i];
        m2[i] = b2 * m2[i] + (1.0f - b2) * g[i] * g[i];
        const float mhat = m1[i] / c1;
        const float vhat = m2[i] / c2;
        w[i] -= lr * mhat / (std::sqrt(vhat) + eps);
    }
}

} // namespace

const KernelTable* avx2_table()
{
    static const KernelTable t = {"avx2",    gemm_nt,     gemm_nn, gemm_tn_acc,
                                  relu_fwd,  relu_bwd,    sigmoid_fwd,
                                  axpy,      adam_step};
    return &t;
}

} // namespace emms::kernels
