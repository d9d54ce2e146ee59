#pragma once

#include <cmath>
#include <vector>

#include "emms/kernels/kernels.hpp"
#include "emms/util/parallel.hpp"

namespace emms::neural {

// Dense row-major matrix math, templated on the scalar type. The float
// instantiation routes through the runtime-dispatched kernel table and may
// split rows across threads (bitwise independent of the thread count); the
// double instantiation is a plain reference path used by gradient checks.

template <typename T>
void gemm_nt(int m, int n, int k, const T* a, const T* b, T* c)
{
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < n; ++j) {
            T acc = 0;
            for (int t = 0; t < k; ++t)
                acc += a[static_cast<std::ptrdiff_t>(i) * k + t] *
                       b[static_cast<std::ptrdiff_t>(j) * k + t];
            c[static_cast<std::ptrdiff_t>(i) * n + j] = acc;
        }
}

template <typename T>
void gemm_nn(int m, int n, int k, const T* a, const T* b, T* c)
{
    for (int i = 0; i < m; ++i) {
        T* ci = c + static_cast<std::ptrdiff_t>(i) * n;
        for (int j = 0; j < n; ++j)
            ci[j] = 0;
        for (int t = 0; t < k; ++t) {
            const T av = a[static_cast<std::ptrdiff_t>(i) * k + t];
            const T* bt = b + static_cast<std::ptrdiff_t>(t) * n;
            for (int j = 0; j < n; ++j)
                ci[j] += av * bt[j];
        }
    }
}

template <typename T>
void gemm_tn_acc(int m, int n, int k, const T* a, const T* b, T* c)
{
    for (int t = 0; t < k; ++t)
        for (int i = 0; i < m; ++i) {
            const T av = a[static_cast<std::ptrdiff_t>(t) * m + i];
            T* ci = c + static_cast<std::ptrdiff_t>(i) * n;
            const T* bt = b + static_cast<std::ptrdiff_t>(t) * n;
            for (int j = 0; j < n; ++j)
                ci[j] += av * bt[j];
        }
}

namespace detail {

// Split rows of an (m x ...) op across workers; each row is produced by
// exactly one worker with a fixed per-row accumulation order.
template <typename Fn>
void row_parallel(int m, int grain, Fn&& fn)
{
    const int workers = thread_count();
    if (workers <= 1 || m < 2 * grain) {
        fn(0, m);
        return;
    }
    const int chunks = (m + grain - 1) / grain;
    parallel_for(0, static_cast<std::size_t>(chunks), [&](std::size_t c) {
        const int r0 = static_cast<int>(c) * grain;
        fn(r0, std::min(grain, m - r0));
    });
}

} // namespace detail

template <>
inline void gemm_nt<float>(int m, int n, int k, const float* a, const float* b, float* c)
{
    const auto& kt = kernels::active();
    detail::row_parallel(m, 8, [&](int r0, int rows) {
        kt.gemm_nt(rows, n, k, a + static_cast<std::ptrdiff_t>(r0) * k, b,
                   c + static_cast<std::ptrdiff_t>(r0) * n);
    });
}

template <>
inline void gemm_nn<float>(int m, int n, int k, const float* a, const float* b, float* c)
{
    const auto& kt = kernels::active();
    detail::row_parallel(m, 8, [&](int r0, int rows) {
        kt.gemm_nn(rows, n, k, a + static_cast<std::ptrdiff_t>(r0) * k, b,
                   c + static_cast<std::ptrdiff_t>(r0) * n);
    });
}

template <>
inline void gemm_tn_acc<float>(int m, int n, int k, const float* a, const float* b, float* c)
{
    // Accumulates over the k (batch) dimension; keep serial so the result
    // does not depend on the thread count.
    kernels::active().gemm_tn_acc(m, n, k, a, b, c);
}

template <typename T>
void relu_fwd(int n, const T* x, T* y)
{
    for (int i = 0; i < n; ++i)
        y[i] = x[i] > 0 ? x[i] : 0;
}

template <typename T>
void relu_bwd(int n, const T* y, const T* dy, T* dx)
{
    for (int i = 0; i < n; ++i)
        dx[i] = y[i] > 0 ? dy[i] : 0;
}

template <typename T>
void sigmoid_fwd(int n, const T* x, T* y)
{
    for (int i = 0; i < n; ++i)
        y[i] = T(1) / (T(1) + std::exp(-x[i]));
}

template <>
inline void relu_fwd<float>(int n, const float* x, float* y)
{
    kernels::active().relu_fwd(n, x, y);
}
template <>
inline void relu_bwd<float>(int n, const float* y, const float* dy, float* dx)
{
    kernels::active().relu_bwd(n, y, dy, dx);
}
template <>
inline void sigmoid_fwd<float>(int n, const float* x, float* y)
{
    kernels::active().sigmoid_fwd(n, x, y);
}

} // namespace emms::neural
