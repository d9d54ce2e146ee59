#pragma once

#include <string>

namespace emms::kernels {

// Data-parallel float32 primitives behind the neural stack. Two
// implementations exist: a scalar reference and an AVX2 variant compiled
// into a separate translation unit; the active one is chosen at runtime
// from CPU capabilities (override with force_backend or EMMS_KERNELS).
//
// All matrices are dense row-major.
struct KernelTable {
    const char* name;

    // C[m x n] = A[m x k] * B[n x k]^T  (row-dot-row; forward pass)
    void (*gemm_nt)(int m, int n, int k, const float* a, const float* b, float* c);
    // C[m x n] = A[m x k] * B[k x n]    (input gradients)
    void (*gemm_nn)(int m, int n, int k, const float* a, const float* b, float* c);
    // C[m x n] += A[k x m]^T * B[k x n] (weight gradients, accumulating)
    void (*gemm_tn_acc)(int m, int n, int k, const float* a, const float* b, float* c);

    void (*relu_fwd)(int n, const float* x, float* y);
    // dx = dy where y > 0, else 0
    void (*relu_bwd)(int n, const float* y, const float* dy, float* dx);
    void (*sigmoid_fwd)(int n, const float* x, float* y);
    void (*axpy)(int n, float alpha, const float* x, float* y);

    // In-place Adam update of w with moment buffers m1/m2; c1 = 1 - b1^t,
    // c2 = 1 - b2^t are the bias-correction denominators.
    void (*adam_step)(int n, float* w, const float* g, float* m1, float* m2,
                      float lr, float b1, float b2, float eps, float c1, float c2);
};

const KernelTable& scalar_table();
const KernelTable* avx2_table();   // nullptr when unsupported

// Currently active table. Defaults to the best supported backend; the
// EMMS_KERNELS environment variable ("scalar"/"avx2") pins it at startup.
const KernelTable& active();
void force_backend(const std::string& name);   // "auto", "scalar", "avx2"

} // namespace emms::kernels
