#pragma once

namespace playlab {

// Row-major C = alpha * op(A) * op(B) + beta * C. Backed by single-threaded
// BLAS when available, with a portable fallback. Both backends accumulate in
// a fixed order, so results are reproducible run to run.
void gemm(bool trans_a, bool trans_b, int m, int n, int k, float alpha, const float* a, int lda,
          const float* b, int ldb, float beta, float* c, int ldc);
void gemm(bool trans_a, bool trans_b, int m, int n, int k, double alpha, const double* a, int lda,
          const double* b, int ldb, double beta, double* c, int ldc);

// Caps BLAS worker threads; the strict deterministic mode pins this to 1.
void set_compute_threads(int n);

} // namespace playlab
