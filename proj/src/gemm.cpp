#include "playlab/gemm.hpp"

#ifdef PLAYLAB_USE_OPENBLAS
#include <cblas-openblas.h>
#endif

namespace playlab {

#ifdef PLAYLAB_USE_OPENBLAS

void gemm(bool trans_a, bool trans_b, int m, int n, int k, float alpha, const float* a, int lda,
          const float* b, int ldb, float beta, float* c, int ldc) {
    cblas_sgemm(CblasRowMajor, trans_a ? CblasTrans : CblasNoTrans,
                trans_b ? CblasTrans : CblasNoTrans, m, n, k, alpha, a, lda, b, ldb, beta, c, ldc);
}

void gemm(bool trans_a, bool trans_b, int m, int n, int k, double alpha, const double* a, int lda,
          const double* b, int ldb, double beta, double* c, int ldc) {
    cblas_dgemm(CblasRowMajor, trans_a ? CblasTrans : CblasNoTrans,
                trans_b ? CblasTrans : CblasNoTrans, m, n, k, alpha, a, lda, b, ldb, beta, c, ldc);
}

void set_compute_threads(int n) { openblas_set_num_threads(n > 0 ? n : 1); }

#else

namespace {

template <typename T>
void gemm_ref(bool trans_a, bool trans_b, int m, int n, int k, T alpha, const T* a, int lda,
              const T* b, int ldb, T beta, T* c, int ldc) {
    auto at = [&](int i, int j) { return trans_a ? a[static_cast<size_t>(j) * lda + i]
                                                 : a[static_cast<size_t>(i) * lda + j]; };
    auto bt = [&](int i, int j) { return trans_b ? b[static_cast<size_t>(j) * ldb + i]
                                                 : b[static_cast<size_t>(i) * ldb + j]; };
    for (int i = 0; i < m; ++i) {
        T* row = c + static_cast<size_t>(i) * ldc;
        for (int j = 0; j < n; ++j) row[j] = beta == T{0} ? T{0} : row[j] * beta;
        for (int p = 0; p < k; ++p) {
            const T av = alpha * at(i, p);
            for (int j = 0; j < n; ++j) row[j] += av * bt(p, j);
        }
    }
}

} // namespace

void gemm(bool trans_a, bool trans_b, int m, int n, int k, float alpha, const float* a, int lda,
          const float* b, int ldb, float beta, float* c, int ldc) {
    gemm_ref(trans_a, trans_b, m, n, k, alpha, a, lda, b, ldb, beta, c, ldc);
}

void gemm(bool trans_a, bool trans_b, int m, int n, int k, double alpha, const double* a, int lda,
          const double* b, int ldb, double beta, double* c, int ldc) {
    gemm_ref(trans_a, trans_b, m, n, k, alpha, a, lda, b, ldb, beta, c, ldc);
}

void set_compute_threads(int) {}

#endif

} // namespace playlab
