#pragma once

#include <vector>

#include "playlab/tensor.hpp"

namespace playlab {

// Similarity between latent vectors: negative Euclidean distance. Symmetric,
// non-positive, zero iff the vectors coincide.
double similarity(const std::vector<double>& u, const std::vector<double>& v);
double similarity_raw(const double* u, const double* v, int dim);

// Time-contrastive loss on a similarity matrix. `sims` is row-major
// (2N x 2N); the partner of row i is (i + N) mod 2N. For each anchor the
// positive's similarity is the numerator and the 2N-2 entries excluding the
// anchor and its positive form the denominator (log-sum-exp with max
// subtraction). Returns the mean over all 2N ordered pairs and, when
// requested, d(loss)/d(sims).
double simclr_tt_loss_from_sims(const std::vector<double>& sims, int two_n, double tau,
                                std::vector<double>* d_sims);

template <typename T>
struct LossResult {
    double loss = 0.0;
    Tensor<T> d_latents;
};

// latents: [2N, latent_dim], anchors in rows 0..N-1, positives in N..2N-1.
// The scalar loss and the similarity algebra run in double regardless of T.
template <typename T>
LossResult<T> simclr_tt_loss(const Tensor<T>& latents, double tau);

extern template LossResult<float> simclr_tt_loss(const Tensor<float>&, double);
extern template LossResult<double> simclr_tt_loss(const Tensor<double>&, double);

} // namespace playlab
