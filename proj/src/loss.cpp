#include "playlab/loss.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "playlab/error.hpp"

namespace playlab {

double similarity_raw(const double* u, const double* v, int dim) {
    double s = 0.0;
    for (int i = 0; i < dim; ++i) {
        const double d = u[i] - v[i];
        s += d * d;
    }
    return -std::sqrt(s);
}

double similarity(const std::vector<double>& u, const std::vector<double>& v) {
    if (u.size() != v.size()) throw InputError("similarity: dimension mismatch");
    if (u.empty()) throw InputError("similarity: empty vectors");
    return similarity_raw(u.data(), v.data(), static_cast<int>(u.size()));
}

double simclr_tt_loss_from_sims(const std::vector<double>& sims, int two_n, double tau,
                                std::vector<double>* d_sims) {
    if (two_n < 4 || two_n % 2 != 0)
        throw InputError("simclr_tt_loss: need N >= 2 pairs (2N >= 4 samples)");
    if (tau <= 0.0) throw InputError("simclr_tt_loss: temperature must be positive");
    if (sims.size() != static_cast<size_t>(two_n) * two_n)
        throw InputError("simclr_tt_loss: similarity matrix shape mismatch");

    const int half = two_n / 2;
    if (d_sims != nullptr) d_sims->assign(sims.size(), 0.0);

    const double pair_weight = 1.0 / static_cast<double>(two_n);
    double total = 0.0;
    std::vector<double> logits(static_cast<size_t>(two_n));
    for (int i = 0; i < two_n; ++i) {
        const int j = (i + half) % two_n;
        // Negatives: everything except the anchor and its positive.
        double max_logit = -std::numeric_limits<double>::infinity();
        for (int k = 0; k < two_n; ++k) {
            if (k == i || k == j) continue;
            logits[static_cast<size_t>(k)] = sims[static_cast<size_t>(i) * two_n + k] / tau;
            max_logit = std::max(max_logit, logits[static_cast<size_t>(k)]);
        }
        double sum_exp = 0.0;
        for (int k = 0; k < two_n; ++k) {
            if (k == i || k == j) continue;
            sum_exp += std::exp(logits[static_cast<size_t>(k)] - max_logit);
        }
        const double lse = max_logit + std::log(sum_exp);
        total += -sims[static_cast<size_t>(i) * two_n + j] / tau + lse;

        if (d_sims != nullptr) {
            (*d_sims)[static_cast<size_t>(i) * two_n + j] -= pair_weight / tau;
            for (int k = 0; k < two_n; ++k) {
                if (k == i || k == j) continue;
                const double softmax = std::exp(logits[static_cast<size_t>(k)] - lse);
                (*d_sims)[static_cast<size_t>(i) * two_n + k] += pair_weight * softmax / tau;
            }
        }
    }
    return total * pair_weight;
}

template <typename T>
LossResult<T> simclr_tt_loss(const Tensor<T>& latents, double tau) {
    if (latents.shape.size() != 2) throw InputError("simclr_tt_loss: latents must be [2N, D]");
    const int two_n = latents.shape[0];
    const int dim = latents.shape[1];
    if (two_n < 4 || two_n % 2 != 0)
        throw InputError("simclr_tt_loss: need N >= 2 pairs (2N >= 4 samples)");

    std::vector<double> z(latents.data.begin(), latents.data.end());
    std::vector<double> sims(static_cast<size_t>(two_n) * two_n, 0.0);
    for (int i = 0; i < two_n; ++i)
        for (int j = i + 1; j < two_n; ++j) {
            const double s = similarity_raw(&z[static_cast<size_t>(i) * dim],
                                            &z[static_cast<size_t>(j) * dim], dim);
            sims[static_cast<size_t>(i) * two_n + j] = s;
            sims[static_cast<size_t>(j) * two_n + i] = s;
        }

    std::vector<double> d_sims;
    LossResult<T> result;
    result.loss = simclr_tt_loss_from_sims(sims, two_n, tau, &d_sims);

    // Chain through sim(u, v) = -|u - v|; the gradient vanishes as u -> v.
    std::vector<double> d_z(z.size(), 0.0);
    for (int i = 0; i < two_n; ++i)
        for (int k = 0; k < two_n; ++k) {
            if (i == k) continue;
            const double g = d_sims[static_cast<size_t>(i) * two_n + k];
            if (g == 0.0) continue;
            const double dist = -sims[static_cast<size_t>(i) * two_n + k];
            if (dist < 1e-12) continue;
            for (int d = 0; d < dim; ++d) {
                const double diff = (z[static_cast<size_t>(i) * dim + d] -
                                     z[static_cast<size_t>(k) * dim + d]) /
                                    dist;
                d_z[static_cast<size_t>(i) * dim + d] -= g * diff;
                d_z[static_cast<size_t>(k) * dim + d] += g * diff;
            }
        }

    result.d_latents = Tensor<T>({two_n, dim});
    for (size_t i = 0; i < d_z.size(); ++i) result.d_latents.data[i] = static_cast<T>(d_z[i]);
    return result;
}

template LossResult<float> simclr_tt_loss(const Tensor<float>&, double);
template LossResult<double> simclr_tt_loss(const Tensor<double>&, double);

} // namespace playlab
