#include "playlab/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <numeric>
#include <set>

#include "playlab/error.hpp"
#include "playlab/loss.hpp"
#include "playlab/retina.hpp"
#include "playlab/trainer.hpp"

namespace playlab {

ProbeDataset build_probe_dataset(ProbeSplit split, const SceneGraph& scene,
                                 const std::vector<ToyObject>& catalog,
                                 const ProbeDatasetConfig& cfg, uint64_t seed) {
    if (catalog.empty()) throw ConfigError("build_probe_dataset: empty catalog");
    if (scene.locations.empty()) throw ConfigError("build_probe_dataset: scene has no locations");
    if (cfg.size < 1) throw ConfigError("build_probe_dataset: size must be positive");
    if (cfg.size < 1200 && !cfg.quiet)
        std::cerr << "note: probe dataset size " << cfg.size
                  << " is below the 1200-image reference protocol (desk-scale run)\n";

    // Slot lookup by global background id.
    struct SlotRef {
        const PlayLocation* location;
        const ObjectSlot* slot;
    };
    std::vector<SlotRef> slots;
    for (const auto& loc : scene.locations)
        for (const auto& s : loc.slots) slots.push_back({&loc, &s});

    const int n_classes = static_cast<int>(catalog.size());
    const int n_backgrounds = static_cast<int>(slots.size());

    // Class and background streams are balanced independently (counts +-1);
    // shuffling the background stream breaks any class/background locking.
    Rng rng = Rng(seed).child(split == ProbeSplit::Validation ? "probe_val" : "probe_test");
    std::vector<int> class_of(static_cast<size_t>(cfg.size));
    std::vector<int> background_of(static_cast<size_t>(cfg.size));
    for (int i = 0; i < cfg.size; ++i) {
        class_of[static_cast<size_t>(i)] = i % n_classes;
        background_of[static_cast<size_t>(i)] = i % n_backgrounds;
    }
    for (size_t i = background_of.size(); i > 1; --i)
        std::swap(background_of[i - 1], background_of[rng.uniform_int(i)]);

    ProbeDataset dataset;
    dataset.split = split;
    dataset.n_classes = n_classes;
    dataset.n_backgrounds = n_backgrounds;
    dataset.frames.reserve(static_cast<size_t>(cfg.size));

    for (int i = 0; i < cfg.size; ++i) {
        const int cls = class_of[static_cast<size_t>(i)];
        const SlotRef ref = slots[static_cast<size_t>(background_of[static_cast<size_t>(i)])];
        const Vec3 agent_eye = ref.location->center + Vec3{0.0f, kAgentEyeHeight, 0.0f};

        const float azimuth = static_cast<float>(rng.uniform(0.0, 360.0));
        const auto [saccade_yaw, saccade_pitch] = sample_saccade(cfg.saccade, rng);
        const CameraPose pose =
            pose_camera(agent_eye, *ref.slot, saccade_yaw, saccade_pitch, cfg.distance, cfg.render);
        const Vec3 object_pos =
            scaled_object_position(agent_eye, ref.slot->position, cfg.distance.factor);

        FrameLabels labels;
        labels.object_label = catalog[static_cast<size_t>(cls)].class_id;
        labels.background_label = ref.slot->background_id;
        labels.location_label = ref.location->id;

        std::vector<RenderPlacement> placements{
            {&catalog[static_cast<size_t>(cls)].mesh, object_pos, azimuth,
             catalog[static_cast<size_t>(cls)].class_id}};
        RetinalFrame raw = render_view(scene, placements, pose, cfg.render,
                                       length(object_pos - agent_eye), labels);
        dataset.frames.push_back(apply_retinal_pipeline(raw, cfg.aperture, cfg.foveation));
        dataset.object_labels.push_back(cls);
        dataset.background_labels.push_back(ref.slot->background_id);
    }
    return dataset;
}

namespace {

struct LogisticWorkspace {
    std::vector<double> grad_w; // [C, d]
    std::vector<double> grad_b; // [C]
};

double logistic_loss_and_grad(const std::vector<double>& x, const std::vector<int>& y, int n,
                              int dim, int n_classes, const std::vector<double>& w,
                              const std::vector<double>& b, double l2, LogisticWorkspace* ws) {
    const bool want_grad = ws != nullptr;
    if (want_grad) {
        ws->grad_w.assign(static_cast<size_t>(n_classes) * dim, 0.0);
        ws->grad_b.assign(static_cast<size_t>(n_classes), 0.0);
    }
    double total = 0.0;
    std::vector<double> logits(static_cast<size_t>(n_classes));
    for (int i = 0; i < n; ++i) {
        const double* xi = &x[static_cast<size_t>(i) * dim];
        double max_logit = -std::numeric_limits<double>::infinity();
        for (int c = 0; c < n_classes; ++c) {
            double v = b[static_cast<size_t>(c)];
            const double* wc = &w[static_cast<size_t>(c) * dim];
            for (int d = 0; d < dim; ++d) v += wc[d] * xi[d];
            logits[static_cast<size_t>(c)] = v;
            max_logit = std::max(max_logit, v);
        }
        double sum_exp = 0.0;
        for (int c = 0; c < n_classes; ++c)
            sum_exp += std::exp(logits[static_cast<size_t>(c)] - max_logit);
        const double lse = max_logit + std::log(sum_exp);
        total += lse - logits[static_cast<size_t>(y[static_cast<size_t>(i)])];
        if (want_grad) {
            for (int c = 0; c < n_classes; ++c) {
                const double p = std::exp(logits[static_cast<size_t>(c)] - lse) -
                                 (c == y[static_cast<size_t>(i)] ? 1.0 : 0.0);
                double* gw = &ws->grad_w[static_cast<size_t>(c) * dim];
                for (int d = 0; d < dim; ++d) gw[d] += p * xi[d];
                ws->grad_b[static_cast<size_t>(c)] += p;
            }
        }
    }
    const double inv_n = 1.0 / static_cast<double>(n);
    total *= inv_n;
    double reg = 0.0;
    for (const double v : w) reg += v * v;
    total += 0.5 * l2 * reg;
    if (want_grad) {
        for (size_t i = 0; i < ws->grad_w.size(); ++i)
            ws->grad_w[i] = ws->grad_w[i] * inv_n + l2 * w[i];
        for (auto& g : ws->grad_b) g *= inv_n;
    }
    return total;
}

constexpr double kProbeL2 = 1e-4;
constexpr int kProbeMaxIters = 5000;
constexpr double kProbeTolerance = 1e-6;
constexpr int kProbeToleranceWindow = 10;

} // namespace

LinearProbe fit_linear_probe(const Tensor<float>& latents, const std::vector<int>& labels,
                             int n_classes, ProbeTarget target) {
    if (latents.shape.size() != 2) throw InputError("fit_linear_probe: latents must be [n, d]");
    const int n = latents.shape[0], dim = latents.shape[1];
    if (static_cast<size_t>(n) != labels.size())
        throw InputError("fit_linear_probe: latents/labels size mismatch");
    std::set<int> distinct(labels.begin(), labels.end());
    if (distinct.size() < 2) throw InputError("fit_linear_probe: need at least two classes");
    for (const int y : labels)
        if (y < 0 || y >= n_classes) throw InputError("fit_linear_probe: label out of range");

    std::vector<double> x(latents.data.begin(), latents.data.end());
    std::vector<double> w(static_cast<size_t>(n_classes) * dim, 0.0);
    std::vector<double> b(static_cast<size_t>(n_classes), 0.0);

    LogisticWorkspace ws;
    double loss = logistic_loss_and_grad(x, labels, n, dim, n_classes, w, b, kProbeL2, &ws);
    std::vector<double> history{loss};
    double step_size = 1.0;

    for (int iter = 0; iter < kProbeMaxIters; ++iter) {
        double grad_sq = 0.0;
        for (const double g : ws.grad_w) grad_sq += g * g;
        for (const double g : ws.grad_b) grad_sq += g * g;
        if (grad_sq < 1e-18) break;

        // Backtracking Armijo line search keeps the loss non-increasing.
        std::vector<double> w_trial(w.size()), b_trial(b.size());
        double trial_loss = 0.0;
        double t = step_size;
        bool accepted = false;
        for (int back = 0; back < 60; ++back) {
            for (size_t i = 0; i < w.size(); ++i) w_trial[i] = w[i] - t * ws.grad_w[i];
            for (size_t i = 0; i < b.size(); ++i) b_trial[i] = b[i] - t * ws.grad_b[i];
            trial_loss = logistic_loss_and_grad(x, labels, n, dim, n_classes, w_trial, b_trial,
                                                kProbeL2, nullptr);
            if (trial_loss <= loss - 1e-4 * t * grad_sq) {
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if (!accepted) break;
        w.swap(w_trial);
        b.swap(b_trial);
        loss = trial_loss;
        step_size = std::min(t * 1.5, 1e3);
        history.push_back(loss);

        const size_t k = history.size() - 1;
        if (k >= static_cast<size_t>(kProbeToleranceWindow) &&
            history[k - kProbeToleranceWindow] - history[k] < kProbeTolerance)
            break;
        loss = logistic_loss_and_grad(x, labels, n, dim, n_classes, w, b, kProbeL2, &ws);
    }

    LinearProbe probe;
    probe.n_classes = n_classes;
    probe.target = target;
    probe.weight = Tensor<double>({n_classes, dim});
    probe.weight.data = std::move(w);
    probe.bias = Tensor<double>({n_classes});
    probe.bias.data = std::move(b);
    return probe;
}

double probe_accuracy_on(const LinearProbe& probe, const Tensor<float>& latents,
                         const std::vector<int>& labels) {
    const int n = latents.shape[0], dim = latents.shape[1];
    if (dim != probe.weight.shape[1]) throw InputError("probe_accuracy_on: dimension mismatch");
    if (static_cast<size_t>(n) != labels.size())
        throw InputError("probe_accuracy_on: latents/labels size mismatch");
    int correct = 0;
    for (int i = 0; i < n; ++i) {
        int best = 0;
        double best_score = -std::numeric_limits<double>::infinity();
        for (int c = 0; c < probe.n_classes; ++c) {
            double v = probe.bias.data[static_cast<size_t>(c)];
            for (int d = 0; d < dim; ++d)
                v += probe.weight.data[static_cast<size_t>(c) * dim + d] *
                     static_cast<double>(latents.data[static_cast<size_t>(i) * dim + d]);
            if (v > best_score) {
                best_score = v;
                best = c;
            }
        }
        if (best == labels[static_cast<size_t>(i)]) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(n);
}

ProbeEvalResult fit_and_eval_probe(const Tensor<float>& latents, const std::vector<int>& labels,
                                   int n_classes, ProbeTarget target, uint64_t split_seed) {
    const int n = latents.shape[0];
    const int dim = latents.shape[1];
    if (n < 5) throw InputError("fit_and_eval_probe: dataset too small for a split");

    std::vector<size_t> order(static_cast<size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    Rng rng = Rng(split_seed).child("probe_split");
    for (size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.uniform_int(i)]);

    const int n_fit = (n * 4) / 5;
    auto subset = [&](size_t begin, size_t end, Tensor<float>* xs, std::vector<int>* ys) {
        *xs = Tensor<float>({static_cast<int>(end - begin), dim});
        ys->clear();
        for (size_t i = begin; i < end; ++i) {
            const size_t src = order[i];
            std::copy(latents.data.begin() + static_cast<long>(src * static_cast<size_t>(dim)),
                      latents.data.begin() + static_cast<long>((src + 1) * static_cast<size_t>(dim)),
                      xs->data.begin() + static_cast<long>((i - begin) * static_cast<size_t>(dim)));
            ys->push_back(labels[src]);
        }
    };
    Tensor<float> fit_x, eval_x;
    std::vector<int> fit_y, eval_y;
    subset(0, static_cast<size_t>(n_fit), &fit_x, &fit_y);
    subset(static_cast<size_t>(n_fit), static_cast<size_t>(n), &eval_x, &eval_y);

    ProbeEvalResult result;
    result.probe = fit_linear_probe(fit_x, fit_y, n_classes, target);
    result.accuracy = probe_accuracy_on(result.probe, eval_x, eval_y);
    return result;
}

Image saliency_map(const EncoderParams<float>& params, const RetinalFrame& frame,
                   const RetinalFrame& positive,
                   const std::vector<const RetinalFrame*>& negatives, double tau) {
    std::vector<const RetinalFrame*> all{&frame, &positive};
    for (const auto* neg : negatives) all.push_back(neg);
    const Tensor<float> images = frames_to_tensor(all);

    GradientTape<float> tape;
    const Tensor<float> latents =
        encoder_forward<float>(params, images, EncoderMode::Eval, nullptr, &tape);

    // Single-pair loss: anchor row 0, positive row 1, the rest negatives.
    const int total = latents.shape[0], dim = latents.shape[1];
    std::vector<double> z(latents.data.begin(), latents.data.end());
    std::vector<double> sims(static_cast<size_t>(total), 0.0); // sims[k] = sim(z0, zk)
    for (int k = 1; k < total; ++k)
        sims[static_cast<size_t>(k)] = similarity_raw(&z[0], &z[static_cast<size_t>(k) * dim], dim);

    std::vector<double> d_sims(static_cast<size_t>(total), 0.0);
    d_sims[1] = -1.0 / tau;
    if (total > 2) {
        double max_logit = -std::numeric_limits<double>::infinity();
        for (int k = 2; k < total; ++k)
            max_logit = std::max(max_logit, sims[static_cast<size_t>(k)] / tau);
        double sum_exp = 0.0;
        for (int k = 2; k < total; ++k)
            sum_exp += std::exp(sims[static_cast<size_t>(k)] / tau - max_logit);
        const double lse = max_logit + std::log(sum_exp);
        for (int k = 2; k < total; ++k)
            d_sims[static_cast<size_t>(k)] = std::exp(sims[static_cast<size_t>(k)] / tau - lse) / tau;
    }

    Tensor<float> d_latents({total, dim});
    for (int k = 1; k < total; ++k) {
        const double g = d_sims[static_cast<size_t>(k)];
        if (g == 0.0) continue;
        const double dist = -sims[static_cast<size_t>(k)];
        if (dist < 1e-12) continue;
        for (int d = 0; d < dim; ++d) {
            const double diff =
                (z[static_cast<size_t>(d)] - z[static_cast<size_t>(k) * dim + d]) / dist;
            d_latents.data[static_cast<size_t>(d)] += static_cast<float>(-g * diff);
            d_latents.data[static_cast<size_t>(k) * dim + d] += static_cast<float>(g * diff);
        }
    }

    Tensor<float> d_input;
    encoder_backward(params, tape, d_latents, &d_input);

    const int w = frame.width(), h = frame.height();
    const size_t hw = static_cast<size_t>(w) * h;
    Image map(w, h, 1);
    float peak = 0.0f;
    for (size_t p = 0; p < hw; ++p) {
        float m = 0.0f;
        for (int c = 0; c < 3; ++c)
            m = std::max(m, std::fabs(d_input.data[static_cast<size_t>(c) * hw + p]));
        map.data[p] = m;
        peak = std::max(peak, m);
    }
    if (peak > 0.0f)
        for (auto& v : map.data) v /= peak;
    return map;
}

} // namespace playlab
