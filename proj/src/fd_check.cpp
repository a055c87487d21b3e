#include "playlab/fd_check.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "playlab/encoder.hpp"
#include "playlab/error.hpp"
#include "playlab/gemm.hpp"
#include "playlab/loss.hpp"
#include "playlab/rng.hpp"

namespace playlab {

namespace {

double rel_error(double a, double b) {
    return std::fabs(a - b) / std::max({std::fabs(a), std::fabs(b), 1e-12});
}

// Probes 5 random elements of `values`: central difference of `scalar_fn`
// versus the provided analytic gradient.
double probe_tensor(std::vector<double>& values, const std::vector<double>& analytic,
                    const std::function<double()>& scalar_fn, Rng& rng, double epsilon) {
    double worst = 0.0;
    const int probes = std::min<size_t>(5, values.size());
    for (int p = 0; p < probes; ++p) {
        const size_t idx = rng.uniform_int(values.size());
        const double saved = values[idx];
        values[idx] = saved + epsilon;
        const double plus = scalar_fn();
        values[idx] = saved - epsilon;
        const double minus = scalar_fn();
        values[idx] = saved;
        const double numeric = (plus - minus) / (2.0 * epsilon);
        worst = std::max(worst, rel_error(analytic[idx], numeric));
    }
    return worst;
}

std::vector<double> random_vector(size_t n, Rng& rng, double lo, double hi) {
    std::vector<double> v(n);
    for (auto& x : v) x = rng.uniform(lo, hi);
    return v;
}

// y = x W^T + b with a fixed linear readout as the scalar loss; checks the
// gemm-based forward/backward path used by the encoder's linear layer.
double check_linear(Rng& rng) {
    const int batch = 3, in_dim = 7, out_dim = 5;
    std::vector<double> x = random_vector(static_cast<size_t>(batch) * in_dim, rng, -1.0, 1.0);
    std::vector<double> w = random_vector(static_cast<size_t>(out_dim) * in_dim, rng, -1.0, 1.0);
    std::vector<double> b = random_vector(static_cast<size_t>(out_dim), rng, -0.5, 0.5);
    const std::vector<double> readout =
        random_vector(static_cast<size_t>(batch) * out_dim, rng, -1.0, 1.0);

    auto scalar_fn = [&]() {
        std::vector<double> y(static_cast<size_t>(batch) * out_dim, 0.0);
        gemm(false, true, batch, out_dim, in_dim, 1.0, x.data(), in_dim, w.data(), in_dim, 0.0,
             y.data(), out_dim);
        double total = 0.0;
        for (int i = 0; i < batch; ++i)
            for (int o = 0; o < out_dim; ++o) {
                const size_t idx = static_cast<size_t>(i) * out_dim + o;
                total += readout[idx] * (y[idx] + b[static_cast<size_t>(o)]);
            }
        return total;
    };

    // Analytic: dW = readout^T x, db = column sums, dx = readout W.
    std::vector<double> d_w(w.size(), 0.0), d_x(x.size(), 0.0), d_b(b.size(), 0.0);
    gemm(true, false, out_dim, in_dim, batch, 1.0, readout.data(), out_dim, x.data(), in_dim, 0.0,
         d_w.data(), in_dim);
    gemm(false, false, batch, in_dim, out_dim, 1.0, readout.data(), out_dim, w.data(), in_dim, 0.0,
         d_x.data(), in_dim);
    for (int i = 0; i < batch; ++i)
        for (int o = 0; o < out_dim; ++o)
            d_b[static_cast<size_t>(o)] += readout[static_cast<size_t>(i) * out_dim + o];

    double worst = probe_tensor(w, d_w, scalar_fn, rng, 1e-5);
    worst = std::max(worst, probe_tensor(x, d_x, scalar_fn, rng, 1e-5));
    worst = std::max(worst, probe_tensor(b, d_b, scalar_fn, rng, 1e-5));
    return worst;
}

double check_avgpool(Rng& rng) {
    const int channels = 4, spatial = 9;
    std::vector<double> x = random_vector(static_cast<size_t>(channels) * spatial, rng, -1.0, 1.0);
    const std::vector<double> readout = random_vector(static_cast<size_t>(channels), rng, -1.0, 1.0);
    auto scalar_fn = [&]() {
        double total = 0.0;
        for (int c = 0; c < channels; ++c) {
            double mean = 0.0;
            for (int p = 0; p < spatial; ++p) mean += x[static_cast<size_t>(c) * spatial + p];
            total += readout[static_cast<size_t>(c)] * mean / spatial;
        }
        return total;
    };
    std::vector<double> d_x(x.size());
    for (int c = 0; c < channels; ++c)
        for (int p = 0; p < spatial; ++p)
            d_x[static_cast<size_t>(c) * spatial + p] = readout[static_cast<size_t>(c)] / spatial;
    return probe_tensor(x, d_x, scalar_fn, rng, 1e-5);
}

// Pre-activations are kept away from the kink (|x| >= 0.05).
double check_relu(Rng& rng) {
    const int n = 64;
    std::vector<double> x(n);
    for (auto& v : x) {
        v = rng.uniform(0.05, 1.0);
        if (rng.uniform() < 0.5) v = -v;
    }
    const std::vector<double> readout = random_vector(static_cast<size_t>(n), rng, -1.0, 1.0);
    auto scalar_fn = [&]() {
        double total = 0.0;
        for (int i = 0; i < n; ++i)
            total += readout[static_cast<size_t>(i)] * std::max(0.0, x[static_cast<size_t>(i)]);
        return total;
    };
    std::vector<double> d_x(x.size());
    for (int i = 0; i < n; ++i)
        d_x[static_cast<size_t>(i)] = x[static_cast<size_t>(i)] > 0.0 ? readout[static_cast<size_t>(i)] : 0.0;
    return probe_tensor(x, d_x, scalar_fn, rng, 1e-4);
}

// Mask held fixed across evaluations: backward must replay it exactly.
double check_dropout(Rng& rng) {
    const int n = 64;
    const double keep_scale = 2.0; // p = 0.5, inverted scaling
    std::vector<double> x = random_vector(static_cast<size_t>(n), rng, -1.0, 1.0);
    std::vector<uint8_t> mask(static_cast<size_t>(n));
    for (auto& m : mask) m = rng.uniform() < 0.5 ? 0 : 1;
    const std::vector<double> readout = random_vector(static_cast<size_t>(n), rng, -1.0, 1.0);
    auto scalar_fn = [&]() {
        double total = 0.0;
        for (int i = 0; i < n; ++i)
            total += readout[static_cast<size_t>(i)] *
                     (mask[static_cast<size_t>(i)] ? x[static_cast<size_t>(i)] * keep_scale : 0.0);
        return total;
    };
    std::vector<double> d_x(x.size());
    for (int i = 0; i < n; ++i)
        d_x[static_cast<size_t>(i)] =
            mask[static_cast<size_t>(i)] ? readout[static_cast<size_t>(i)] * keep_scale : 0.0;
    return probe_tensor(x, d_x, scalar_fn, rng, 1e-5);
}

// One conv layer via the production im2col/gemm/col2im kernels.
double check_conv_layer(int layer_index, Rng& rng) {
    const ConvSpec spec = kEncoderConvSpecs[static_cast<size_t>(layer_index)];
    ConvShape s;
    s.in_c = layer_index == 0 ? 3 : 4;
    s.out_c = 5;
    s.kernel = spec.kernel;
    s.stride = spec.stride;
    s.pad = spec.padding;
    s.in_h = std::max(spec.kernel, 6);
    s.in_w = std::max(spec.kernel, 7);
    s.out_h = conv_output_size(s.in_h, s.kernel, s.stride, s.pad);
    s.out_w = conv_output_size(s.in_w, s.kernel, s.stride, s.pad);
    const int batch = 2;
    const int patch = s.in_c * s.kernel * s.kernel;
    const size_t n_cols = static_cast<size_t>(batch) * s.out_h * s.out_w;

    std::vector<double> x =
        random_vector(static_cast<size_t>(s.in_c) * batch * s.in_h * s.in_w, rng, -1.0, 1.0);
    std::vector<double> w = random_vector(static_cast<size_t>(s.out_c) * patch, rng, -0.5, 0.5);
    std::vector<double> b = random_vector(static_cast<size_t>(s.out_c), rng, -0.2, 0.2);
    const std::vector<double> readout =
        random_vector(static_cast<size_t>(s.out_c) * n_cols, rng, -1.0, 1.0);

    auto forward_cols = [&](std::vector<double>& cols) {
        cols.assign(static_cast<size_t>(patch) * n_cols, 0.0);
        layers::im2col(x.data(), s.in_c, batch, s.in_h, s.in_w, s, cols.data());
    };
    auto scalar_fn = [&]() {
        std::vector<double> cols;
        forward_cols(cols);
        std::vector<double> y(static_cast<size_t>(s.out_c) * n_cols, 0.0);
        gemm(false, false, s.out_c, static_cast<int>(n_cols), patch, 1.0, w.data(), patch,
             cols.data(), static_cast<int>(n_cols), 0.0, y.data(), static_cast<int>(n_cols));
        double total = 0.0;
        for (int m = 0; m < s.out_c; ++m)
            for (size_t j = 0; j < n_cols; ++j)
                total += readout[static_cast<size_t>(m) * n_cols + j] *
                         (y[static_cast<size_t>(m) * n_cols + j] + b[static_cast<size_t>(m)]);
        return total;
    };

    // Analytic gradients through the same kernels.
    std::vector<double> cols;
    forward_cols(cols);
    std::vector<double> d_w(w.size(), 0.0);
    gemm(false, true, s.out_c, patch, static_cast<int>(n_cols), 1.0, readout.data(),
         static_cast<int>(n_cols), cols.data(), static_cast<int>(n_cols), 0.0, d_w.data(), patch);
    std::vector<double> d_b(b.size(), 0.0);
    for (int m = 0; m < s.out_c; ++m)
        for (size_t j = 0; j < n_cols; ++j)
            d_b[static_cast<size_t>(m)] += readout[static_cast<size_t>(m) * n_cols + j];
    std::vector<double> d_cols(cols.size(), 0.0);
    gemm(true, false, patch, static_cast<int>(n_cols), s.out_c, 1.0, w.data(), patch,
         readout.data(), static_cast<int>(n_cols), 0.0, d_cols.data(), static_cast<int>(n_cols));
    std::vector<double> d_x(x.size(), 0.0);
    layers::col2im(d_cols.data(), s.in_c, batch, s.in_h, s.in_w, s, d_x.data());

    double worst = probe_tensor(w, d_w, scalar_fn, rng, 1e-5);
    worst = std::max(worst, probe_tensor(b, d_b, scalar_fn, rng, 1e-5));
    worst = std::max(worst, probe_tensor(x, d_x, scalar_fn, rng, 1e-5));
    return worst;
}

double check_loss(Rng& rng) {
    const int n_pairs = 4, dim = 6;
    Tensor<double> latents({2 * n_pairs, dim});
    for (auto& v : latents.data) v = rng.uniform(-1.0, 1.0);
    const double tau = 0.5;
    auto scalar_fn = [&]() { return simclr_tt_loss(latents, tau).loss; };
    const LossResult<double> result = simclr_tt_loss(latents, tau);
    std::vector<double> analytic(result.d_latents.data.begin(), result.d_latents.data.end());
    std::vector<double>& values = latents.data;
    return probe_tensor(values, analytic, scalar_fn, rng, 1e-6);
}

// Full image -> latents -> contrastive-loss pipeline, dropout masks replayed
// identically on every evaluation.
double check_encoder_pipeline(Rng& rng) {
    const int n_pairs = 2, in_h = 16, in_w = 16, latent_dim = 6;
    const uint64_t mask_seed = rng.next_u64();
    EncoderParams<double> params = EncoderParams<double>::initialize(latent_dim, rng.next_u64());
    Tensor<double> images({2 * n_pairs, 3, in_h, in_w});
    for (auto& v : images.data) v = rng.uniform(0.0, 1.0);
    const double tau = 0.5;

    auto forward_loss = [&](GradientTape<double>* tape) {
        Rng mask_rng(mask_seed);
        const Tensor<double> latents =
            encoder_forward(params, images, EncoderMode::Train, &mask_rng, tape);
        return simclr_tt_loss(latents, tau);
    };
    auto scalar_fn = [&]() { return forward_loss(nullptr).loss; };

    GradientTape<double> tape;
    Rng mask_rng(mask_seed);
    const Tensor<double> latents =
        encoder_forward(params, images, EncoderMode::Train, &mask_rng, &tape);
    const LossResult<double> loss = simclr_tt_loss(latents, tau);
    Tensor<double> d_input;
    const EncoderGrads<double> grads = encoder_backward(params, tape, loss.d_latents, &d_input);

    double worst = 0.0;
    auto tensors = params.tensors();
    for (size_t t = 0; t < tensors.size(); ++t) {
        std::vector<double> analytic(grads.tensors[t].data.begin(), grads.tensors[t].data.end());
        worst = std::max(worst, probe_tensor(tensors[t]->data, analytic, scalar_fn, rng, 1e-4));
    }
    std::vector<double> d_input_flat(d_input.data.begin(), d_input.data.end());
    worst = std::max(worst, probe_tensor(images.data, d_input_flat, scalar_fn, rng, 1e-4));
    return worst;
}

struct OpEntry {
    const char* name;
    double tolerance;
    double (*fn)(Rng&);
};

double check_conv1(Rng& rng) { return check_conv_layer(0, rng); }
double check_conv2(Rng& rng) { return check_conv_layer(1, rng); }
double check_conv3(Rng& rng) { return check_conv_layer(2, rng); }
double check_conv4(Rng& rng) { return check_conv_layer(3, rng); }

constexpr OpEntry kOps[] = {
    {"linear", 1e-6, check_linear},
    {"avgpool", 1e-6, check_avgpool},
    {"relu", 1e-6, check_relu},
    {"dropout", 1e-6, check_dropout},
    {"conv1", 1e-3, check_conv1},
    {"conv2", 1e-3, check_conv2},
    {"conv3", 1e-3, check_conv3},
    {"conv4", 1e-3, check_conv4},
    {"loss", 1e-6, check_loss},
    {"encoder", 1e-3, check_encoder_pipeline},
};

} // namespace

std::vector<std::string> fd_check_op_names() {
    std::vector<std::string> names;
    for (const auto& op : kOps) names.emplace_back(op.name);
    return names;
}

FdReport finite_difference_check(const std::string& op_name, double tolerance) {
    for (const auto& op : kOps) {
        if (op_name == op.name) {
            Rng rng(Rng::hash_str(op_name) ^ 0x5eedULL);
            FdReport report;
            report.op_name = op_name;
            report.tolerance = tolerance;
            report.max_rel_error = op.fn(rng);
            report.pass = report.max_rel_error <= tolerance;
            return report;
        }
    }
    throw ConfigError("finite_difference_check: unknown op '" + op_name + "'");
}

FdReport finite_difference_check(const std::string& op_name) {
    for (const auto& op : kOps)
        if (op_name == op.name) return finite_difference_check(op_name, op.tolerance);
    throw ConfigError("finite_difference_check: unknown op '" + op_name + "'");
}

std::vector<FdReport> run_all_fd_checks() {
    std::vector<FdReport> reports;
    for (const auto& op : kOps) reports.push_back(finite_difference_check(op.name));
    return reports;
}

} // namespace playlab
