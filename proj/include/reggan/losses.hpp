#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>

#include "reggan/core.hpp"
#include "reggan/tape.hpp"
#include "reggan/warp.hpp"

namespace reggan::losses {

enum class GanLoss { vanilla, least_squares };

GanLoss parse_gan_loss(const std::string& s);
std::string to_string(GanLoss g);

/// Per-term weights (lambda). Defaults are the training weights used
/// throughout: adv 1, l1 100, cyc 10, corr 20, smooth 10.
struct LossWeights {
    double adv = 1.0;
    double l1 = 100.0;
    double cyc = 10.0;
    double corr = 20.0;
    double smooth = 10.0;

    void validate() const {
        if (adv < 0 || l1 < 0 || cyc < 0 || corr < 0 || smooth < 0) {
            throw DataError("loss weights must be non-negative");
        }
    }
};

/// Raw (unweighted) per-term values for one step; absent terms were inactive.
struct LossReport {
    std::optional<double> adv_d;
    std::optional<double> adv_g;
    std::optional<double> l1;
    std::optional<double> cyc;
    std::optional<double> corr;
    std::optional<double> smooth;
    double total = 0.0;

    bool all_finite() const;
    /// Name of the first non-finite term, empty when all finite.
    std::string first_non_finite() const;
};

/// Weighted sum over the active terms (adv_d excluded: it belongs to the
/// discriminator objective, not the generator-side total).
LossReport total_loss(LossReport terms, const LossWeights& weights);

// ---------------------------------------------------------------------------
// Tape builders (used by training; differentiable).
// ---------------------------------------------------------------------------

/// Discriminator objective on raw patch score grids. Vanilla form is the
/// negated log objective -mean log sig(d_real) - mean log(1 - sig(d_fake)),
/// evaluated through the exactly-stable softplus identity.
template <class T>
int adv_disc(nn::TapeT<T>& t, int d_real, int d_fake, GanLoss kind = GanLoss::vanilla) {
    if (kind == GanLoss::vanilla) {
        const int lr = nn::mean_softplus(t, d_real, T(-1));
        const int lf = nn::mean_softplus(t, d_fake, T(1));
        return nn::weighted_sum(t, {{T(1), lr}, {T(1), lf}});
    }
    const int lr = nn::mean_square_error(t, d_real, T(1));
    const int lf = nn::mean_square_error(t, d_fake, T(0));
    return nn::weighted_sum(t, {{T(0.5), lr}, {T(0.5), lf}});
}

/// Non-saturating generator term: -mean log sig(d_fake).
template <class T>
int adv_gen(nn::TapeT<T>& t, int d_fake, GanLoss kind = GanLoss::vanilla) {
    if (kind == GanLoss::vanilla) return nn::mean_softplus(t, d_fake, T(-1));
    return nn::mean_square_error(t, d_fake, T(1));
}

/// Mean absolute difference over all pixels.
template <class T>
int l1(nn::TapeT<T>& t, int pred, int target) {
    return nn::mean_abs_diff(t, pred, target);
}

/// mean|F(G(x)) - x| + mean|G(F(y)) - y| for graph-builder callables G, F.
template <class T, class GFn, class FFn>
int cycle(nn::TapeT<T>& t, int x, int y, GFn&& g, FFn&& f) {
    const int forward = nn::mean_abs_diff(t, f(t, g(t, x)), x);
    const int backward = nn::mean_abs_diff(t, g(t, f(t, y)), y);
    return nn::weighted_sum(t, {{T(1), forward}, {T(1), backward}});
}

/// field = R(gen_out, noisy); loss = mean|noisy - resample(gen_out, field)|.
/// Returns {loss node, field node} so the smoothness term can reuse the field.
template <class T, class RFn>
std::pair<int, int> correction(nn::TapeT<T>& t, int gen_out, int noisy_target, RFn&& r) {
    const int field = r(t, gen_out, noisy_target);
    const int warped = nn::resample(t, gen_out, field);
    const int loss = nn::mean_abs_diff(t, noisy_target, warped);
    return {loss, field};
}

template <class T>
int smoothness_loss(nn::TapeT<T>& t, int field) {
    return nn::smoothness(t, field);
}

// ---------------------------------------------------------------------------
// Plain double-precision values (oracle-facing convenience API).
// ---------------------------------------------------------------------------

double l1_loss(const Image& pred, const Image& target);

/// (gen_term, disc_term) from raw score grids.
std::pair<double, double> adversarial_loss(const std::vector<double>& d_real,
                                           const std::vector<double>& d_fake,
                                           GanLoss kind = GanLoss::vanilla);

double smoothness_loss(const DeformationField& field);

} // namespace reggan::losses
