#include "reggan/losses.hpp"

#include <cmath>

namespace reggan::losses {

GanLoss parse_gan_loss(const std::string& s) {
    if (s == "vanilla") return GanLoss::vanilla;
    if (s == "least_squares" || s == "lsgan") return GanLoss::least_squares;
    throw DataError("unknown gan loss '" + s + "' (expected vanilla or least_squares)");
}

std::string to_string(GanLoss g) {
    return g == GanLoss::vanilla ? "vanilla" : "least_squares";
}

bool LossReport::all_finite() const {
    return first_non_finite().empty() && std::isfinite(total);
}

std::string LossReport::first_non_finite() const {
    auto bad = [](const std::optional<double>& x) { return x && !std::isfinite(*x); };
    if (bad(adv_d)) return "adv_d";
    if (bad(adv_g)) return "adv_g";
    if (bad(l1)) return "l1";
    if (bad(cyc)) return "cyc";
    if (bad(corr)) return "corr";
    if (bad(smooth)) return "smooth";
    if (!std::isfinite(total)) return "total";
    return {};
}

LossReport total_loss(LossReport terms, const LossWeights& weights) {
    weights.validate();
    double total = 0.0;
    if (terms.adv_g) total += weights.adv * *terms.adv_g;
    if (terms.l1) total += weights.l1 * *terms.l1;
    if (terms.cyc) total += weights.cyc * *terms.cyc;
    if (terms.corr) total += weights.corr * *terms.corr;
    if (terms.smooth) total += weights.smooth * *terms.smooth;
    terms.total = total;
    return terms;
}

double l1_loss(const Image& pred, const Image& target) {
    if (!pred.same_shape(target)) throw DataError("l1_loss: shape mismatch");
    double acc = 0.0;
    for (std::size_t i = 0; i < pred.data.size(); ++i) acc += std::abs(pred.data[i] - target.data[i]);
    return acc / static_cast<double>(pred.data.size());
}

std::pair<double, double> adversarial_loss(const std::vector<double>& d_real,
                                           const std::vector<double>& d_fake, GanLoss kind) {
    nn::TapeT<double> t;
    nn::TensorT<double> r({static_cast<int>(d_real.size())});
    r.v = d_real;
    nn::TensorT<double> f({static_cast<int>(d_fake.size())});
    f.v = d_fake;
    const int rid = t.leaf(std::move(r));
    const int fid = t.leaf(std::move(f));
    const double disc = t.val(adv_disc(t, rid, fid, kind)).v[0];
    const double gen = t.val(adv_gen(t, fid, kind)).v[0];
    return {gen, disc};
}

double smoothness_loss(const DeformationField& field) {
    return warp::smoothness(field);
}

} // namespace reggan::losses
