#include "laserkit/curves.hpp"

#include "laserkit/reward.hpp"

namespace laserkit {

std::vector<double> linspace(double lo, double hi, std::size_t n) {
    std::vector<double> out(n);
    if (n == 1) {
        out[0] = lo;
        return out;
    }
    const double step = (hi - lo) / static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i) out[i] = lo + step * static_cast<double>(i);
    out[n - 1] = hi;
    return out;
}

namespace {

template <typename F>
RewardCurve sample(Variant v, double target, const std::vector<double>& xs, F&& at) {
    RewardCurve c{v, target, xs, {}, {}};
    c.correct.reserve(xs.size());
    c.incorrect.reserve(xs.size());
    for (double x : xs) {
        c.correct.push_back(at(x, Outcome{true, true}).total);
        c.incorrect.push_back(at(x, Outcome{false, true}).total);
    }
    return c;
}

}  // namespace

std::vector<RewardCurve> reward_curves(Variant v, const CurveParams& p) {
    const auto xs = linspace(p.min_length, p.max_length, p.points);
    std::vector<RewardCurve> out;
    switch (v) {
        case Variant::VanillaTruncation:
            out.push_back(sample(v, p.target, xs, [&](double x, Outcome o) {
                return truncation_gate_at(x, o, p.target, p.rho);
            }));
            break;
        case Variant::ThinkPrune:
            for (double t : p.think_prune_targets)
                out.push_back(sample(v, t, xs, [&](double x, Outcome o) {
                    return truncation_gate_at(x, o, t, p.rho);
                }));
            break;
        case Variant::GroupEfficient:
            out.push_back(sample(v, p.efficient_mean, xs, [&](double x, Outcome o) {
                return group_efficient_at(x, o, p.efficient_mean, p.efficient_std,
                                          p.efficient_alpha);
            }));
            break;
        case Variant::Kimi:
            out.push_back(sample(v, p.kimi_min, xs, [&](double x, Outcome o) {
                return kimi_at(x, o, p.kimi_min, p.kimi_max);
            }));
            break;
        case Variant::L1Exact:
            out.push_back(sample(v, p.target, xs, [&](double x, Outcome o) {
                return l1_exact_at(x, o, p.target, p.l1_alpha);
            }));
            break;
        case Variant::L1Max:
            out.push_back(sample(v, p.target, xs, [&](double x, Outcome o) {
                return l1_max_at(x, o, p.target, p.l1_alpha, p.l1_delta, p.l1max_sign);
            }));
            break;
        case Variant::Laser:
            out.push_back(sample(v, p.target, xs, [&](double x, Outcome o) {
                return laser_at(x, o, p.target, p.alpha);
            }));
            break;
        case Variant::LaserD:
            for (double t : p.laser_d_targets)
                out.push_back(sample(v, t, xs, [&](double x, Outcome o) {
                    return laser_at(x, o, t, p.alpha);
                }));
            break;
        case Variant::LaserDE:
            for (double t : p.laser_de_targets)
                out.push_back(sample(v, t, xs, [&](double x, Outcome o) {
                    return laser_de_at(x, o, t, p.alpha);
                }));
            break;
    }
    return out;
}

}  // namespace laserkit
