#pragma once

#include <string>
#include <vector>

#include "laserkit/types.hpp"

namespace laserkit {

/// Parameters for drawing reward-vs-length curves on a small continuous grid.
/// Defaults are the illustration settings: lengths in [0, 20], L_T = 10.
struct CurveParams {
    std::size_t points = 400;
    double min_length = 0.0;
    double max_length = 20.0;
    double target = 10.0;
    double rho = 0.0;
    double alpha = 0.5;
    double l1_alpha = 0.03;
    double l1_delta = 0.5;
    double efficient_alpha = 0.5;
    double efficient_mean = 10.0;
    double efficient_std = 2.0;
    double kimi_min = 2.5;
    double kimi_max = 20.0;
    std::vector<double> think_prune_targets{10.0, 7.5, 5.0};
    std::vector<double> laser_d_targets{10.0, 7.5, 5.0};
    std::vector<double> laser_de_targets{12.5, 10.0, 7.5};
    L1MaxSign l1max_sign = L1MaxSign::AsPrinted;
};

struct RewardCurve {
    Variant variant;
    double target;  // the threshold this line is drawn for
    std::vector<double> lengths;
    std::vector<double> correct;    // reward of a correct response
    std::vector<double> incorrect;  // reward of a well-formatted wrong response
};

/// One curve per target (three for the adaptive rows, one otherwise).
std::vector<RewardCurve> reward_curves(Variant v, const CurveParams& p = {});

std::vector<double> linspace(double lo, double hi, std::size_t n);

}  // namespace laserkit
