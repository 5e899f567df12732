#pragma once

#include <Eigen/Core>
#include <cmath>

#include "srdreg/gss_regression.hpp"

namespace reference {

// Log joint posterior written out term by term, up to a constant.
inline double log_joint(const srdreg::GroupedDesignMatrix& d, const Eigen::VectorXd& y,
                        const srdreg::Hyperparameters& hp, const srdreg::GibbsState& s) {
    const double n = static_cast<double>(y.size());
    double lp = 0.5 * n * std::log(s.sigma_inv2) - 0.5 * s.sigma_inv2 * (y - d.X * s.beta).squaredNorm();
    for (Eigen::Index j = 0; j < s.beta.size(); ++j) {
        const double zeta = s.zeta(d.group_of_column[static_cast<std::size_t>(j)] - 1);
        const double prec = s.sigma_inv2 * s.nu_inv2(j) / zeta;
        lp += 0.5 * std::log(prec) - 0.5 * prec * s.beta(j) * s.beta(j);
        lp += (hp.a1 - 1) * std::log(s.nu_inv2(j)) - hp.a2 * s.nu_inv2(j);
    }
    for (Eigen::Index g = 0; g < s.zeta.size(); ++g) lp += s.zeta(g) == 1.0 ? std::log(s.w) : std::log1p(-s.w);
    lp += (hp.b1 - 1) * std::log(s.sigma_inv2) - hp.b2 * s.sigma_inv2;
    return lp;
}

}  // namespace reference
