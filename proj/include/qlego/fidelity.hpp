// Copyright 2026 The QLego Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "qlego/circuit.hpp"
#include "qlego/error.hpp"

namespace qlego {

/// log F_ex = c_q N_q + c_1 N_1 + c_2 N_2; alpha is the renormalization exponent.
struct FidelityModel {
    double c_q = 0, c_1 = 0, c_2 = 0;
    double alpha = 1.0;
    double residual_norm = 0.0;

    double log_fidelity(const GateCounts& n) const {
        return c_q * double(n.qubits) + c_1 * double(n.one_qubit) + c_2 * double(n.two_qubit);
    }
    double fidelity(const GateCounts& n) const { return std::exp(log_fidelity(n)); }
    /// F_ex^alpha, the factor error-free weights are divided by.
    double scale(const GateCounts& n) const { return std::pow(fidelity(n), alpha); }
};

/// One calibration run: circuit counts and its observed error-free fraction.
struct FitRun {
    GateCounts counts;
    double fraction = 1.0;
};

/// Least squares of log(fraction) on (N_q, N_1, N_2) with no intercept.
inline FidelityModel fit_fidelity(const std::vector<FitRun>& runs, double alpha = 1.0) {
    if (runs.size() < 3) throw IdentifiabilityError("fit_fidelity: need at least 3 runs, got " + std::to_string(runs.size()));
    Eigen::MatrixXd a(runs.size(), 3);
    Eigen::VectorXd y(runs.size());
    for (size_t i = 0; i < runs.size(); ++i) {
        const auto& r = runs[i];
        if (!(r.fraction > 0 && r.fraction <= 1))
            throw DomainError("fit_fidelity: error-free fraction must lie in (0, 1], got " + std::to_string(r.fraction));
        auto row = static_cast<Eigen::Index>(i);
        a(row, 0) = double(r.counts.qubits);
        a(row, 1) = double(r.counts.one_qubit);
        a(row, 2) = double(r.counts.two_qubit);
        y(row) = std::log(r.fraction);
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
    if (qr.rank() < 3)
        throw IdentifiabilityError("fit_fidelity: count vectors span rank " + std::to_string(qr.rank()) +
                                   "; vary qubits, one- and two-qubit gates independently");
    Eigen::Vector3d c = qr.solve(y);
    FidelityModel m{c(0), c(1), c(2), alpha, (a * c - y).norm()};
    return m;
}

}  // namespace qlego
