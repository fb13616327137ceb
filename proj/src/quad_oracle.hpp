#pragma once

#include "model.hpp"

namespace nomasec {

enum class User { Strong, Weak };

// Ground-truth ESR evaluation by nested adaptive quadrature over the
// two-regime decomposition (y <= Theta uses P_max, y > Theta uses I_p/y).
// Densities are the order-statistic product forms, so this path shares no
// code with the closed-form kernels or the signed Phi expansion.
//
// rel_tol must lie in [1e-10, 1e-4]. Throws ConvergenceError when the
// adaptive engine cannot meet it within the subdivision budget.
double quad_esr_strong(const SystemConfig& cfg, double rel_tol);
double quad_esr_weak(const SystemConfig& cfg, double rel_tol);

// Per-user OMA ESR (no closed form exists; this is the reference evaluator).
// The gains enter exactly as printed (no sigma^2 shift) unless
// estimation_noise is set, which applies the same shift the NOMA rates use.
double quad_oma_esr(const SystemConfig& cfg, User user, double rel_tol,
                    bool estimation_noise = false);

} // namespace nomasec
