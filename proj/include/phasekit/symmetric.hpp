#pragma once

#include <vector>

#include "phasekit/numerics.hpp"
#include "phasekit/numrange.hpp"

namespace phasekit {

/// C = U diag(sigma) U^T with U unitary and sigma descending.
struct TakagiFactorization {
  ComplexMatrix U;
  RealVector sigma;
};

TakagiFactorization takagi(const ComplexMatrix& C, const ToleranceConfig& tol = {});

/// True when ||C - C^T|| <= psd_tol * ||C||.
bool is_complex_symmetric(const ComplexMatrix& C, const ToleranceConfig& tol = {});

enum class BlockKind { K, L, M, N };

/// Canonical blocks of complex symmetric matrices under real congruence.
/// size is k for K_k, l for L_l(a), m for M_{2m-1} and n for N_{2n}.
struct ThompsonBlock {
  BlockKind kind = BlockKind::K;
  int size = 1;
  double a = 0.0;
  double b = 0.0;
  int sign = 1;  // multiplies K and L blocks

  int dimension() const;
};

ComplexMatrix build_block(const ThompsonBlock& spec);
ZeroLocation block_zero_location(const ThompsonBlock& spec, const ToleranceConfig& tol = {});

/// C = T^T blkdiag(0, diag(e^{j d_phases}), e^{j theta0} Et, ...) T with T real.
struct RealCongruenceDecomposition {
  RealMatrix T;
  int kernel_dim = 0;
  std::vector<double> d_phases;  // descending
  int e_block_count = 0;
  double theta0 = 0.0;

  ComplexMatrix core() const;
  ComplexMatrix reconstruct() const;
  std::vector<double> phases() const;
};

RealCongruenceDecomposition real_congruence_decompose(const ComplexMatrix& C,
                                                      const ToleranceConfig& tol = {});

struct BlockIdentityReport {
  double k2_residual = 0.0;
  std::vector<double> a_values;
  std::vector<double> l2_residuals;
  double max_residual = 0.0;
};

/// Checks K_2 = -j T_K^T Et T_K and L_2(a) = (1 + aj) T_L(a)^T Et T_L(a).
BlockIdentityReport verify_block_identities(const std::vector<double>& a_values = {
                                                      -3.0, -2.0, -1.0, -0.5, 0.0, 0.5, 1.0,
                                                      2.0, 3.0});

}  // namespace phasekit
