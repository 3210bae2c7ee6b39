#pragma once

#include <optional>
#include <vector>

#include "phasekit/numerics.hpp"
#include "phasekit/numrange.hpp"

namespace phasekit {

struct PhaseSector {
  std::vector<double> phases;  // descending
  double gamma = 0.0;          // (max + min) / 2
  double delta = 0.0;          // max - min

  double max() const { return phases.empty() ? gamma : phases.front(); }
  double min() const { return phases.empty() ? gamma : phases.back(); }
};

/// C = T^H blkdiag(0_k, diag(e^{j d_phases}), e^{j theta0} Et, ...) T
/// where Et = [[0, -j], [-j, 1]] appears e_block_count times.
struct SectorialDecomposition {
  ComplexMatrix T;
  int kernel_dim = 0;
  std::vector<double> d_phases;  // descending
  int e_block_count = 0;
  double theta0 = 0.0;

  int rank() const { return static_cast<int>(T.rows()) - kernel_dim; }
  ComplexMatrix core() const;
  ComplexMatrix reconstruct() const;
  /// D phases plus theta0 +- pi/2 for every E block, descending.
  std::vector<double> phases() const;
};

/// [[0, -j], [-j, 1]]
ComplexMatrix e_tilde();

/// blkdiag(0_k, diag(e^{j phi}), e^{j theta0} Et, ...)
ComplexMatrix assemble_core(int kernel_dim, const std::vector<double>& d_phases, int e_blocks,
                            double theta0);

SectorialDecomposition sectorial_decompose(const ComplexMatrix& C, const ToleranceConfig& tol = {});
SectorialDecomposition quasi_sectorial_decompose(const ComplexMatrix& C,
                                                 const ToleranceConfig& tol = {});
SectorialDecomposition semi_sectorial_decompose(const ComplexMatrix& C,
                                                const ToleranceConfig& tol = {});

/// Decomposition matching the class of C; NotSemiSectorial when indefinite.
SectorialDecomposition decompose(const ComplexMatrix& C, const ToleranceConfig& tol = {});

/// Phase sector of a semi-sectorial matrix. Without a hint gamma is the
/// principal value in [-pi, pi); with a hint, the 2pi translate nearest it.
PhaseSector phases(const ComplexMatrix& C, std::optional<double> branch_center_hint = std::nullopt,
                   const ToleranceConfig& tol = {});

/// Phase sector from a phase list, with the same branch convention as phases().
PhaseSector make_sector(std::vector<double> phases, std::optional<double> branch_center_hint);

struct MatrixCheck {
  bool holds = false;
  std::optional<ComplexMatrix> witness;  // present when the condition fails
};

/// I + AB nonsingular for every ||B|| <= gamma  iff  ||A|| < 1/gamma.
MatrixCheck matrix_small_gain_check(const ComplexMatrix& A, double gamma);

/// I + AB nonsingular for every semi-sectorial B with phases in [alpha, beta]
/// iff the phases of A lie in (-pi - alpha, pi - beta), modulo 2pi.
MatrixCheck matrix_small_phase_check(const ComplexMatrix& A, double alpha, double beta,
                                     const ToleranceConfig& tol = {});

}  // namespace phasekit
