#pragma once

// Seeded generators for every structured operand the inequalities quantify
// over. Each `*_from_*` builder is deterministic in its raw Gaussian input;
// the random samplers draw that input and delegate, so the falsifier can
// perturb raw inputs and rebuild the structure.

#include "opgx/linalg.hpp"

#include <cstdint>
#include <random>
#include <vector>

namespace opgx {

using Rng = std::mt19937_64;

struct SeedSpec {
  std::uint64_t master_seed = 0;
  std::uint64_t trial_index = 0;

  /// 64-bit seed mixed from (master_seed, trial_index).
  std::uint64_t derived() const;
  Rng engine() const { return Rng(derived()); }
};

/// Independent complex entries with standard normal real and imaginary parts.
CMatrix random_gaussian(int rows, int cols, Rng& rng);

/// Unitary Q·diag(r_ii/|r_ii|) from the QR factors of `g`.
CMatrix unitary_from_gaussian(const CMatrix& g);
CMatrix random_unitary(int n, Rng& rng);

/// U diag(λ) U† with λ i.i.d. uniform in K (capped at width `cap_width`).
HermitianMatrix random_psd_with_spectrum(int n, const Interval& k, Rng& rng, double cap_width = 10.0);

/// g / (‖g‖₂ · shrink), shrink ≥ 1.
CMatrix contraction_from_gaussian(const CMatrix& g, double shrink);
/// Strict contraction almost surely; `isometry` returns a Haar unitary.
CMatrix random_contraction(int n, Rng& rng, bool isometry = false);

/// [[V, (I−VV†)^½], [(I−V†V)^½, −V†]].
CMatrix unitary_dilation(const CMatrix& v, const ToleranceConfig& tol = {});

class ContractionPair {
 public:
  /// Validates ‖CC† + DD† − I‖_F ≤ 1e-12·n.
  ContractionPair(CMatrix c, CMatrix d);
  const CMatrix& c() const { return c_; }
  const CMatrix& d() const { return d_; }
  int dim() const { return static_cast<int>(c_.rows()); }
  double residual() const;

 private:
  CMatrix c_, d_;
};

/// First n rows of the 2n×2n unitary built from `g`.
ContractionPair coisometry_from_gaussian(const CMatrix& g);
ContractionPair random_coisometry_pair(int n, Rng& rng);

HermitianMatrix projection_from_gaussian(const CMatrix& g, int rank);
HermitianMatrix random_projection(int n, int rank, Rng& rng);

struct ResolutionOfIdentity {
  std::vector<double> weights;            // α_i ∈ (0,1), Σα_i = 1
  std::vector<HermitianMatrix> operators; // A_i ⪰ 0, Σα_i A_i = I
  std::vector<double> points;             // x_i ∈ K

  int dim() const { return operators.empty() ? 0 : operators.front().dim(); }
  double residual() const;
  /// Throws UsageError when any structural invariant fails.
  void validate(const Interval& k, const ToleranceConfig& tol = {}) const;
};

/// Uniform sample from the open probability simplex.
std::vector<double> random_simplex(int k, Rng& rng);

/// A_i = S^{-1/2} B_i S^{-1/2} with B_i = G_i G_i† and S = Σ α_i B_i.
ResolutionOfIdentity resolution_from_gaussians(std::vector<double> weights, const std::vector<CMatrix>& gs,
                                               std::vector<double> points);
ResolutionOfIdentity random_resolution(int n, int k, const Interval& k_interval, Rng& rng);

/// Φ(X) = Σ K_i† X K_i (or Σ K_i† Xᵀ K_i when transposed).
class UnitalPositiveMap {
 public:
  UnitalPositiveMap(std::vector<CMatrix> kraus, bool transpose_input = false);

  const std::vector<CMatrix>& kraus() const { return kraus_; }
  bool transpose_input() const { return transpose_input_; }
  int input_dim() const { return static_cast<int>(kraus_.front().rows()); }
  int output_dim() const { return static_cast<int>(kraus_.front().cols()); }
  /// ‖Σ K_i†K_i − I‖_F.
  double unital_residual() const { return unital_residual_; }

  HermitianMatrix operator()(const HermitianMatrix& x) const;

 private:
  std::vector<CMatrix> kraus_;
  bool transpose_input_;
  double unital_residual_;
};

/// K_i ← G_i T^{-1/2} with T = Σ G_i†G_i.
UnitalPositiveMap unital_map_from_gaussians(const std::vector<CMatrix>& gs, bool transpose_input = false);
UnitalPositiveMap random_unital_positive_map(int n, int m_kraus, Rng& rng, bool transpose_input = false);

}  // namespace opgx
