#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pdm/grid.hpp"
#include "pdm/model.hpp"
#include "pdm/operators.hpp"
#include "pdm/report.hpp"

namespace pdm {

// Operator identities A = B are probed with smooth vectors P on interior rows:
//   absolute = |(A - B)P| / |P|
//   relative = |(A - B)P| / max(|AP|, |BP|)

enum class HermClass { Hermitian, AntiHermitian, Neither };

struct HermiticityReport {
    HermClass cls = HermClass::Neither;
    double defect = 0.0;  // the smaller of the two
    double hermitian_defect = 0.0;
    double anti_hermitian_defect = 0.0;
};

struct SpectralReport {
    std::vector<cplx> eigenvalues;  // sorted by real part, then imaginary part
    double reality_max_imag = 0.0;
    double conjugate_pair_defect = 0.0;
    CMat vectors;  // columns padded with the Dirichlet zeros; empty unless requested
};

struct ContinuityRecord {
    std::vector<double> times;
    std::vector<cplx> rho_eta_integral;

    double relative_drift() const;
};

// Smooth complex probes vanishing at both ends: sin^6 window times a random
// low-frequency trigonometric combination. Deterministic for a given seed.
CMat probe_set(const Grid& g, std::size_t count = kProbeCount, std::uint64_t seed = 1);

ResidualReport identity_residual(const std::string& name, const OperatorMatrix& A, const OperatorMatrix& B,
                                 std::size_t band = kInteriorBand);
ResidualReport intertwining_residual(const OperatorMatrix& eta, const OperatorMatrix& H,
                                     std::size_t band = kInteriorBand);
HermiticityReport hermiticity_class(const OperatorMatrix& O, double tol = 1e-3, std::size_t band = kInteriorBand);
const char* herm_class_name(HermClass c);

// τ̃(𝓗v) against 𝓗†(τ̃v) on probe vectors.
ResidualReport tau_residual(const OperatorMatrix& H, const SampledFunction& alpha, std::size_t band = kInteriorBand);

// Eigenvalues of the interior (Dirichlet) block.
SpectralReport spectrum(const OperatorMatrix& H, bool want_vectors = false, std::size_t cap = 4001);
double conjugate_pair_defect(const std::vector<cplx>& ev);

// The `count` lowest eigenpairs of the interior block: eigenvectors of the
// Hermitian part seed Rayleigh-quotient iteration on H itself. Pairing and
// reality fields refer to the returned subset only.
SpectralReport lowest_eigenpairs(const OperatorMatrix& H, std::size_t count, double tol = 1e-11);

// (E1 - E2*) * ∫ conj(ψ₂) (η ψ₁) dx; with parity_flip, ψ₂ is replaced by ψ₂(-x).
cplx eta_orthogonality(const SampledFunction& psi1, const SampledFunction& psi2, const OperatorMatrix& eta,
                       cplx E1, cplx E2, bool parity_flip = false);

// Crank-Nicolson evolution of both fields under 𝓗 on the interior block,
// recording ∫ conj(Ψ₂) η Ψ₁ dx after every step.
ContinuityRecord evolve_conservation(const OperatorMatrix& H, const OperatorMatrix& eta,
                                     const SampledFunction& psi1_0, const SampledFunction& psi2_0, double dt,
                                     std::size_t steps);

ResidualReport factorization_residual(const OperatorMatrix& eta_plus, const OperatorMatrix& eta_minus,
                                      const OperatorMatrix& eta_minus_dag, const SampledFunction& U,
                                      const SampledFunction& R);
ResidualReport decomposition_residual(const OperatorMatrix& eta_plus, const OperatorMatrix& eta_minus,
                                      const OperatorMatrix& eta_minus_dag, const SampledFunction& U,
                                      const SampledFunction& R);
ResidualReport similarity_residual(const OperatorMatrix& zeta, const OperatorMatrix& eta_minus,
                                   const SampledFunction& R);

// Operators of the F ↦ f similarity pipeline: G = g, F = (G/2)(U/G)',
// R = 1 + δ exp(-2∫F/U), f = F/R.
struct SimilarityPipeline {
    SampledFunction U, F, G, R, f;
    OperatorMatrix eta_plus, zeta, eta_minus, eta_minus_dag;
};
SimilarityPipeline build_similarity_pipeline(const ModelSpec& spec, const GridPtr& g);

// Observed order log2(r_k / r_{k+1}) for residuals on grids with h halved each step.
std::vector<double> observed_orders(const std::vector<double>& residuals);

struct Refinement {
    std::vector<std::size_t> n;
    std::vector<double> relative;
    std::vector<double> floor;
    std::vector<double> orders;

    // True when every level sits below its rounding floor: the discrete
    // identity holds exactly and there is no truncation error to measure.
    bool roundoff_limited() const;
    double min_order() const;
};

// n, 2n-1, 4n-3, ... so that each grid halves h and nests the previous one.
std::vector<std::size_t> refinement_levels(std::size_t n0, std::size_t count);

double max_row_sum(const SpMat& m);

}  // namespace pdm
