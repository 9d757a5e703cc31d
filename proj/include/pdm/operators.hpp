#pragma once

#include <utility>

#include "pdm/grid.hpp"
#include "pdm/model.hpp"

namespace pdm {

struct OperatorCoefficients {
    SampledFunction K;
    SampledFunction L;
    SampledFunction M;
    SampledFunction N;
};

enum class EtaPlusMode { Product, ClosedForm };
enum class ZetaDagger { ConjugateTranspose, Transcribed };

struct OperatorBundle {
    OperatorMatrix H;
    OperatorMatrix H_dag;
    OperatorMatrix eta_plus;
    OperatorMatrix eta_minus;
    OperatorMatrix eta_minus_dag;
    OperatorMatrix zeta;
    OperatorMatrix zeta_dag;
    OperatorMatrix H_minus;  // 𝓗 carrying V₋, the partner of eta_minus
    OperatorMatrix eta_exp_parity;  // empty unless the grid is symmetric and a, U are even
    SampledFunction alpha;
    SampledFunction rho;
    OperatorMatrix h_her;
};

// diag(v) with the two boundary entries zeroed (Dirichlet closure).
SpMat dirichlet_diag(const CVec& v);
SpMat full_diag(const CVec& v);

OperatorCoefficients coefficients(const SampledFunction& U, const SampledFunction& a,
                                  const SampledFunction& F, const SampledFunction& G);

OperatorMatrix build_H0(const SampledFunction& U, const SampledFunction& V);
OperatorMatrix build_modified_H(const SampledFunction& U, const SampledFunction& a, const SampledFunction& V);

std::pair<OperatorMatrix, OperatorMatrix> build_zeta(const SampledFunction& U, const SampledFunction& F,
                                                     const SampledFunction& G, const SampledFunction& a,
                                                     ZetaDagger variant = ZetaDagger::ConjugateTranspose);

OperatorMatrix build_eta_plus(const SampledFunction& U, const SampledFunction& F, const SampledFunction& G,
                              const SampledFunction& a, EtaPlusMode mode = EtaPlusMode::Product,
                              ZetaDagger variant = ZetaDagger::ConjugateTranspose);

// Returns (η̃₋, η̃₋†). With check_f set, f must equal U'/2 to within f_tol.
std::pair<OperatorMatrix, OperatorMatrix> build_eta_minus(const SampledFunction& U, const SampledFunction& f,
                                                          const SampledFunction& g_fn, const SampledFunction& a,
                                                          bool check_f = true, double f_tol = 1e-6);

OperatorMatrix build_eta_exp_parity(const SampledFunction& alpha, const GridPtr& g);

CVec apply_tau(const SampledFunction& alpha, const CVec& v);

OperatorMatrix build_h_her(const SampledFunction& rho, const OperatorMatrix& H);

OperatorMatrix adjoint(const OperatorMatrix& O);
OperatorMatrix identity_operator(const GridPtr& g);

OperatorBundle build_bundle(const ModelSpec& spec, const GridPtr& g);

}  // namespace pdm
