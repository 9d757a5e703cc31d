#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace pdm {

using cplx = std::complex<double>;
using CVec = Eigen::VectorXcd;
using RVec = Eigen::VectorXd;
using SpMat = Eigen::SparseMatrix<cplx, Eigen::RowMajor>;
using CMat = Eigen::MatrixXcd;

struct Grid {
    double x_min = 0.0;
    double x_max = 0.0;
    std::size_t n = 0;
    double h = 0.0;
    bool symmetric = false;
    std::vector<double> points;

    double operator[](std::size_t i) const { return points[i]; }
};

using GridPtr = std::shared_ptr<const Grid>;

struct SampledFunction {
    GridPtr grid;
    CVec values;

    std::size_t size() const { return static_cast<std::size_t>(values.size()); }
    cplx operator[](std::size_t i) const { return values[static_cast<Eigen::Index>(i)]; }
    RVec real() const { return values.real(); }
    RVec imag() const { return values.imag(); }
};

// Operators are stored sparse; every assembled operator is banded.
struct OperatorMatrix {
    GridPtr grid;
    SpMat m;

    Eigen::Index dim() const { return m.rows(); }
};

GridPtr make_grid(double x_min, double x_max, std::size_t n);

// Central second-order stencils inside, one-sided second-order stencils on
// the two boundary rows. Used to differentiate sampled data.
OperatorMatrix diff_matrix(const GridPtr& g, int order);

// Central stencils on rows 1..n-2 and zero boundary rows (Dirichlet closure).
// Used to assemble differential operators.
SpMat dirichlet_diff(const Grid& g, int order);

cplx integrate(const SampledFunction& f);
SampledFunction cumulative_integral(const SampledFunction& f, double x0);
std::size_t grid_index(const Grid& g, double x0);
// x = 0 when it is a grid point, otherwise the left end.
double default_anchor(const Grid& g);

OperatorMatrix parity_matrix(const GridPtr& g);

SampledFunction sample(const GridPtr& g, const CVec& v);
SampledFunction sample_real(const GridPtr& g, const RVec& v);
SampledFunction derivative(const SampledFunction& f, int order = 1);
void require_same_grid(const SampledFunction& a, const SampledFunction& b);
bool same_grid(const GridPtr& a, const GridPtr& b);

}  // namespace pdm
