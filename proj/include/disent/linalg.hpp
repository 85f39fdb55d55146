#pragma once

#include <complex>
#include <functional>
#include <span>
#include <vector>

namespace disent {

using cplx = std::complex<double>;

/// Dense square complex matrix, row-major storage.
class ComplexMatrix {
public:
    ComplexMatrix() = default;
    explicit ComplexMatrix(int dim) : dim_(dim), a_(static_cast<size_t>(dim) * dim) {}

    static ComplexMatrix identity(int dim);

    int dim() const { return dim_; }
    size_t size() const { return a_.size(); }

    cplx& operator()(int r, int c) { return a_[static_cast<size_t>(r) * dim_ + c]; }
    const cplx& operator()(int r, int c) const { return a_[static_cast<size_t>(r) * dim_ + c]; }

    std::span<cplx> data() { return a_; }
    std::span<const cplx> data() const { return a_; }

private:
    int dim_ = 0;
    std::vector<cplx> a_;
};

// ---------------------------------------------------------------------------
// Kernels. The unsuffixed versions dispatch to OpenMP loops above a size
// threshold; the _serial versions are the reference implementations kept
// for testing and benchmarking against the parallel path.
// ---------------------------------------------------------------------------

ComplexMatrix matmul(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix matmul_serial(const ComplexMatrix& a, const ComplexMatrix& b);

ComplexMatrix add(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix sub(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix scale(const ComplexMatrix& a, cplx s);
void axpy_inplace(ComplexMatrix& y, cplx s, const ComplexMatrix& x);  // y += s*x

ComplexMatrix adjoint(const ComplexMatrix& a);
void hermitize_inplace(ComplexMatrix& a);  // a <- (a + a†)/2

cplx trace(const ComplexMatrix& a);
cplx trace_product(const ComplexMatrix& a, const ComplexMatrix& b);  // Tr(a b)
double frobenius_norm(const ComplexMatrix& a);
double max_abs(const ComplexMatrix& a);
double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b);
double hermiticity_residual(const ComplexMatrix& a);  // max |a - a†|
bool all_finite(const ComplexMatrix& a);

ComplexMatrix commutator(const ComplexMatrix& a, const ComplexMatrix& b);      // ab - ba
ComplexMatrix anticommutator(const ComplexMatrix& a, const ComplexMatrix& b);  // ab + ba

// ---------------------------------------------------------------------------
// Hermitian eigenproblem (cyclic complex Jacobi). Eigenvalues ascending,
// eigenvectors as columns of `vectors`.
// ---------------------------------------------------------------------------

struct EighResult {
    std::vector<double> values;
    ComplexMatrix vectors;
};

EighResult eigh(const ComplexMatrix& a);

double min_eigenvalue(const ComplexMatrix& a);

/// V f(w) V† for a Hermitian matrix given by its eigendecomposition.
ComplexMatrix spectral_apply(const EighResult& es, const std::function<double(double)>& f);

/// log(rho) with eigenvalues clamped below at `floor` before the logarithm.
ComplexMatrix hermitian_log_clamped(const ComplexMatrix& rho, double floor);

/// exp(-i H t) from the eigendecomposition of Hermitian H.
ComplexMatrix unitary_propagator(const ComplexMatrix& h, double t);

}  // namespace disent
