#include "disent/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace disent {

namespace {

// Problems below this dimension run the serial kernels; the acceptance-scale
// spaces (dims 3 and 16) never pay OpenMP overhead.
constexpr int kParallelDim = 64;

}  // namespace

ComplexMatrix ComplexMatrix::identity(int dim) {
    ComplexMatrix m(dim);
    for (int i = 0; i < dim; ++i) m(i, i) = 1.0;
    return m;
}

ComplexMatrix matmul_serial(const ComplexMatrix& a, const ComplexMatrix& b) {
    const int n = a.dim();
    if (b.dim() != n) throw std::invalid_argument("matmul: dimension mismatch");
    ComplexMatrix c(n);
    const cplx* pa = a.data().data();
    const cplx* pb = b.data().data();
    cplx* pc = c.data().data();
    for (int i = 0; i < n; ++i) {
        for (int k = 0; k < n; ++k) {
            const cplx aik = pa[static_cast<size_t>(i) * n + k];
            if (aik == cplx{}) continue;
            const cplx* brow = pb + static_cast<size_t>(k) * n;
            cplx* crow = pc + static_cast<size_t>(i) * n;
            for (int j = 0; j < n; ++j) crow[j] += aik * brow[j];
        }
    }
    return c;
}

ComplexMatrix matmul(const ComplexMatrix& a, const ComplexMatrix& b) {
    const int n = a.dim();
    if (n < kParallelDim) return matmul_serial(a, b);
    if (b.dim() != n) throw std::invalid_argument("matmul: dimension mismatch");
    ComplexMatrix c(n);
    const cplx* pa = a.data().data();
    const cplx* pb = b.data().data();
    cplx* pc = c.data().data();
#pragma omp parallel for schedule(static)
    for (int i = 0; i < n; ++i) {
        for (int k = 0; k < n; ++k) {
            const cplx aik = pa[static_cast<size_t>(i) * n + k];
            if (aik == cplx{}) continue;
            const cplx* brow = pb + static_cast<size_t>(k) * n;
            cplx* crow = pc + static_cast<size_t>(i) * n;
            for (int j = 0; j < n; ++j) crow[j] += aik * brow[j];
        }
    }
    return c;
}

ComplexMatrix add(const ComplexMatrix& a, const ComplexMatrix& b) {
    ComplexMatrix c(a.dim());
    for (size_t i = 0; i < a.size(); ++i) c.data()[i] = a.data()[i] + b.data()[i];
    return c;
}

ComplexMatrix sub(const ComplexMatrix& a, const ComplexMatrix& b) {
    ComplexMatrix c(a.dim());
    for (size_t i = 0; i < a.size(); ++i) c.data()[i] = a.data()[i] - b.data()[i];
    return c;
}

ComplexMatrix scale(const ComplexMatrix& a, cplx s) {
    ComplexMatrix c(a.dim());
    for (size_t i = 0; i < a.size(); ++i) c.data()[i] = s * a.data()[i];
    return c;
}

void axpy_inplace(ComplexMatrix& y, cplx s, const ComplexMatrix& x) {
    const int n = y.dim();
    cplx* py = y.data().data();
    const cplx* px = x.data().data();
    const size_t total = y.size();
    if (n < kParallelDim) {
        for (size_t i = 0; i < total; ++i) py[i] += s * px[i];
        return;
    }
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < static_cast<long long>(total); ++i) py[i] += s * px[i];
}

ComplexMatrix adjoint(const ComplexMatrix& a) {
    const int n = a.dim();
    ComplexMatrix c(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) c(j, i) = std::conj(a(i, j));
    return c;
}

void hermitize_inplace(ComplexMatrix& a) {
    const int n = a.dim();
    for (int i = 0; i < n; ++i) {
        a(i, i) = cplx(a(i, i).real(), 0.0);
        for (int j = i + 1; j < n; ++j) {
            const cplx v = 0.5 * (a(i, j) + std::conj(a(j, i)));
            a(i, j) = v;
            a(j, i) = std::conj(v);
        }
    }
}

cplx trace(const ComplexMatrix& a) {
    cplx t{};
    for (int i = 0; i < a.dim(); ++i) t += a(i, i);
    return t;
}

cplx trace_product(const ComplexMatrix& a, const ComplexMatrix& b) {
    const int n = a.dim();
    cplx t{};
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k) t += a(i, k) * b(k, i);
    return t;
}

double frobenius_norm(const ComplexMatrix& a) {
    double s = 0.0;
    for (const cplx& v : a.data()) s += std::norm(v);
    return std::sqrt(s);
}

double max_abs(const ComplexMatrix& a) {
    double m = 0.0;
    for (const cplx& v : a.data()) m = std::max(m, std::abs(v));
    return m;
}

double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b) {
    double m = 0.0;
    for (size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a.data()[i] - b.data()[i]));
    return m;
}

double hermiticity_residual(const ComplexMatrix& a) {
    const int n = a.dim();
    double m = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) m = std::max(m, std::abs(a(i, j) - std::conj(a(j, i))));
    return m;
}

bool all_finite(const ComplexMatrix& a) {
    for (const cplx& v : a.data())
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
    return true;
}

ComplexMatrix commutator(const ComplexMatrix& a, const ComplexMatrix& b) {
    return sub(matmul(a, b), matmul(b, a));
}

ComplexMatrix anticommutator(const ComplexMatrix& a, const ComplexMatrix& b) {
    return add(matmul(a, b), matmul(b, a));
}

// ---------------------------------------------------------------------------
// Cyclic complex Jacobi for Hermitian matrices. Adequate and very accurate at
// the dimensions this library targets (residuals ~1e-15 * ||A||).
// ---------------------------------------------------------------------------

EighResult eigh(const ComplexMatrix& a) {
    const int n = a.dim();
    ComplexMatrix w = a;
    hermitize_inplace(w);
    ComplexMatrix v = ComplexMatrix::identity(n);

    const double norm = std::max(frobenius_norm(w), 1e-300);
    const double tol = 1e-15 * norm;
    const int max_sweeps = 60;

    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        double off = 0.0;
        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q) off += std::norm(w(p, q));
        if (std::sqrt(2.0 * off) < tol) break;

        for (int p = 0; p < n; ++p) {
            for (int q = p + 1; q < n; ++q) {
                const cplx apq = w(p, q);
                const double abs_apq = std::abs(apq);
                if (abs_apq < 1e-300) continue;

                const double app = w(p, p).real();
                const double aqq = w(q, q).real();
                // Rotation R = diag(1, e^{-i phi}) * G(theta) acting on (p,q),
                // with phi the phase of w(p,q) and cot(2 theta) = (app-aqq)/(2|w(p,q)|).
                const cplx ph = apq / abs_apq;
                const cplx phc = std::conj(ph);
                const double tau = (app - aqq) / (2.0 * abs_apq);
                const double t = (tau >= 0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;

                // w <- R† w R: columns then rows.
                for (int k = 0; k < n; ++k) {
                    const cplx wkp = w(k, p);
                    const cplx wkq = w(k, q);
                    w(k, p) = c * wkp + s * phc * wkq;
                    w(k, q) = -s * wkp + c * phc * wkq;
                }
                for (int k = 0; k < n; ++k) {
                    const cplx wpk = w(p, k);
                    const cplx wqk = w(q, k);
                    w(p, k) = c * wpk + s * ph * wqk;
                    w(q, k) = -s * wpk + c * ph * wqk;
                }
                for (int k = 0; k < n; ++k) {
                    const cplx vkp = v(k, p);
                    const cplx vkq = v(k, q);
                    v(k, p) = c * vkp + s * phc * vkq;
                    v(k, q) = -s * vkp + c * phc * vkq;
                }
                w(p, q) = 0.0;
                w(q, p) = 0.0;
            }
        }
    }

    EighResult res;
    res.values.resize(n);
    for (int i = 0; i < n; ++i) res.values[i] = w(i, i).real();

    // Sort ascending, permuting eigenvector columns along.
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](int x, int y) { return res.values[x] < res.values[y]; });
    EighResult sorted;
    sorted.values.resize(n);
    sorted.vectors = ComplexMatrix(n);
    for (int j = 0; j < n; ++j) {
        sorted.values[j] = res.values[order[j]];
        for (int i = 0; i < n; ++i) sorted.vectors(i, j) = v(i, order[j]);
    }
    return sorted;
}

double min_eigenvalue(const ComplexMatrix& a) {
    return eigh(a).values.front();
}

ComplexMatrix spectral_apply(const EighResult& es, const std::function<double(double)>& f) {
    const int n = es.vectors.dim();
    ComplexMatrix vf(n);  // V * diag(f(w))
    for (int j = 0; j < n; ++j) {
        const double fj = f(es.values[j]);
        for (int i = 0; i < n; ++i) vf(i, j) = es.vectors(i, j) * fj;
    }
    return matmul(vf, adjoint(es.vectors));
}

ComplexMatrix hermitian_log_clamped(const ComplexMatrix& rho, double floor) {
    const EighResult es = eigh(rho);
    return spectral_apply(es, [floor](double w) { return std::log(std::max(w, floor)); });
}

ComplexMatrix unitary_propagator(const ComplexMatrix& h, double t) {
    const EighResult es = eigh(h);
    const int n = h.dim();
    ComplexMatrix vf(n);
    for (int j = 0; j < n; ++j) {
        const cplx ph = std::exp(cplx(0.0, -es.values[j] * t));
        for (int i = 0; i < n; ++i) vf(i, j) = es.vectors(i, j) * ph;
    }
    return matmul(vf, adjoint(es.vectors));
}

}  // namespace disent
