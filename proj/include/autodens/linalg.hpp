#pragma once
// Small exact linear algebra over mpq_class: just enough for kernel bases,
// column-space bases, square solves and the spectral projector used by the
// density computations.  Elimination scans rows/columns in index (= state
// declaration) order and always takes the first nonzero pivot, so every result
// is reproducible bit for bit.

#include <optional>
#include <vector>

#include "autodens/rational.hpp"

namespace autodens {

struct Mat {
    int rows = 0, cols = 0;
    std::vector<Rat> a;  // row-major

    Mat() = default;
    Mat(int r, int c) : rows(r), cols(c), a(static_cast<size_t>(r) * c) {}
    Rat& at(int i, int j) { return a[static_cast<size_t>(i) * cols + j]; }
    const Rat& at(int i, int j) const { return a[static_cast<size_t>(i) * cols + j]; }
};

Mat identity(int n);
Mat mat_mul(const Mat& x, const Mat& y);
Mat mat_sub(const Mat& x, const Mat& y);
Mat mat_scale(const Mat& x, const Rat& c);
bool mat_eq(const Mat& x, const Mat& y);

// Reduced row echelon form in place; returns pivot column indices in order.
std::vector<int> rref(Mat& m);

// Columns spanning ker(A) (one per free column, standard basis).
Mat kernel_basis(const Mat& A);

// The pivot columns of A itself (a basis of the column space).
Mat column_space_basis(const Mat& A);

// Solves A X = B for square invertible A; throws DomainError if singular.
Mat solve_square(const Mat& A, const Mat& B);

// Projector P onto ker(A) along im(A) for a square A with ker ⊕ im = R^n
// (e.g. A = B - I with eigenvalue 1 of B semisimple).  Satisfies P*P = P,
// P*A = A*P = 0... more precisely ker(A) is fixed and im(A) is killed.
Mat projector_onto_kernel_along_image(const Mat& A);

// Collatz-Wielandt certification that the spectral radius of an entrywise
// nonnegative matrix T is strictly below `bound`: returns an exact rational
// upper bound max_q (Tv)_q / v_q < bound for some positive v, if one is found
// within `iters` refinement steps.
std::optional<Rat> certify_spectral_radius_below(const Mat& T, const Rat& bound, int iters);

}  // namespace autodens
