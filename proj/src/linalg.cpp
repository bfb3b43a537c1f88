#include "autodens/linalg.hpp"

namespace autodens {

Mat identity(int n) {
    Mat m(n, n);
    for (int i = 0; i < n; ++i) m.at(i, i) = 1;
    return m;
}

Mat mat_mul(const Mat& x, const Mat& y) {
    if (x.cols != y.rows) throw DomainError("matrix product shape mismatch");
    Mat r(x.rows, y.cols);
    for (int i = 0; i < x.rows; ++i)
        for (int k = 0; k < x.cols; ++k) {
            const Rat& v = x.at(i, k);
            if (v == 0) continue;
            for (int j = 0; j < y.cols; ++j) r.at(i, j) += v * y.at(k, j);
        }
    return r;
}

Mat mat_sub(const Mat& x, const Mat& y) {
    if (x.rows != y.rows || x.cols != y.cols) throw DomainError("matrix difference shape mismatch");
    Mat r(x.rows, x.cols);
    for (size_t i = 0; i < x.a.size(); ++i) r.a[i] = x.a[i] - y.a[i];
    return r;
}

Mat mat_scale(const Mat& x, const Rat& c) {
    Mat r = x;
    for (auto& v : r.a) v *= c;
    return r;
}

bool mat_eq(const Mat& x, const Mat& y) {
    return x.rows == y.rows && x.cols == y.cols && x.a == y.a;
}

std::vector<int> rref(Mat& m) {
    std::vector<int> pivots;
    int row = 0;
    for (int col = 0; col < m.cols && row < m.rows; ++col) {
        // First nonzero entry in index order is the pivot (deterministic).
        int p = -1;
        for (int i = row; i < m.rows; ++i)
            if (m.at(i, col) != 0) {
                p = i;
                break;
            }
        if (p == -1) continue;
        if (p != row)
            for (int j = 0; j < m.cols; ++j) std::swap(m.at(p, j), m.at(row, j));
        Rat inv = m.at(row, col);
        for (int j = 0; j < m.cols; ++j) m.at(row, j) /= inv;
        for (int i = 0; i < m.rows; ++i) {
            if (i == row || m.at(i, col) == 0) continue;
            Rat f = m.at(i, col);
            for (int j = 0; j < m.cols; ++j) m.at(i, j) -= f * m.at(row, j);
        }
        pivots.push_back(col);
        ++row;
    }
    return pivots;
}

Mat kernel_basis(const Mat& A) {
    Mat r = A;
    auto pivots = rref(r);
    std::vector<char> is_pivot(A.cols, 0);
    for (int c : pivots) is_pivot[c] = 1;
    int nfree = A.cols - static_cast<int>(pivots.size());
    Mat K(A.cols, nfree);
    int fj = 0;
    for (int col = 0; col < A.cols; ++col) {
        if (is_pivot[col]) continue;
        K.at(col, fj) = 1;
        for (size_t pr = 0; pr < pivots.size(); ++pr) K.at(pivots[pr], fj) = -r.at((int)pr, col);
        ++fj;
    }
    return K;
}

Mat column_space_basis(const Mat& A) {
    Mat r = A;
    auto pivots = rref(r);
    Mat C(A.rows, static_cast<int>(pivots.size()));
    for (size_t j = 0; j < pivots.size(); ++j)
        for (int i = 0; i < A.rows; ++i) C.at(i, (int)j) = A.at(i, pivots[j]);
    return C;
}

Mat solve_square(const Mat& A, const Mat& B) {
    if (A.rows != A.cols || A.rows != B.rows) throw DomainError("solve_square shape mismatch");
    Mat aug(A.rows, A.cols + B.cols);
    for (int i = 0; i < A.rows; ++i) {
        for (int j = 0; j < A.cols; ++j) aug.at(i, j) = A.at(i, j);
        for (int j = 0; j < B.cols; ++j) aug.at(i, A.cols + j) = B.at(i, j);
    }
    auto pivots = rref(aug);
    if (static_cast<int>(pivots.size()) != A.cols || pivots.back() >= A.cols)
        throw DomainError("solve_square: singular matrix");
    Mat X(A.cols, B.cols);
    for (int i = 0; i < A.cols; ++i)
        for (int j = 0; j < B.cols; ++j) X.at(i, j) = aug.at(i, A.cols + j);
    return X;
}

Mat projector_onto_kernel_along_image(const Mat& A) {
    if (A.rows != A.cols) throw DomainError("projector requires a square matrix");
    int n = A.rows;
    Mat K = kernel_basis(A);
    Mat R = column_space_basis(A);
    if (K.cols + R.cols != n)
        throw DomainError("projector: kernel and image do not complement (eigenvalue not semisimple)");
    Mat W(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < K.cols; ++j) W.at(i, j) = K.at(i, j);
        for (int j = 0; j < R.cols; ++j) W.at(i, K.cols + j) = R.at(i, j);
    }
    // Coordinates of e_q in the (kernel | image) basis; keep the kernel part.
    Mat X = solve_square(W, identity(n));
    Mat Ktop(K.cols, n);
    for (int i = 0; i < K.cols; ++i)
        for (int j = 0; j < n; ++j) Ktop.at(i, j) = X.at(i, j);
    return mat_mul(K, Ktop);
}

std::optional<Rat> certify_spectral_radius_below(const Mat& T, const Rat& bound, int iters) {
    if (T.rows != T.cols) throw DomainError("spectral certification requires a square matrix");
    int n = T.rows;
    if (n == 0) return Rat(0);
    std::vector<Rat> v(n, Rat(1));
    Rat best;
    bool have = false;
    for (int it = 0; it < iters; ++it) {
        std::vector<Rat> u(n, Rat(0));
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                if (T.at(i, j) != 0) u[i] += T.at(i, j) * v[j];
        // Collatz-Wielandt: rho <= max_i u_i / v_i for positive v.
        Rat cw = u[0] / v[0];
        for (int i = 1; i < n; ++i) cw = std::max(cw, Rat(u[i] / v[i]));
        if (!have || cw < best) {
            best = cw;
            have = true;
        }
        if (best < bound) return best;
        // v <- (T + I) v, normalized to keep numerators small.
        Rat mx(0);
        for (int i = 0; i < n; ++i) {
            v[i] += u[i];
            mx = std::max(mx, v[i]);
        }
        for (int i = 0; i < n; ++i) v[i] /= mx;
    }
    return std::nullopt;
}

}  // namespace autodens
