#pragma once
// Dense value-type containers for rank-3 and rank-4 tensors in small dimension,
// plus the orthonormal-frame transforms used to compare tensors across charts.
// Components are stored fully (no symmetry compression); dim <= 8 keeps the
// largest tensor at 4096 doubles.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace yamabe {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

inline constexpr int max_dim = 8;

inline void check_dim(int n) {
    if (n < 1 || n > max_dim)
        throw std::invalid_argument("tensor dimension out of supported range [1," +
                                    std::to_string(max_dim) + "]");
}

class Ten3 {
  public:
    Ten3() : n_(0) {}
    explicit Ten3(int n) : n_(n), v_(static_cast<size_t>(n) * n * n, 0.0) { check_dim(n); }

    int dim() const { return n_; }
    double& operator()(int i, int j, int k) { return v_[(static_cast<size_t>(i) * n_ + j) * n_ + k]; }
    double operator()(int i, int j, int k) const { return v_[(static_cast<size_t>(i) * n_ + j) * n_ + k]; }

    double max_abs() const {
        double m = 0.0;
        for (double x : v_) m = std::max(m, std::abs(x));
        return m;
    }
    const std::vector<double>& data() const { return v_; }

  private:
    int n_;
    std::vector<double> v_;
};

class Ten4 {
  public:
    Ten4() : n_(0) {}
    explicit Ten4(int n) : n_(n), v_(static_cast<size_t>(n) * n * n * n, 0.0) { check_dim(n); }

    int dim() const { return n_; }
    double& operator()(int i, int j, int k, int l) {
        return v_[((static_cast<size_t>(i) * n_ + j) * n_ + k) * n_ + l];
    }
    double operator()(int i, int j, int k, int l) const {
        return v_[((static_cast<size_t>(i) * n_ + j) * n_ + k) * n_ + l];
    }

    double max_abs() const {
        double m = 0.0;
        for (double x : v_) m = std::max(m, std::abs(x));
        return m;
    }
    const std::vector<double>& data() const { return v_; }

    Ten4& operator-=(const Ten4& o) {
        if (o.n_ != n_) throw std::invalid_argument("Ten4 dimension mismatch");
        for (size_t i = 0; i < v_.size(); ++i) v_[i] -= o.v_[i];
        return *this;
    }

  private:
    int n_;
    std::vector<double> v_;
};

// Lower-triangular Cholesky factor of a positive definite matrix.
// Failure means the metric is not positive definite at this point.
inline Mat cholesky_lower(const Mat& g) {
    Eigen::LLT<Mat> llt(g);
    if (llt.info() != Eigen::Success)
        throw std::runtime_error("metric is not positive definite (Cholesky factorization failed)");
    return llt.matrixL();
}

inline Mat inverse_spd(const Mat& g) {
    Eigen::LLT<Mat> llt(g);
    if (llt.info() != Eigen::Success)
        throw std::runtime_error("metric is not positive definite (Cholesky factorization failed)");
    return llt.solve(Mat::Identity(g.rows(), g.cols()));
}

// Frame matrix E whose columns are a g-orthonormal basis: E^T g E = I.
// Built from the Cholesky factor, E = L^{-T}, so it is deterministic.
inline Mat orthonormal_frame(const Mat& g) {
    Mat L = cholesky_lower(g);
    int n = static_cast<int>(g.rows());
    return L.transpose().triangularView<Eigen::Upper>().solve(Mat::Identity(n, n));
}

// Covariant components of a rank-2 tensor in the frame E: T(e_a, e_b).
inline Mat to_frame(const Mat& T, const Mat& E) { return E.transpose() * T * E; }

// Covariant components of a rank-4 tensor in the frame E, contracted one slot
// at a time (n^5 work instead of n^8).
inline Ten4 to_frame(const Ten4& T, const Mat& E) {
    int n = T.dim();
    Ten4 a(n), b(n);
    for (int p = 0; p < n; ++p)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
                for (int l = 0; l < n; ++l) {
                    double s = 0.0;
                    for (int i = 0; i < n; ++i) s += T(i, j, k, l) * E(i, p);
                    a(p, j, k, l) = s;
                }
    for (int p = 0; p < n; ++p)
        for (int q = 0; q < n; ++q)
            for (int k = 0; k < n; ++k)
                for (int l = 0; l < n; ++l) {
                    double s = 0.0;
                    for (int j = 0; j < n; ++j) s += a(p, j, k, l) * E(j, q);
                    b(p, q, k, l) = s;
                }
    for (int p = 0; p < n; ++p)
        for (int q = 0; q < n; ++q)
            for (int u = 0; u < n; ++u)
                for (int l = 0; l < n; ++l) {
                    double s = 0.0;
                    for (int k = 0; k < n; ++k) s += b(p, q, k, l) * E(k, u);
                    a(p, q, u, l) = s;
                }
    for (int p = 0; p < n; ++p)
        for (int q = 0; q < n; ++q)
            for (int u = 0; u < n; ++u)
                for (int w = 0; w < n; ++w) {
                    double s = 0.0;
                    for (int l = 0; l < n; ++l) s += a(p, q, u, l) * E(l, w);
                    b(p, q, u, w) = s;
                }
    return b;
}

}  // namespace yamabe
