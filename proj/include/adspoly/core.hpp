#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace adspoly {

using cplx = std::complex<double>;
using Mat4 = Eigen::Matrix<cplx, 4, 4>;
using Mat4r = Eigen::Matrix4d;
using Vec4 = Eigen::Vector4d;
using Mat2 = Eigen::Matrix2d;

inline constexpr double pi = std::numbers::pi;
inline const cplx I1{0.0, 1.0};

// Raised by every module; the tag names the stage that failed.
class Error : public std::runtime_error {
public:
    Error(std::string stage, const std::string& what)
        : std::runtime_error(stage + ": " + what), stage_(std::move(stage)) {}
    const std::string& stage() const { return stage_; }

private:
    std::string stage_;
};

// Signature (2,2) pairing <x,y> = x0y0 + x1y1 - x2y2 - x3y3.
inline double inner(const Vec4& x, const Vec4& y) {
    return x[0] * y[0] + x[1] * y[1] - x[2] * y[2] - x[3] * y[3];
}

// Hermitian extension, conjugate-linear in the second slot.
inline cplx inner(const Eigen::Vector4cd& x, const Eigen::Vector4cd& y) {
    return x[0] * std::conj(y[0]) + x[1] * std::conj(y[1]) - x[2] * std::conj(y[2]) -
           x[3] * std::conj(y[3]);
}

inline Mat4r J22() { return Vec4(1, 1, -1, -1).asDiagonal(); }

// Unit Euclidean norm, first nonzero coordinate positive.
inline Vec4 projective_normalize(const Vec4& v) {
    Vec4 x = v / v.norm();
    for (int i = 0; i < 4; ++i) {
        if (std::abs(x[i]) > 1e-12) {
            if (x[i] < 0) x = -x;
            break;
        }
    }
    return x;
}

// Angle between the lines spanned by a and b.
inline double projective_distance(const Vec4& a, const Vec4& b) {
    // acos loses half the digits near 1; the chord form does not.
    Vec4 an = a / a.norm(), bn = b / b.norm();
    if (an.dot(bn) < 0) bn = -bn;
    return 2.0 * std::asin(std::min(1.0, 0.5 * (an - bn).norm()));
}

// (x0,x1,x2,x3) -> [[x3-x1, x0-x2], [x0+x2, x3+x1]]; det M(x) = -<x,x>.
inline Mat2 to_matrix(const Vec4& x) {
    Mat2 m;
    m << x[3] - x[1], x[0] - x[2], x[0] + x[2], x[3] + x[1];
    return m;
}

inline Vec4 from_matrix(const Mat2& m) {
    return Vec4(0.5 * (m(0, 1) + m(1, 0)), 0.5 * (m(1, 1) - m(0, 0)), 0.5 * (m(1, 0) - m(0, 1)),
                0.5 * (m(0, 0) + m(1, 1)));
}

template <class M>
double max_abs(const M& m) {
    return m.cwiseAbs().maxCoeff();
}

}  // namespace adspoly
