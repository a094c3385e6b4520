#ifndef TLSURF_PARACOMPLEX_HPP
#define TLSURF_PARACOMPLEX_HPP

#include <algorithm>
#include <cmath>
#include <string_view>

namespace tlsurf {

/**
 * Split-complex number re + j*im with j*j = +1.
 *
 * The square norm re^2 - im^2 is indefinite; elements with zero square
 * norm but nonzero components are "null".
 */
template <typename Scalar>
struct Paracomplex
{
    Scalar re{0};
    Scalar im{0};

    constexpr Paracomplex() = default;
    constexpr Paracomplex(Scalar r, Scalar i = Scalar(0)) : re(r), im(i) {}

    static constexpr Paracomplex unit() { return {Scalar(0), Scalar(1)}; }

    constexpr Paracomplex& operator+=(const Paracomplex& o) { re += o.re; im += o.im; return *this; }
    constexpr Paracomplex& operator-=(const Paracomplex& o) { re -= o.re; im -= o.im; return *this; }
    constexpr Paracomplex& operator*=(const Paracomplex& o) { return *this = *this * o; }
    constexpr Paracomplex& operator*=(Scalar c) { re *= c; im *= c; return *this; }

    friend constexpr Paracomplex operator+(Paracomplex a, const Paracomplex& b) { return a += b; }
    friend constexpr Paracomplex operator-(Paracomplex a, const Paracomplex& b) { return a -= b; }
    friend constexpr Paracomplex operator-(const Paracomplex& a) { return {-a.re, -a.im}; }

    friend constexpr Paracomplex operator*(const Paracomplex& a, const Paracomplex& b)
    {
        return {a.re * b.re + a.im * b.im, a.re * b.im + a.im * b.re};
    }
    friend constexpr Paracomplex operator*(Scalar c, Paracomplex a) { return a *= c; }
    friend constexpr Paracomplex operator*(Paracomplex a, Scalar c) { return a *= c; }

    friend constexpr bool operator==(const Paracomplex&, const Paracomplex&) = default;
};

using Paracomplexd = Paracomplex<double>;

template <typename Scalar>
constexpr Paracomplex<Scalar> conj(const Paracomplex<Scalar>& z)
{
    return {z.re, -z.im};
}

/// re^2 - im^2, evaluated as (re - im)(re + im) to keep the relative error small near the null cone.
template <typename Scalar>
constexpr Scalar sq_norm(const Paracomplex<Scalar>& z)
{
    return (z.re - z.im) * (z.re + z.im);
}

/// re^2 + im^2; the positive-definite magnitude used to scale null tests.
template <typename Scalar>
constexpr Scalar euclidean_sq(const Paracomplex<Scalar>& z)
{
    return z.re * z.re + z.im * z.im;
}

enum class CausalClass { zero, null_nonzero, positive, negative };

inline constexpr std::string_view to_string(CausalClass c)
{
    switch (c) {
        case CausalClass::zero: return "zero";
        case CausalClass::null_nonzero: return "null_nonzero";
        case CausalClass::positive: return "positive";
        case CausalClass::negative: return "negative";
    }
    return "?";
}

struct CausalTolerance
{
    double eps_zero = 1e-10;
    double eps_null = 1e-8;
};

/// The only place where the exact zero/null dichotomy is turned into a tolerance test.
template <typename Scalar>
CausalClass classify(const Paracomplex<Scalar>& z, const CausalTolerance& tol = {})
{
    using std::abs;
    if (std::max(abs(z.re), abs(z.im)) <= tol.eps_zero)
        return CausalClass::zero;
    const Scalar n = sq_norm(z);
    if (abs(n) <= tol.eps_null * euclidean_sq(z))
        return CausalClass::null_nonzero;
    return n > 0 ? CausalClass::positive : CausalClass::negative;
}

} // namespace tlsurf

#endif // TLSURF_PARACOMPLEX_HPP
